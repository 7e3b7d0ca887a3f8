// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "fredop/app.hpp"
#include "fredop/diagnostics.hpp"
#include "fredop/solvers.hpp"
#include "oracles.hpp"

using namespace fredop;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Problem unit_problem(std::vector<std::string> kernels, std::optional<std::string> h = std::nullopt) {
    ProblemSpec spec;
    spec.domain = DomainSpec{{{0.0, 1.0}}};
    spec.rule = QuadratureRule::trapezoid;
    spec.nodes_per_dim = 201;
    for (const auto& k : kernels) spec.linear_kernels.push_back(parse(k));
    if (h) spec.hammerstein_kernel = parse(*h);
    return Problem(spec);
}

double max_dev(const GridFunction& f, double c) { return (f.values().array() - c).abs().maxCoeff(); }

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome constant_kernel() {
    const Problem p = unit_problem({"0.5"});
    const GridFunction v = GridFunction::constant(p.grid(), 1.0);
    const auto t0 = Clock::now();
    const SolveReport r = solve_picard(p, v);
    const double secs = seconds_since(t0);
    const double err = max_dev(r.solution, 1.0 / (1.0 + 0.5 * 1.0));
    return {r.converged && err <= 1e-12 && r.iterations <= 60 && secs < 0.5,
            fmt("error %.3e, %d iterations, %.3f s", err, r.iterations, secs)};
}

Outcome contraction_ratio() {
    const Problem p = unit_problem({"0.5"});
    const SolveReport r = solve_picard(p, GridFunction::constant(p.grid(), 1.0));
    double worst = 0.0;
    for (std::size_t n = 1; n < r.step_sizes.size(); ++n) worst = std::max(worst, r.step_sizes[n] / r.step_sizes[n - 1]);
    const double k = check_contraction(p).contraction_constant_k;
    return {worst <= 0.5 + 1e-6 && std::abs(k - 0.5) <= 1e-15,
            fmt("max step ratio %.9f over %zu steps, k = %.17g", worst, r.step_sizes.size(), k)};
}

Outcome hammerstein_fixed_point() {
    const Problem p = unit_problem({}, "0.25*sin(u)");
    const GridFunction v = GridFunction::constant(p.grid(), 1.0);
    const double c = oracle::bisect([](double x) { return x + 0.25 * std::sin(x) - 1.0; }, 0.0, 1.0, 1e-12);
    const SolveReport n = solve_newton(p, v);
    const SolveReport pi = solve_picard(p, v);
    const double en = max_dev(n.solution, c), ep = max_dev(pi.solution, c);
    return {n.converged && pi.converged && en <= 1e-10 && ep <= 1e-10 && n.iterations <= 8,
            fmt("c = %.15f, newton err %.2e in %d its, picard err %.2e", c, en, n.iterations, ep)};
}

Outcome frechet_order() {
    const Problem sine = unit_problem({}, "0.25*sin(u)");
    const FrechetReport r = check_frechet(sine, GridFunction::constant(sine.grid(), 0.7),
                                          GridFunction::constant(sine.grid(), 1.0), {1e-2, 1e-3, 1e-4});
    const double order = r.estimated_order.value_or(NAN);
    const Problem affine = unit_problem({}, "0.3*u*x + 0.1*y");
    const FrechetReport ra = check_frechet(affine, GridFunction::constant(affine.grid(), 0.7),
                                           GridFunction::constant(affine.grid(), 1.0), {1e-2, 1e-3, 1e-4});
    double worst = 0.0;
    for (double rem : ra.remainders) worst = std::max(worst, rem);
    return {order >= 1.8 && order <= 2.4 && worst <= 1e-13,
            fmt("order %.4f, affine max remainder %.2e", order, worst)};
}

Outcome index_invariance() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    int total = 0, good = 0;
    for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {2, 3}, {5, 5}}) {
        for (auto kind : {PerturbationKind::finite_rank, PerturbationKind::small_norm}) {
            Eigen::MatrixXd s(m, n);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) s(i, j) = normal(rng);
            const IndexStabilityReport r = index_stability_trial(s, kind, 1e-3, 100, rng());
            total += r.trials;
            if (r.all_indices_equal && r.index == n - m && fredholm_index(s).index == n - m) good += r.trials;
        }
    }
    const double secs = seconds_since(t0);
    return {good == total && total == 800 && secs < 2.0, fmt("%d/%d trials invariant, %.3f s", good, total, secs)};
}

Outcome uniqueness() {
    std::string detail;
    bool ok = true;
    for (auto& [name, p] : {std::pair{"constant kernel", unit_problem({"0.5"})},
                            std::pair{"sine Hammerstein", unit_problem({}, "0.25*sin(u)")}}) {
        SolverOptions o;
        o.seed = 0;
        const UniquenessReport r = uniqueness_probe(p, GridFunction::constant(p.grid(), 1.0), 16, o);
        ok = ok && r.distinct_solutions.size() == 1 && r.all_converged && r.jacobian_nonsingular_at_each;
        detail += fmt("%s: %zu cluster(s), %d/16 converged; ", name, r.distinct_solutions.size(), r.converged_starts);
    }
    return {ok, detail};
}

Outcome continuation() {
    const Problem p = unit_problem({"0.5"});
    const GridFunction v0 = GridFunction::constant(p.grid(), 0.0), v1 = GridFunction::constant(p.grid(), 1.0);
    double worst = 0.0;
    double jump[2];
    int idx = 0;
    for (int steps : {4, 8}) {
        const ContinuationReport r = solve_continuation(p, v0, v1, steps);
        for (int j = 0; j <= steps; ++j) worst = std::max(worst, max_dev(r.solutions[j], 2.0 / 3.0 * j / steps));
        jump[idx++] = r.max_consecutive_jump;
    }
    const double ratio = jump[1] / jump[0];
    return {worst <= 1e-10 && std::abs(ratio - 0.5) <= 0.5 * 0.2,
            fmt("max error %.2e, jumps %.6f -> %.6f (ratio %.4f)", worst, jump[0], jump[1], ratio)};
}

Outcome degenerate_norm() {
    const NormSeparationReport r = check_norm_separation(unit_problem({"1"}));
    return {std::abs(r.norm_K_plus_C - 1.0) <= 1e-12 && !r.pass,
            fmt("norm %.17g, pass = %s", r.norm_K_plus_C, r.pass ? "true" : "false")};
}

Outcome lax_milgram() {
    bool ok = true;
    for (int n : {1, 2, 10, 50}) {
        const Eigen::MatrixXd a = 2.0 * Eigen::MatrixXd::Identity(n, n);
        ok = ok && check_lax_milgram(a, 1000, 0).min_rayleigh == 2.0;
    }
    Eigen::Matrix2d rot;
    rot << 0, -1, 1, 0;
    const double q = check_lax_milgram(rot, 1000, 0).min_rayleigh;
    return {ok && q <= 1e-12, fmt("2I exact: %s, rotation min %.2e", ok ? "yes" : "no", q)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fredop_acceptance";
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;
    for (const char* id : {"example1", "example2"}) {
        std::string reports[2];
        for (int rep = 0; rep < 2; ++rep) {
            const std::string out = (dir / (std::string(id) + "_" + std::to_string(rep) + ".json")).string();
            const char* argv[] = {"fredop", "reproduce", id, "--output", out.c_str(), "--quiet"};
            std::ostringstream so, se;
            const int code = run_cli(6, argv, so, se);
            ok = ok && code == kExitOk;
            reports[rep] = slurp(out);
        }
        const bool same = !reports[0].empty() && reports[0] == reports[1];
        ok = ok && same;
        detail += fmt("%s %s (%zu bytes); ", id, same ? "identical" : "DIFFERENT", reports[0].size());
    }
    fs::remove_all(dir);
    return {ok, detail};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"constant-kernel closed form", constant_kernel},
        {"Picard contraction ratio", contraction_ratio},
        {"Hammerstein fixed point", hammerstein_fixed_point},
        {"Frechet remainder order", frechet_order},
        {"Fredholm index invariance", index_invariance},
        {"uniqueness probe", uniqueness},
        {"continuation continuity", continuation},
        {"degenerate norm detection", degenerate_norm},
        {"Lax-Milgram sampling", lax_milgram},
        {"reproduce determinism", determinism},
    };
    int failures = 0, number = 0;
    for (const auto& [name, run] : criteria) {
        ++number;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << number << "] " << name << ": " << o.detail << '\n';
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
