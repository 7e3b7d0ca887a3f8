#include "fredop/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fredop/errors.hpp"

namespace fredop {

std::string_view method_name(SolveMethod m) noexcept { return m == SolveMethod::picard ? "picard" : "newton"; }

namespace {

void validate(const Problem& problem, const GridFunction& v, const SolverOptions& opts) {
    require_same_grid(problem.grid(), v);
    if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (opts.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
}

double residual_of(const Problem& problem, const GridFunction& u, const GridFunction& v) {
    return sup_norm((apply_f(problem, u).values() - v.values()).eval());
}

}  // namespace

SolveReport solve_picard(const Problem& problem, const GridFunction& v, const SolverOptions& opts) {
    validate(problem, v, opts);
    const Grid& grid = problem.grid();
    const double a = problem.identity_coefficient();

    SolveReport report{v};
    report.method = SolveMethod::picard;

    const ContractionReport contraction = check_contraction(problem, 1.0 + 2.0 * sup_norm(v));
    const double kappa = contraction.combined_estimate_kappa;
    report.kappa_estimate = kappa;
    const bool contractive = kappa < 1.0;
    if (!contractive) {
        report.warnings.push_back("NotContractiveWarning: estimated contraction constant " + std::to_string(kappa) +
                                  " >= 1; iterating anyway");
    }

    // Iterates in increment form, d_{n+1} = -(K d_n + C(u_{n+1}) - C(u_n)) / a, which equals
    // T(u_{n+1}) - T(u_n) but keeps full relative accuracy in the linear part as steps shrink.
    const bool has_linear = !problem.linear_kernels().empty();
    Eigen::VectorXd u = v.values();
    Eigen::VectorXd c_u;
    if (problem.has_hammerstein()) c_u = problem.hammerstein(v).values();
    Eigen::VectorXd d = v.values();
    if (has_linear) d.noalias() -= problem.linear_sum().entries * u;
    if (problem.has_hammerstein()) d -= c_u;
    d = (d - a * u) / a;
    Eigen::VectorXd d_prev;
    int growth_run = 0;

    auto finish = [&](bool converged) {
        report.converged = converged;
        report.iterations = static_cast<int>(report.step_sizes.size());
        report.solution = GridFunction(grid, u);
        report.residual_sup = residual_of(problem, report.solution, v);
        const auto& s = report.step_sizes;
        for (std::size_t n = 1; n < s.size(); ++n) {
            if (s[n - 1] > 0.0) {
                const double ratio = s[n] / s[n - 1];
                report.contraction_ratio_observed = std::max(report.contraction_ratio_observed.value_or(0.0), ratio);
            }
        }
        if (contractive && !s.empty()) {
            report.a_priori_bound = std::pow(kappa, report.iterations) / (1.0 - kappa) * s.front();
        }
    };

    // On convergence, adds the geometric tail q/(1-q) d of the remaining steps, q fitted to the
    // last two increments; kept only when it lowers the residual.
    auto extrapolate = [&] {
        if (d_prev.size() == 0) return;
        const double dd = d_prev.squaredNorm();
        if (!(dd > 0.0)) return;
        const double q = d.dot(d_prev) / dd;
        if (!(std::abs(q) < 1.0)) return;
        const Eigen::VectorXd candidate = u + (q / (1.0 - q)) * d;
        if (!candidate.allFinite()) return;
        const double before = residual_of(problem, GridFunction(grid, u), v);
        const double after = residual_of(problem, GridFunction(grid, candidate), v);
        if (after < before) u = candidate;
    };

    for (int n = 0; n < opts.max_iter; ++n) {
        if (n > 0) {
            Eigen::VectorXd next_d = Eigen::VectorXd::Zero(u.size());
            if (has_linear) next_d.noalias() -= problem.linear_sum().entries * d;
            if (problem.has_hammerstein()) {
                Eigen::VectorXd c_next = problem.hammerstein(GridFunction(grid, u)).values();
                next_d -= c_next - c_u;
                c_u = std::move(c_next);
            }
            d_prev = std::move(d);
            d = next_d / a;
        }
        if (!d.allFinite() || !(u + d).allFinite()) {
            finish(false);
            throw DivergenceError("Picard iterate overflowed", report);
        }
        const double step = sup_norm(d);
        const double previous = report.step_sizes.empty() ? 0.0 : report.step_sizes.back();
        report.step_sizes.push_back(step);
        u += d;

        if (step <= opts.tol && residual_of(problem, GridFunction(grid, u), v) <= 10.0 * opts.tol) {
            extrapolate();
            finish(true);
            return report;
        }
        if (!contractive) {
            growth_run = (n > 0 && step > previous) ? growth_run + 1 : 0;
            if (growth_run >= kDivergenceRun) {
                finish(false);
                throw DivergenceError("Picard iteration diverges: step size grew " + std::to_string(kDivergenceRun) +
                                          " consecutive times",
                                      report);
            }
        }
    }
    finish(false);
    throw MaxIterExceeded("Picard iteration did not reach tol " + std::to_string(opts.tol) + " in " +
                              std::to_string(opts.max_iter) + " iterations",
                          report);
}

SolveReport solve_newton(const Problem& problem, const GridFunction& v, const SolverOptions& opts,
                         const std::optional<GridFunction>& initial) {
    validate(problem, v, opts);
    const Grid& grid = problem.grid();
    if (initial) require_same_grid(grid, *initial);

    SolveReport report{initial.value_or(v)};
    report.method = SolveMethod::newton;
    Eigen::VectorXd u = report.solution.values();

    if (opts.fd_validation && problem.has_hammerstein()) {
        constexpr double t = 1e-6;
        const GridFunction u0(grid, u);
        const Eigen::VectorXd jm = problem.hammerstein_jacobian(u0).entries.rowwise().sum();
        const Eigen::VectorXd fd =
            (problem.hammerstein(GridFunction(grid, (u.array() + t).matrix())).values() - problem.hammerstein(u0).values()) /
            t;
        const double err = sup_norm((jm - fd).eval()) / (1.0 + sup_norm(jm));
        report.fd_validation_error = err;
        if (err > 1e-4) {
            report.warnings.push_back("Jacobian disagrees with finite differences (relative error " +
                                      std::to_string(err) + ")");
        }
    }

    auto finish = [&](bool converged) {
        report.converged = converged;
        report.iterations = static_cast<int>(report.step_sizes.size());
        report.solution = GridFunction(grid, u);
        report.residual_sup = residual_of(problem, report.solution, v);
    };

    Eigen::VectorXd residual = v.values() - apply_f(problem, GridFunction(grid, u)).values();
    if (sup_norm(residual) <= opts.tol) {
        finish(true);
        return report;
    }
    for (int n = 0; n < opts.max_iter; ++n) {
        const NystromMatrix jac = problem.jacobian(GridFunction(grid, u));
        Eigen::VectorXd delta;
        try {
            delta = fredop::linear_solve(jac.entries, residual);
        } catch (const SingularMatrix& e) {
            finish(false);
            throw SingularJacobian(std::string("singular Jacobian at iteration ") + std::to_string(n + 1) + ": " +
                                       e.what(),
                                   report);
        }
        u += delta;
        if (!u.allFinite()) {
            u -= delta;
            finish(false);
            throw DivergenceError("Newton iterate overflowed", report);
        }
        const double step = sup_norm(delta);
        report.step_sizes.push_back(step);
        residual = v.values() - apply_f(problem, GridFunction(grid, u)).values();
        const double res = sup_norm(residual);
        if ((step <= opts.tol || res <= opts.tol) && res <= 10.0 * opts.tol) {
            finish(true);
            return report;
        }
    }
    finish(false);
    throw MaxIterExceeded("Newton iteration did not reach tol " + std::to_string(opts.tol) + " in " +
                              std::to_string(opts.max_iter) + " iterations",
                          report);
}

namespace {

struct Attempt {
    GridFunction solution;
    SolveMethod method;
};

Attempt solve_with_fallback(const Problem& problem, const GridFunction& rhs, const SolverOptions& opts,
                            const std::optional<GridFunction>& start) {
    try {
        return {solve_newton(problem, rhs, opts, start).solution, SolveMethod::newton};
    } catch (const SingularJacobian&) {
        return {solve_picard(problem, rhs, opts).solution, SolveMethod::picard};
    }
}

}  // namespace

ContinuationReport solve_continuation(const Problem& problem, const GridFunction& v0, const GridFunction& v1,
                                      int steps, const SolverOptions& opts) {
    if (steps < 1) throw InvalidArgument("continuation needs at least one step");
    validate(problem, v0, opts);
    validate(problem, v1, opts);
    const Grid& grid = problem.grid();

    ContinuationReport report;
    report.steps = steps;
    std::optional<GridFunction> previous;
    for (int j = 0; j <= steps; ++j) {
        const double t = static_cast<double>(j) / steps;
        const GridFunction rhs(grid, v0.values() + t * (v1.values() - v0.values()));
        try {
            Attempt a = solve_with_fallback(problem, rhs, opts, previous);
            if (previous) {
                report.max_consecutive_jump = std::max(report.max_consecutive_jump, sup_distance(*previous, a.solution));
            }
            report.parameters.push_back(t);
            report.methods.push_back(a.method);
            report.solutions.push_back(a.solution);
            previous = std::move(a.solution);
        } catch (const Error& e) {
            throw ContinuationError(t, e.what());
        }
    }

    try {
        const Attempt direct = solve_with_fallback(problem, v1, opts, std::nullopt);
        report.endpoint_distance = sup_distance(direct.solution, report.solutions.back());
        report.endpoint_matches_direct = report.endpoint_distance <= 10.0 * opts.tol;
    } catch (const Error& e) {
        throw ContinuationError(1.0, std::string("direct endpoint solve: ") + e.what());
    }
    return report;
}

UniquenessReport uniqueness_probe(const Problem& problem, const GridFunction& v, int starts,
                                  const SolverOptions& opts) {
    if (starts < 1) throw InvalidArgument("starts must be at least 1");
    validate(problem, v, opts);
    const Grid& grid = problem.grid();

    UniquenessReport report;
    report.starts = starts;
    report.start_radius = 1.0 + 2.0 * sup_norm(v);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uniform(-report.start_radius, report.start_radius);

    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd init(grid.size());
        for (Eigen::Index i = 0; i < init.size(); ++i) init[i] = uniform(rng);
        try {
            const SolveReport r = solve_newton(problem, v, opts, GridFunction(grid, std::move(init)));
            ++report.converged_starts;
            bool matched = false;
            for (std::size_t c = 0; c < report.distinct_solutions.size(); ++c) {
                if (sup_distance(report.distinct_solutions[c], r.solution) <= report.cluster_radius) {
                    ++report.cluster_sizes[c];
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                report.distinct_solutions.push_back(r.solution);
                report.cluster_sizes.push_back(1);
            }
        } catch (const SolveError&) {
            // counted via converged_starts
        }
    }
    report.all_converged = report.converged_starts == starts;
    report.jacobian_nonsingular_at_each = !report.distinct_solutions.empty();
    for (const auto& rep : report.distinct_solutions) {
        if (!is_nonsingular(problem.jacobian(rep).entries)) report.jacobian_nonsingular_at_each = false;
    }
    return report;
}

}  // namespace fredop
