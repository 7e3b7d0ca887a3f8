#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include <Eigen/LU>

#include "fredop/errors.hpp"
#include "fredop/solvers.hpp"
#include "oracles.hpp"

using namespace fredop;

namespace {

Problem make_problem(std::vector<std::string> kernels, std::optional<std::string> h = std::nullopt,
                     int nodes = 201, double a = 1.0) {
    ProblemSpec spec;
    spec.domain = DomainSpec{{{0.0, 1.0}}};
    spec.nodes_per_dim = nodes;
    for (const auto& k : kernels) spec.linear_kernels.push_back(parse(k));
    if (h) spec.hammerstein_kernel = parse(*h);
    spec.identity_coefficient = a;
    return Problem(spec);
}

double max_dev(const GridFunction& f, double c) { return (f.values().array() - c).abs().maxCoeff(); }

}  // namespace

TEST(Picard, ConstantKernel) {
    const Problem p = make_problem({"0.5"});
    const SolveReport r = solve_picard(p, GridFunction::constant(p.grid(), 1.0));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(max_dev(r.solution, 2.0 / 3.0), 1e-12);
    ASSERT_TRUE(r.contraction_ratio_observed);
    EXPECT_LE(*r.contraction_ratio_observed, 0.5 + 1e-6);
    EXPECT_NEAR(*r.kappa_estimate, 0.5, 1e-15);
    EXPECT_LE(r.residual_sup, 1e-9);
    ASSERT_TRUE(r.a_priori_bound);
    EXPECT_GE(*r.a_priori_bound, 0.0);
}

TEST(Picard, IdentityConvergesInOneIteration) {
    const Problem p = make_problem({}, std::nullopt, 11);
    const GridFunction v(p.grid(), Eigen::VectorXd::LinSpaced(11, -2, 5));
    const SolveReport r = solve_picard(p, v);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_EQ(r.solution.values(), v.values());
}

TEST(Picard, HammersteinSine) {
    const Problem p = make_problem({}, "0.25*sin(u)");
    const SolveReport r = solve_picard(p, GridFunction::constant(p.grid(), 1.0));
    EXPECT_LE(max_dev(r.solution, oracle::hammerstein_sine_constant()), 1e-10);
}

TEST(Picard, IdentityCoefficient) {
    // 2u + 0.5 ∫u = 1 → u = 1 / 2.5
    const Problem p = make_problem({"0.5"}, std::nullopt, 51, 2.0);
    const SolveReport r = solve_picard(p, GridFunction::constant(p.grid(), 1.0));
    EXPECT_LE(max_dev(r.solution, 0.4), 1e-10);
}

TEST(Picard, DivergenceIsDetected) {
    const Problem p = make_problem({"3"}, std::nullopt, 21);
    try {
        solve_picard(p, GridFunction::constant(p.grid(), 1.0));
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_FALSE(e.partial().converged);
        ASSERT_FALSE(e.partial().warnings.empty());
        EXPECT_NE(e.partial().warnings[0].find("NotContractiveWarning"), std::string::npos);
    }
}

TEST(Picard, MaxIterCarriesPartialReport) {
    const Problem p = make_problem({"0.5"}, std::nullopt, 21);
    SolverOptions o;
    o.max_iter = 5;
    try {
        solve_picard(p, GridFunction::constant(p.grid(), 1.0), o);
        FAIL();
    } catch (const MaxIterExceeded& e) {
        EXPECT_EQ(e.partial().iterations, 5);
        EXPECT_EQ(e.partial().step_sizes.size(), 5u);
    }
}

TEST(Newton, LinearProblemInOneIteration) {
    const Problem p = make_problem({"0.4*cos(x*y)", "0.2*x*y"});
    Eigen::VectorXd v = 1.0 + p.grid().nodes().col(0).array();
    const GridFunction gv(p.grid(), v);
    const SolveReport r = solve_newton(p, gv);
    EXPECT_EQ(r.iterations, 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(201, 201) + p.linear_sum().entries;
    const Eigen::VectorXd direct = a.partialPivLu().solve(v);  // independent solver
    EXPECT_LE((r.solution.values() - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Newton, HammersteinSineAgreesWithPicardAndBisection) {
    const Problem p = make_problem({}, "0.25*sin(u)");
    const GridFunction v = GridFunction::constant(p.grid(), 1.0);
    const SolveReport n = solve_newton(p, v);
    const SolveReport pi = solve_picard(p, v);
    const double c = oracle::hammerstein_sine_constant();
    EXPECT_LE(max_dev(n.solution, c), 1e-10);
    EXPECT_LE(sup_distance(n.solution, pi.solution), 10 * 1e-10);
    EXPECT_LE(n.iterations, 8);
    ASSERT_TRUE(n.fd_validation_error);
    EXPECT_LE(*n.fd_validation_error, 1e-6);
    EXPECT_TRUE(n.warnings.empty());
}

TEST(Newton, QuadraticConvergence) {
    const Problem p = make_problem({"0.3*x*y"}, "0.5*tanh(u) + 0.1*u^3*x", 41);
    SolverOptions o;
    o.tol = 1e-13;
    const SolveReport r = solve_newton(p, GridFunction::constant(p.grid(), 2.0), o);
    const auto& s = r.step_sizes;
    ASSERT_GE(s.size(), 4u);
    // e_{n+1} <= C e_n^2 once in the basin
    bool quadratic = false;
    for (std::size_t n = 1; n + 1 < s.size(); ++n) {
        if (s[n] < 1e-2 && s[n + 1] > 1e-15) quadratic |= s[n + 1] <= 10 * s[n] * s[n];
    }
    EXPECT_TRUE(quadratic);
}

TEST(Newton, FixedPointViaZeroRightHandSide) {
    // f(x) = x - (K1 + C1)(x) with K1 = 0.3 x y, C1 = 0.2 cos(u): f(x) = 0 iff x is the fixed point
    const Problem p = make_problem({"-0.3*x*y"}, "-0.2*cos(u)", 101);
    const SolveReport r = solve_newton(p, GridFunction::constant(p.grid(), 0.0));
    const Eigen::VectorXd x = r.solution.values();
    Eigen::VectorXd tx(x.size());
    const auto& w = p.grid().weights();
    const auto& nodes = p.grid().nodes();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double s = 0;
        for (Eigen::Index j = 0; j < x.size(); ++j) s += w[j] * (0.3 * nodes(i, 0) * nodes(j, 0) * x[j] + 0.2 * std::cos(x[j]));
        tx[i] = s;
    }
    EXPECT_LE((tx - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Newton, SingularJacobian) {
    const Problem p = make_problem({"-1"}, std::nullopt, 21);
    EXPECT_THROW(solve_newton(p, GridFunction::constant(p.grid(), 1.0)), SingularJacobian);
}

TEST(Newton, UnreachableToleranceThrowsMaxIter) {
    const Problem p = make_problem({}, "0.25*sin(u)", 21);
    SolverOptions o;
    o.tol = 1e-99;
    o.max_iter = 20;
    EXPECT_THROW(solve_newton(p, GridFunction::constant(p.grid(), 1.0), o), MaxIterExceeded);
}

TEST(Solvers, Deterministic) {
    const Problem p = make_problem({"0.4*cos(x*y)"}, "0.2*sin(u*x)", 51);
    const GridFunction v = GridFunction::constant(p.grid(), 1.5);
    for (int rep = 0; rep < 2; ++rep) {
        const SolveReport a = solve_newton(p, v), b = solve_newton(p, v);
        EXPECT_EQ(std::memcmp(a.solution.values().data(), b.solution.values().data(), 51 * sizeof(double)), 0);
        const SolveReport c = solve_picard(p, v), d = solve_picard(p, v);
        EXPECT_EQ(std::memcmp(c.solution.values().data(), d.solution.values().data(), 51 * sizeof(double)), 0);
    }
}

TEST(Solvers, RejectForeignRightHandSide) {
    const Problem p = make_problem({"0.5"}, std::nullopt, 11);
    const Grid other = build_grid(DomainSpec{{{0.0, 1.0}}}, QuadratureRule::trapezoid, 11);
    EXPECT_THROW(solve_picard(p, GridFunction::constant(other, 1.0)), GridMismatch);
    EXPECT_THROW(solve_newton(p, GridFunction::constant(other, 1.0)), GridMismatch);
}

TEST(Continuation, EqualEndpoints) {
    const Problem p = make_problem({"0.5"}, "0.1*sin(u)", 21);
    const GridFunction v = GridFunction::constant(p.grid(), 1.0);
    const ContinuationReport r = solve_continuation(p, v, v, 5);
    EXPECT_EQ(r.max_consecutive_jump, 0.0);
    EXPECT_EQ(r.solutions.size(), 6u);
    EXPECT_TRUE(r.endpoint_matches_direct);
}

TEST(Continuation, LinearPath) {
    const Problem p = make_problem({"0.5"});
    const GridFunction v0 = GridFunction::constant(p.grid(), 0.0), v1 = GridFunction::constant(p.grid(), 1.0);
    double previous_jump = INFINITY;
    for (int steps : {4, 8}) {
        const ContinuationReport r = solve_continuation(p, v0, v1, steps);
        for (int j = 0; j <= steps; ++j) {
            EXPECT_EQ(r.parameters[j], static_cast<double>(j) / steps);
            EXPECT_LE(max_dev(r.solutions[j], 2.0 / 3.0 * j / steps), 1e-10);
        }
        EXPECT_LE(r.max_consecutive_jump, previous_jump);
        previous_jump = r.max_consecutive_jump;
    }
}

TEST(Uniqueness, ContractiveInstance) {
    const Problem p = make_problem({"0.5"}, std::nullopt, 51);
    const GridFunction v = GridFunction::constant(p.grid(), 1.0);
    const UniquenessReport r = uniqueness_probe(p, v, 16);
    EXPECT_EQ(r.distinct_solutions.size(), 1u);
    EXPECT_EQ(r.cluster_sizes[0], 16);
    EXPECT_TRUE(r.all_converged);
    EXPECT_TRUE(r.jacobian_nonsingular_at_each);
    EXPECT_EQ(r.start_radius, 3.0);
    EXPECT_LE(sup_distance(r.distinct_solutions[0], solve_picard(p, v).solution), 1e-9);
}

TEST(Uniqueness, IdentityProblem) {
    const Problem p = make_problem({}, std::nullopt, 11);
    const GridFunction v(p.grid(), Eigen::VectorXd::LinSpaced(11, 0, 1));
    const UniquenessReport r = uniqueness_probe(p, v, 16);
    ASSERT_EQ(r.distinct_solutions.size(), 1u);
    EXPECT_LE(sup_distance(r.distinct_solutions[0], v), 1e-15);
}

TEST(Uniqueness, RepresentativesAreSeparated) {
    // u = 2 ∫ tanh(3u) has the constant solutions 0 and about ±2
    const Problem p = make_problem({}, "-2*tanh(3*u)", 5);
    const UniquenessReport r = uniqueness_probe(p, GridFunction::constant(p.grid(), 0.0), 32);
    for (std::size_t a = 0; a < r.distinct_solutions.size(); ++a)
        for (std::size_t b = a + 1; b < r.distinct_solutions.size(); ++b)
            EXPECT_GT(sup_distance(r.distinct_solutions[a], r.distinct_solutions[b]), r.cluster_radius);
    EXPECT_GE(r.distinct_solutions.size(), 2u);
}
