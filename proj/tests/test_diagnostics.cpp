#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fredop/diagnostics.hpp"
#include "fredop/errors.hpp"
#include "oracles.hpp"

using namespace fredop;

namespace {

Problem make_problem(std::vector<std::string> kernels, std::optional<std::string> h = std::nullopt,
                     int nodes = 201) {
    ProblemSpec spec;
    spec.domain = DomainSpec{{{0.0, 1.0}}};
    spec.nodes_per_dim = nodes;
    for (const auto& k : kernels) spec.linear_kernels.push_back(parse(k));
    if (h) spec.hammerstein_kernel = parse(*h);
    return Problem(spec);
}

Eigen::MatrixXd random_matrix(int m, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = d(rng);
    return a;
}

}  // namespace

TEST(Contraction, Examples) {
    const ContractionReport half = check_contraction(make_problem({"0.5"}));
    EXPECT_EQ(half.contraction_constant_k, 0.5);
    EXPECT_TRUE(half.is_contractive);
    EXPECT_FALSE(half.hammerstein_hu_sup);

    const ContractionReport sine = check_contraction(make_problem({"0"}, "0.25*sin(u)"));
    EXPECT_EQ(sine.combined_estimate_kappa, 0.25);
    EXPECT_TRUE(sine.is_contractive);

    const ContractionReport one = check_contraction(make_problem({"1"}));
    EXPECT_EQ(one.contraction_constant_k, 1.0);
    EXPECT_FALSE(one.is_contractive);
}

TEST(Contraction, KernelSupAndMeasure) {
    ProblemSpec spec;
    spec.domain = DomainSpec{{{0.0, 2.0}}};
    spec.nodes_per_dim = 11;
    spec.linear_kernels = {parse("0.1*x*y"), parse("-0.05")};
    const ContractionReport r = check_contraction(Problem(spec));
    EXPECT_NEAR(r.kernel_sup_M, 0.35, 1e-15);
    EXPECT_EQ(r.measure, 2.0);
    EXPECT_NEAR(r.contraction_constant_k, 0.7, 1e-15);
    ASSERT_EQ(r.per_kernel_sup.size(), 2u);
    EXPECT_NEAR(r.per_kernel_sup[0], 0.4, 1e-15);
    EXPECT_EQ(r.per_kernel_sup[1], 0.05);
}

TEST(WeakCoercivity, Identity) {
    const Problem p = make_problem({}, std::nullopt, 21);
    const CoercivityReport r = check_weak_coercivity(p, 3, {1, 10, 100}, 0);
    for (const auto& ray : r.rays)
        for (std::size_t k = 0; k < ray.scales.size(); ++k) EXPECT_NEAR(ray.norms[k], ray.scales[k], 1e-12 * ray.scales[k]);
    EXPECT_TRUE(r.monotone_growth_observed);
    ASSERT_TRUE(r.lower_bound_certified);
    EXPECT_EQ(*r.lower_bound_certified, 1.0);
}

TEST(WeakCoercivity, ConstantKernelAlongConstantDirection) {
    const Problem p = make_problem({"0.5"});
    const CoercivityReport r = check_weak_coercivity(p, 1, {1, 10, 100}, 0);
    ASSERT_EQ(r.rays.size(), 1u);
    EXPECT_NEAR(r.rays[0].norms[0], 1.5, 1e-14);
    EXPECT_NEAR(r.rays[0].norms[1], 15, 1e-13);
    EXPECT_NEAR(r.rays[0].norms[2], 150, 1e-12);
    ASSERT_TRUE(r.lower_bound_certified);
    EXPECT_NEAR(*r.lower_bound_certified, 0.5, 1e-15);
    EXPECT_TRUE(r.lower_bound_respected.value_or(false));
}

TEST(WeakCoercivity, NonlinearHasNoCertificate) {
    const Problem p = make_problem({"0.2"}, "0.3*sin(u)", 21);
    const CoercivityReport r = check_weak_coercivity(p, 4, {1, 10, 100, 1000}, 9);
    EXPECT_FALSE(r.lower_bound_certified);
    EXPECT_EQ(r.rays.size(), 4u);
    EXPECT_TRUE(r.monotone_growth_observed);
    EXPECT_FALSE(r.note.empty());
}

TEST(NormSeparation, Examples) {
    const NormSeparationReport half = check_norm_separation(make_problem({"0.5"}));
    EXPECT_NEAR(half.norm_K_plus_C, 0.5, 1e-15);
    EXPECT_TRUE(half.pass);

    const NormSeparationReport one = check_norm_separation(make_problem({"1"}));
    EXPECT_NEAR(one.norm_K_plus_C, 1.0, 1e-12);
    EXPECT_FALSE(one.pass);

    const NormSeparationReport none = check_norm_separation(make_problem({}, std::nullopt, 11));
    EXPECT_EQ(none.norm_K_plus_C, 0.0);
    EXPECT_TRUE(none.pass);
    EXPECT_FALSE(none.split_norm_gap);
}

TEST(NormSeparation, SplitIntoTwoParts) {
    const NormSeparationReport r = check_norm_separation(make_problem({"0.4", "0.2"}));
    ASSERT_TRUE(r.norm_F && r.norm_C && r.split_norm_gap);
    EXPECT_NEAR(*r.norm_F, 1.4, 1e-14);
    EXPECT_NEAR(*r.norm_C, 0.2, 1e-14);
    EXPECT_NEAR(*r.split_norm_gap, 1.2, 1e-14);
}

TEST(Frechet, AffineKernel) {
    const Problem p = make_problem({}, "0.1*u");
    const GridFunction u = GridFunction::constant(p.grid(), 0.3), m = GridFunction::constant(p.grid(), 1.0);
    const FrechetReport r = check_frechet(p, u, m);
    for (double rem : r.remainders) EXPECT_LE(rem, 1e-14);
    EXPECT_TRUE(r.affine);
    EXPECT_TRUE(r.pass);
}

TEST(Frechet, SineAtZeroIsCubic) {
    const Problem p = make_problem({}, "0.25*sin(u)");
    const GridFunction u = GridFunction::constant(p.grid(), 0.0), m = GridFunction::constant(p.grid(), 1.0);
    const FrechetReport r = check_frechet(p, u, m);
    for (std::size_t k = 0; k < r.t_values.size(); ++k) {
        const double t = r.t_values[k];
        const double taylor = std::abs(0.25 * (std::sin(t) - t));
        // the smallest t sits at round-off level
        if (taylor > 1e-12) EXPECT_NEAR(r.remainders[k], taylor, 1e-3 * taylor + 1e-16);
    }
    EXPECT_TRUE(r.pass);
}

TEST(Frechet, SineAtGenericPointIsQuadratic) {
    const Problem p = make_problem({}, "0.25*sin(u)");
    const GridFunction u = GridFunction::constant(p.grid(), 0.7), m = GridFunction::constant(p.grid(), 1.0);
    const FrechetReport r = check_frechet(p, u, m);
    ASSERT_TRUE(r.estimated_order);
    EXPECT_NEAR(*r.estimated_order, 2.0, 0.1);
    EXPECT_NEAR(*r.estimated_order, oracle::log_log_slope(r.t_values, r.remainders), 1e-12);
    EXPECT_TRUE(r.pass);
}

TEST(Frechet, Errors) {
    const Problem linear = make_problem({"0.5"}, std::nullopt, 11);
    const GridFunction one = GridFunction::constant(linear.grid(), 1.0);
    EXPECT_THROW(check_frechet(linear, one, one), MissingHammerstein);
    const Problem p = make_problem({}, "sin(u)", 11);
    const GridFunction g = GridFunction::constant(p.grid(), 1.0);
    EXPECT_THROW(check_frechet(p, g, g, {1e-2, 1e-3}), InvalidArgument);
    EXPECT_THROW(check_frechet(p, g, g, {1e-3, 1e-2, 1e-4}), InvalidArgument);
    EXPECT_THROW(check_frechet(p, g, g, {1e-2, 1e-3, -1e-4}), InvalidArgument);
}

TEST(LaxMilgram, Examples) {
    EXPECT_EQ(check_lax_milgram(Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(7, 7)), 200, 1).min_rayleigh, 2.0);

    const Eigen::Matrix2d d = Eigen::Vector2d(1, 3).asDiagonal();
    const LaxMilgramReport r = check_lax_milgram(d, 1000, 2);
    EXPECT_GE(r.min_rayleigh, 1.0);
    EXPECT_LE(r.min_rayleigh, 3.0);
    EXPECT_LT(r.min_rayleigh, 1.01);

    Eigen::Matrix2d rot;
    rot << 0, -1, 1, 0;
    const LaxMilgramReport z = check_lax_milgram(rot, 100, 3);
    EXPECT_LE(z.min_rayleigh, 1e-12);
    EXPECT_FALSE(z.pass_for(1e-8));
}

TEST(FredholmIndex, Examples) {
    const IndexReport id = fredholm_index(Eigen::Matrix2d::Identity());
    EXPECT_EQ(id.rank, 2);
    EXPECT_EQ(id.dim_kernel, 0);
    EXPECT_EQ(id.codim_range, 0);
    EXPECT_EQ(id.index, 0);

    const IndexReport z = fredholm_index(Eigen::MatrixXd::Zero(2, 3));
    EXPECT_EQ(z.rank, 0);
    EXPECT_EQ(z.dim_kernel, 3);
    EXPECT_EQ(z.codim_range, 2);
    EXPECT_EQ(z.index, 1);

    std::mt19937_64 rng(4);
    EXPECT_EQ(fredholm_index(random_matrix(3, 2, rng)).index, -1);
}

TEST(FredholmIndex, RankMatchesConstruction) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const int m = 2 + t % 6, n = 2 + (t / 6) % 6, r = 1 + t % std::min(m, n);
        const Eigen::MatrixXd a = random_matrix(m, r, rng) * random_matrix(r, n, rng);
        const IndexReport rep = fredholm_index(a);
        EXPECT_EQ(rep.rank, r);
        EXPECT_EQ(rep.index, n - m);
    }
}

TEST(IndexStability, AllIndicesEqual) {
    std::mt19937_64 rng(12);
    for (auto kind : {PerturbationKind::finite_rank, PerturbationKind::small_norm}) {
        for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {2, 3}, {5, 5}}) {
            const IndexStabilityReport r = index_stability_trial(random_matrix(m, n, rng), kind, 1e-3, 100, 7);
            EXPECT_TRUE(r.all_indices_equal);
            EXPECT_EQ(r.index, n - m);
            EXPECT_EQ(r.trials, 100);
        }
    }
}

TEST(IndexStability, ZeroMatrixRankChanges) {
    const IndexStabilityReport r =
        index_stability_trial(Eigen::MatrixXd::Zero(2, 3), PerturbationKind::finite_rank, 1e-3, 20, 1);
    EXPECT_EQ(r.index, 1);
    EXPECT_TRUE(r.all_indices_equal);
    EXPECT_EQ(r.base_rank, 0);
    EXPECT_EQ(r.trials_with_rank_change, 20);
    EXPECT_TRUE(r.rank_unstable);
}

TEST(IndexStability, WellConditionedIsRankStable) {
    const IndexStabilityReport r =
        index_stability_trial(Eigen::MatrixXd::Identity(4, 4), PerturbationKind::small_norm, 1e-3, 50, 2);
    EXPECT_FALSE(r.rank_unstable);
    EXPECT_EQ(r.trials_with_rank_change, 0);
}
