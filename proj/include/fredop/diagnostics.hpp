#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "fredop/operators.hpp"

namespace fredop {

// ---------------------------------------------------------------------------
// Contraction

struct ContractionReport {
    double kernel_sup_M = 0.0;  // max |sum of linear kernels| over node pairs
    std::vector<double> per_kernel_sup;
    double measure = 0.0;
    double contraction_constant_k = 0.0;  // kernel_sup_M * measure
    std::optional<double> hammerstein_hu_sup;
    double u_range = 0.0;
    /// (k + hu_sup * measure) / |identity coefficient|
    double combined_estimate_kappa = 0.0;
    bool is_contractive = false;
};

inline constexpr int kContractionUSamples = 101;
inline constexpr double kDefaultURange = 10.0;

/// Samples |k| over every node pair and |h_u| over node pairs x 101 values of
/// u in [-u_range, u_range]. An estimate, not a certificate.
ContractionReport check_contraction(const Problem& problem, double u_range = kDefaultURange);

// ---------------------------------------------------------------------------
// Weak coercivity

struct CoercivityRay {
    std::vector<double> scales;
    std::vector<double> norms;  // ||f(scale * direction)||
};

struct CoercivityReport {
    std::vector<CoercivityRay> rays;
    /// c in ||f(u)|| >= c ||u||; only when the problem is linear and
    /// ||K|| < |a|.
    std::optional<double> lower_bound_certified;
    std::optional<bool> lower_bound_respected;
    bool monotone_growth_observed = false;
    std::string note;
};

/// The first probe direction is the constant 1; the remaining `directions - 1`
/// are seeded uniform samples normalised to unit sup-norm.
CoercivityReport check_weak_coercivity(const Problem& problem, int directions, const std::vector<double>& scales,
                                       std::uint64_t seed);

/// Same, along caller-supplied directions (normalised to unit sup-norm).
CoercivityReport check_weak_coercivity(const Problem& problem, const std::vector<GridFunction>& directions,
                                       const std::vector<double>& scales);

// ---------------------------------------------------------------------------
// Norm separation

inline constexpr double kNormSeparationBand = 1e-8;

struct NormSeparationReport {
    double norm_K_plus_C = 0.0;
    double distance_from_1 = 0.0;
    /// With two or more kernels: F = aI + (first kernel), C = the rest.
    std::optional<double> norm_F;
    std::optional<double> norm_C;
    std::optional<double> split_norm_gap;
    bool pass = false;
};

NormSeparationReport check_norm_separation(const Problem& problem);

// ---------------------------------------------------------------------------
// Fréchet derivative

struct FrechetReport {
    std::vector<double> t_values;
    std::vector<double> remainders;
    /// Least-squares slope of log(remainder) against log(t); absent when every
    /// remainder is at round-off level.
    std::optional<double> estimated_order;
    bool affine = false;
    bool pass = false;
};

inline constexpr double kFrechetMinOrder = 1.5;
inline constexpr double kAffineRemainder = 1e-13;

/// remainder(t) = ||C(u + t m) - C(u) - t C'(u) m||. Throws MissingHammerstein
/// and InvalidArgument for fewer than 3 or non-decreasing t values.
FrechetReport check_frechet(const Problem& problem, const GridFunction& u, const GridFunction& m,
                            const std::vector<double>& t_values = {1e-2, 1e-3, 1e-4});

// ---------------------------------------------------------------------------
// Lax-Milgram

struct LaxMilgramReport {
    double min_rayleigh = 0.0;
    int trials = 0;
    bool pass_for(double c) const noexcept { return min_rayleigh >= c; }
};

/// min over seeded random unit vectors of |u^T A u| / u^T u. Sampled, so it
/// can only falsify coercivity, never certify it.
template <typename Derived>
LaxMilgramReport check_lax_milgram(const Eigen::MatrixBase<Derived>& a, int trials, std::uint64_t seed) {
    using Scalar = typename Derived::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (a.rows() != a.cols()) throw InvalidArgument("Lax-Milgram check needs a square matrix");
    if (trials < 1) throw InvalidArgument("trials must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    LaxMilgramReport report;
    report.trials = trials;
    report.min_rayleigh = std::numeric_limits<double>::infinity();
    Vector u(a.rows());
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = Scalar(normal(rng));
        const Scalar uu = u.dot(u);
        if (uu == Scalar(0)) continue;
        const Vector au = a * u;
        const double q = static_cast<double>(std::abs(u.dot(au)) / uu);
        report.min_rayleigh = std::min(report.min_rayleigh, q);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Fredholm index

inline constexpr double kSingularValueThreshold = 1e-10;

struct IndexReport {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index rank = 0;
    Eigen::Index dim_kernel = 0;
    Eigen::Index codim_range = 0;
    Eigen::Index index = 0;
    double sv_threshold_used = 0.0;
    std::vector<double> singular_values;
};

/// Rank from singular values above tau * sigma_max; index = dim ker - codim R.
template <typename Derived>
IndexReport fredholm_index(const Eigen::MatrixBase<Derived>& a, double tau = kSingularValueThreshold) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (a.rows() == 0 || a.cols() == 0) throw InvalidArgument("fredholm_index needs a non-empty matrix");
    IndexReport r;
    r.rows = a.rows();
    r.cols = a.cols();
    const Eigen::JacobiSVD<Matrix> svd(a.eval());
    const auto& sv = svd.singularValues();
    const double sigma_max = sv.size() ? static_cast<double>(sv[0]) : 0.0;
    r.sv_threshold_used = tau * sigma_max;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double s = static_cast<double>(sv[i]);
        r.singular_values.push_back(s);
        if (sigma_max > 0.0 && s > r.sv_threshold_used) ++r.rank;
    }
    r.dim_kernel = r.cols - r.rank;
    r.codim_range = r.rows - r.rank;
    r.index = r.dim_kernel - r.codim_range;
    return r;
}

enum class PerturbationKind { finite_rank, small_norm };

struct IndexStabilityReport {
    Eigen::Index index = 0;
    bool all_indices_equal = false;
    int trials = 0;
    Eigen::Index base_rank = 0;
    int trials_with_rank_change = 0;
    /// A singular value of S lies within `magnitude` of the rank threshold, or
    /// some trial changed the rank.
    bool rank_unstable = false;
};

/// Perturbations have spectral norm exactly `magnitude`: finite_rank draws a
/// random rank-one a b^T, small_norm a random dense matrix.
IndexStabilityReport index_stability_trial(const Eigen::MatrixXd& s, PerturbationKind kind, double magnitude,
                                           int trials, std::uint64_t seed);

}  // namespace fredop
