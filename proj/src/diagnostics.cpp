#include "fredop/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fredop/errors.hpp"

namespace fredop {

namespace {

// Node indices used for sampling |h_u|: every node for grids up to 128
// points, otherwise an evenly strided subset that keeps the endpoints.
std::vector<Eigen::Index> hu_sample_nodes(Eigen::Index n) {
    constexpr Eigen::Index cap = 128;
    std::vector<Eigen::Index> idx;
    const Eigen::Index stride = std::max<Eigen::Index>(1, (n + cap - 1) / cap);
    for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

}  // namespace

ContractionReport check_contraction(const Problem& problem, double u_range) {
    if (!(u_range > 0.0)) throw InvalidArgument("u_range must be positive");
    const Grid& grid = problem.grid();
    const Eigen::Index n = grid.size();
    ContractionReport r;
    r.measure = grid.measure();
    r.u_range = u_range;

    const auto& kernels = problem.linear_kernels();
    r.per_kernel_sup.assign(kernels.size(), 0.0);
    if (!kernels.empty()) {
        Bindings b;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                bind_pair(grid, i, j, b);
                double total = 0.0;
                for (std::size_t k = 0; k < kernels.size(); ++k) {
                    const double v = evaluate(kernels[k], b);
                    r.per_kernel_sup[k] = std::max(r.per_kernel_sup[k], std::abs(v));
                    total += v;
                }
                r.kernel_sup_M = std::max(r.kernel_sup_M, std::abs(total));
            }
        }
    }
    r.contraction_constant_k = r.kernel_sup_M * r.measure;

    double hu_part = 0.0;
    if (const auto& hu = problem.hammerstein_derivative()) {
        double sup = 0.0;
        if (!hu->is_zero_constant()) {
            const auto idx = hu_sample_nodes(n);
            Bindings b;
            for (Eigen::Index i : idx) {
                for (Eigen::Index j : idx) {
                    bind_pair(grid, i, j, b);
                    for (int k = 0; k < kContractionUSamples; ++k) {
                        const double u = -u_range + 2.0 * u_range * k / (kContractionUSamples - 1);
                        b.set(Var::u, u);
                        sup = std::max(sup, std::abs(evaluate(*hu, b)));
                    }
                }
            }
        }
        r.hammerstein_hu_sup = sup;
        hu_part = sup * r.measure;
    }
    r.combined_estimate_kappa = (r.contraction_constant_k + hu_part) / std::abs(problem.identity_coefficient());
    r.is_contractive = r.combined_estimate_kappa < 1.0;
    return r;
}

CoercivityReport check_weak_coercivity(const Problem& problem, const std::vector<GridFunction>& directions,
                                       const std::vector<double>& scales) {
    if (scales.size() < 2) throw InvalidArgument("weak coercivity probe needs at least two scales");
    for (std::size_t i = 1; i < scales.size(); ++i) {
        if (!(scales[i] > scales[i - 1])) throw InvalidArgument("scales must be strictly increasing");
    }
    if (directions.empty()) throw InvalidArgument("weak coercivity probe needs at least one direction");

    const double a = std::abs(problem.identity_coefficient());
    const double norm_k = operator_sup_norm(problem.linear_sum());

    CoercivityReport r;
    if (!problem.has_hammerstein() && norm_k < a) r.lower_bound_certified = a - norm_k;

    bool monotone = true;
    bool respected = true;
    for (const auto& d : directions) {
        require_same_grid(problem.grid(), d);
        const double dn = sup_norm(d);
        if (dn == 0.0) throw InvalidArgument("probe direction must be non-zero");
        const Eigen::VectorXd unit = d.values() / dn;
        CoercivityRay ray;
        for (double s : scales) {
            const double norm = sup_norm(apply_f(problem, GridFunction(problem.grid(), s * unit)));
            ray.scales.push_back(s);
            ray.norms.push_back(norm);
            if (r.lower_bound_certified) {
                const double bound = *r.lower_bound_certified * std::abs(s);
                if (norm < bound * (1.0 - 1e-12)) respected = false;
            }
        }
        if (!(ray.norms.back() > ray.norms.front())) monotone = false;
        for (std::size_t i = 1; i < ray.norms.size(); ++i) {
            const double drop = ray.norms[i - 1] - ray.norms[i];
            if (drop > 1e-9 * std::max(1.0, std::abs(ray.norms[i - 1]))) monotone = false;
        }
        r.rays.push_back(std::move(ray));
    }
    r.monotone_growth_observed = monotone;
    if (r.lower_bound_certified) {
        r.lower_bound_respected = respected;
        r.note = "linear problem with ||K|| < |a|: ||f(u)|| >= (|a| - ||K||) ||u|| holds for every u";
    } else if (problem.has_hammerstein()) {
        r.note = "nonlinear problem: growth along rays is sampled evidence only, no lower bound is certified";
    } else {
        r.note = "||K|| >= |a|: the reverse-triangle bound | ||K|| - |a| | ||u|| is not implied pointwise; "
                 "growth along rays is sampled evidence only";
    }
    return r;
}

CoercivityReport check_weak_coercivity(const Problem& problem, int directions, const std::vector<double>& scales,
                                       std::uint64_t seed) {
    if (directions < 1) throw InvalidArgument("directions must be positive");
    const Grid& grid = problem.grid();
    std::vector<GridFunction> dirs;
    dirs.push_back(GridFunction::constant(grid, 1.0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    while (static_cast<int>(dirs.size()) < directions) {
        Eigen::VectorXd v(grid.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng);
        const double norm = sup_norm(v);
        if (norm == 0.0) continue;
        dirs.emplace_back(grid, v / norm);
    }
    return check_weak_coercivity(problem, dirs, scales);
}

NormSeparationReport check_norm_separation(const Problem& problem) {
    NormSeparationReport r;
    r.norm_K_plus_C = operator_sup_norm(problem.linear_sum());
    r.distance_from_1 = std::abs(r.norm_K_plus_C - 1.0);
    r.pass = r.distance_from_1 > kNormSeparationBand;

    const auto& mats = problem.linear_matrices();
    if (mats.size() >= 2) {
        Eigen::MatrixXd f = mats.front().entries;
        f.diagonal().array() += problem.identity_coefficient();
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(f.rows(), f.cols());
        for (std::size_t k = 1; k < mats.size(); ++k) c += mats[k].entries;
        r.norm_F = induced_sup_norm(f);
        r.norm_C = induced_sup_norm(c);
        r.split_norm_gap = std::abs(*r.norm_F - *r.norm_C);
    }
    return r;
}

FrechetReport check_frechet(const Problem& problem, const GridFunction& u, const GridFunction& m,
                            const std::vector<double>& t_values) {
    if (!problem.has_hammerstein()) throw MissingHammerstein();
    if (t_values.size() < 3) throw InvalidArgument("Frechet check needs at least three step sizes");
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(t_values[i] > 0.0) || (i > 0 && !(t_values[i] < t_values[i - 1]))) {
            throw InvalidArgument("step sizes must be positive and strictly decreasing");
        }
    }
    const Grid& grid = problem.grid();
    require_same_grid(grid, u);
    require_same_grid(grid, m);

    const Eigen::VectorXd cu = problem.hammerstein(u).values();
    const Eigen::VectorXd jm = problem.hammerstein_jacobian(u).entries * m.values();

    FrechetReport r;
    r.t_values = t_values;
    for (double t : t_values) {
        const GridFunction shifted(grid, u.values() + t * m.values());
        const Eigen::VectorXd rem = problem.hammerstein(shifted).values() - cu - t * jm;
        r.remainders.push_back(sup_norm(rem));
    }

    const double worst = *std::max_element(r.remainders.begin(), r.remainders.end());
    if (worst <= kAffineRemainder) {
        r.affine = true;
        r.pass = true;
        return r;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(r.remainders[i] > 0.0)) continue;
        const double x = std::log(t_values[i]);
        const double y = std::log(r.remainders[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        r.estimated_order = (count * sxy - sx * sy) / denom;
        r.pass = *r.estimated_order >= kFrechetMinOrder;
    }
    return r;
}

IndexStabilityReport index_stability_trial(const Eigen::MatrixXd& s, PerturbationKind kind, double magnitude,
                                           int trials, std::uint64_t seed) {
    if (!(magnitude > 0.0)) throw InvalidArgument("perturbation magnitude must be positive");
    if (trials < 1) throw InvalidArgument("trials must be positive");
    const IndexReport base = fredholm_index(s);

    IndexStabilityReport r;
    r.index = base.index;
    r.trials = trials;
    r.base_rank = base.rank;
    r.all_indices_equal = true;

    // Weyl: a perturbation of spectral norm `magnitude` moves each singular
    // value by at most `magnitude`.
    std::vector<double> sv = base.singular_values;
    sv.resize(static_cast<std::size_t>(std::min(s.rows(), s.cols())), 0.0);
    for (double sigma : sv) {
        if (std::abs(sigma - base.sv_threshold_used) <= magnitude) r.rank_unstable = true;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd g(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
        return g;
    };

    for (int t = 0; t < trials; ++t) {
        Eigen::MatrixXd e;
        if (kind == PerturbationKind::finite_rank) {
            Eigen::VectorXd a = random_matrix(s.rows(), 1);
            Eigen::VectorXd b = random_matrix(s.cols(), 1);
            e = magnitude * (a / a.norm()) * (b / b.norm()).transpose();
        } else {
            e = random_matrix(s.rows(), s.cols());
            const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()[0];
            e *= magnitude / sigma;
        }
        const IndexReport perturbed = fredholm_index(s + e);
        if (perturbed.index != base.index) r.all_indices_equal = false;
        if (perturbed.rank != base.rank) ++r.trials_with_rank_change;
    }
    if (r.trials_with_rank_change > 0) r.rank_unstable = true;
    return r;
}

}  // namespace fredop
