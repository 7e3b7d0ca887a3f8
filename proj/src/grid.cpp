#include "fredop/grid.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "fredop/errors.hpp"

namespace fredop {

namespace {

GridTag next_tag() {
    static std::atomic<std::uint64_t> counter{0};
    return GridTag{++counter};
}

}  // namespace

std::string_view rule_name(QuadratureRule rule) noexcept {
    return rule == QuadratureRule::trapezoid ? "trapezoid" : "gauss-legendre";
}

QuadratureRule parse_rule(std::string_view name) {
    if (name == "trapezoid") return QuadratureRule::trapezoid;
    if (name == "gauss-legendre") return QuadratureRule::gauss_legendre;
    throw InvalidDomain("unknown quadrature rule '" + std::string(name) + "'");
}

Rule1D trapezoid_rule(double lo, double hi, int m) {
    Rule1D r{Eigen::VectorXd(m), Eigen::VectorXd(m)};
    const double h = (hi - lo) / (m - 1);
    for (int i = 0; i < m; ++i) {
        r.nodes[i] = i == m - 1 ? hi : lo + i * h;
        r.weights[i] = (i == 0 || i == m - 1) ? 0.5 * h : h;
    }
    return r;
}

// Newton iteration on P_m from the Chebyshev-like initial guesses, using the
// three-term recurrence for P_m and its derivative.
Rule1D gauss_legendre_rule(double lo, double hi, int m) {
    Rule1D r{Eigen::VectorXd(m), Eigen::VectorXd(m)};
    const double mid = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);
    const int roots = (m + 1) / 2;
    for (int i = 0; i < roots; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) <= 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.nodes[i] = mid - half * z;
        r.nodes[m - 1 - i] = mid + half * z;
        r.weights[i] = half * w;
        r.weights[m - 1 - i] = half * w;
    }
    return r;
}

Grid Grid::build(const DomainSpec& domain, QuadratureRule rule, int nodes_per_dim) {
    if (domain.intervals.empty()) throw InvalidDomain("domain has no intervals");
    if (domain.intervals.size() > 2) {
        throw UnsupportedDimension("domains of dimension " + std::to_string(domain.intervals.size()) +
                                   " are not supported (max 2)");
    }
    for (const auto& iv : domain.intervals) {
        if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw InvalidDomain("interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                                "] is empty or unbounded");
        }
    }
    if (nodes_per_dim < 2) throw InvalidArgument("nodes_per_dim must be at least 2");

    std::vector<Rule1D> rules;
    for (const auto& iv : domain.intervals) {
        rules.push_back(rule == QuadratureRule::trapezoid ? trapezoid_rule(iv.lo, iv.hi, nodes_per_dim)
                                                          : gauss_legendre_rule(iv.lo, iv.hi, nodes_per_dim));
    }

    Grid g;
    g.domain_ = domain;
    g.rule_ = rule;
    g.nodes_per_dim_ = nodes_per_dim;
    g.tag_ = next_tag();
    g.measure_ = 1.0;
    for (const auto& iv : domain.intervals) g.measure_ *= iv.hi - iv.lo;

    const Eigen::Index m = nodes_per_dim;
    if (rules.size() == 1) {
        g.nodes_ = rules[0].nodes;
        g.weights_ = rules[0].weights;
    } else {
        g.nodes_.resize(m * m, 2);
        g.weights_.resize(m * m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const Eigen::Index k = i * m + j;
                g.nodes_(k, 0) = rules[0].nodes[i];
                g.nodes_(k, 1) = rules[1].nodes[j];
                g.weights_[k] = rules[0].weights[i] * rules[1].weights[j];
            }
        }
    }
    return g;
}

GridFunction::GridFunction(GridTag tag, Eigen::VectorXd values) : tag_(tag), values_(std::move(values)) {
    if (values_.size() == 0) throw EmptyFunction();
    if (!values_.allFinite()) throw NumericDomainError("grid function has non-finite values");
}

GridFunction::GridFunction(const Grid& grid, Eigen::VectorXd values) : GridFunction(grid.tag(), std::move(values)) {
    if (values_.size() != grid.size()) throw GridMismatch();
}

GridFunction GridFunction::constant(const Grid& grid, double value) {
    return GridFunction(grid, Eigen::VectorXd::Constant(grid.size(), value));
}

void require_same_grid(const Grid& grid, const GridFunction& f) {
    if (f.tag() != grid.tag() || f.size() != grid.size()) throw GridMismatch();
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.tag() != g.tag() || f.size() != g.size()) throw GridMismatch();
}

double integrate(const Grid& grid, const GridFunction& f) {
    require_same_grid(grid, f);
    // Neumaier-compensated, so that constants integrate to the measure without drift
    double sum = 0.0, carry = 0.0;
    const auto& w = grid.weights();
    const auto& v = f.values();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double term = w[i] * v[i];
        const double t = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + carry;
}

double sup_norm(const GridFunction& f) {
    if (f.size() == 0) throw EmptyFunction();
    return sup_norm(f.values());
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    return sup_norm((f.values() - g.values()).eval());
}

}  // namespace fredop
