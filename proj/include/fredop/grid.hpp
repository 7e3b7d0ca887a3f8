#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fredop {

struct Interval {
    double lo;
    double hi;
};

/// Axis-aligned box Ω, one or two intervals.
struct DomainSpec {
    std::vector<Interval> intervals;
};

enum class QuadratureRule { trapezoid, gauss_legendre };

std::string_view rule_name(QuadratureRule rule) noexcept;
/// Accepts "trapezoid" and "gauss-legendre"; throws InvalidDomain otherwise.
QuadratureRule parse_rule(std::string_view name);

inline constexpr int kDefaultNodes1D = 201;
inline constexpr int kDefaultNodes2D = 41;

/// Opaque identity token shared by a grid and every function built on it.
struct GridTag {
    std::uint64_t id = 0;
    friend bool operator==(GridTag, GridTag) = default;
};

/// Quadrature nodes and positive weights realising ∫_Ω on a box.
class Grid {
public:
    /// 2-D grids are the row-major tensor product of the 1-D rules: node
    /// (i, j) has index i * m + j with x1 from the first interval.
    static Grid build(const DomainSpec& domain, QuadratureRule rule, int nodes_per_dim);

    GridTag tag() const noexcept { return tag_; }
    int dimension() const noexcept { return static_cast<int>(nodes_.cols()); }
    Eigen::Index size() const noexcept { return weights_.size(); }
    /// size() x dimension()
    const Eigen::MatrixXd& nodes() const noexcept { return nodes_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    double measure() const noexcept { return measure_; }
    QuadratureRule rule() const noexcept { return rule_; }
    int nodes_per_dim() const noexcept { return nodes_per_dim_; }
    const DomainSpec& domain() const noexcept { return domain_; }

private:
    Grid() = default;

    DomainSpec domain_;
    Eigen::MatrixXd nodes_;
    Eigen::VectorXd weights_;
    double measure_ = 0.0;
    QuadratureRule rule_ = QuadratureRule::trapezoid;
    int nodes_per_dim_ = 0;
    GridTag tag_;
};

inline Grid build_grid(const DomainSpec& domain, QuadratureRule rule, int nodes_per_dim) {
    return Grid::build(domain, rule, nodes_per_dim);
}

/// One-dimensional rule on [lo, hi]: nodes and weights.
struct Rule1D {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
Rule1D trapezoid_rule(double lo, double hi, int m);
Rule1D gauss_legendre_rule(double lo, double hi, int m);

/// An element of C(Ω) sampled at the grid nodes.
class GridFunction {
public:
    /// Throws NumericDomainError if any value is not finite, EmptyFunction if
    /// `values` is empty.
    GridFunction(GridTag tag, Eigen::VectorXd values);
    GridFunction(const Grid& grid, Eigen::VectorXd values);

    static GridFunction constant(const Grid& grid, double value);

    GridTag tag() const noexcept { return tag_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

private:
    GridTag tag_;
    Eigen::VectorXd values_;
};

/// Throws GridMismatch unless `f` lives on `grid`.
void require_same_grid(const Grid& grid, const GridFunction& f);
void require_same_grid(const GridFunction& f, const GridFunction& g);

double integrate(const Grid& grid, const GridFunction& f);

double sup_norm(const GridFunction& f);

template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
}

double sup_distance(const GridFunction& f, const GridFunction& g);

}  // namespace fredop
