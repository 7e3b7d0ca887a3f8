#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fredop/expr.hpp"
#include "fredop/grid.hpp"
#include "fredop/linalg.hpp"

namespace fredop {

/// Dense realisation of a linear integral operator (or a Jacobian) on a grid:
/// entries(i, j) = w_j k(x_i, x_j).
struct NystromMatrix {
    GridTag tag;
    Eigen::MatrixXd entries;

    GridFunction apply(const GridFunction& u) const;
};

/// Bind the coordinates of node `i` as x and node `j` as y.
void bind_pair(const Grid& grid, Eigen::Index i, Eigen::Index j, Bindings& b);
/// Bind the coordinates of node `i` as x only.
void bind_point(const Grid& grid, Eigen::Index i, Bindings& b);

/// Samples an expression in x1/x2 at every node.
GridFunction sample(const Grid& grid, const Expr& expr);

/// Throws KernelUsesU if `kernel` mentions u.
NystromMatrix assemble_linear(const Grid& grid, const Expr& kernel);

/// (Cu)_i = sum_j w_j h(x_i, y_j, u_j).
GridFunction apply_hammerstein(const Grid& grid, const Expr& h, const GridFunction& u);

/// entries(i, j) = w_j h_u(x_i, y_j, u_j), where `h_u` is already the
/// derivative expression.
NystromMatrix hammerstein_jacobian_from_derivative(const Grid& grid, const Expr& h_u, const GridFunction& u);

/// Differentiates `h` symbolically, then assembles the Jacobian.
NystromMatrix hammerstein_jacobian(const Grid& grid, const Expr& h, const GridFunction& u);

inline double operator_sup_norm(const NystromMatrix& m) { return induced_sup_norm(m.entries); }

/// Solve against a Nyström matrix; see fredop::linear_solve for the checks.
Eigen::VectorXd linear_solve(const NystromMatrix& matrix, const Eigen::VectorXd& rhs);

/// Largest |h_u(x, y, u) - override(x, y, u)| over the sample set used for the
/// derivative cross-check.
inline constexpr double kDerivativeCrossCheckTolerance = 1e-8;

struct ProblemSpec {
    DomainSpec domain;
    QuadratureRule rule = QuadratureRule::trapezoid;
    int nodes_per_dim = 0;  // 0 picks the per-dimension default
    std::vector<Expr> linear_kernels;
    std::optional<Expr> hammerstein_kernel;
    std::optional<Expr> hammerstein_derivative;
    double identity_coefficient = 1.0;
};

/// f(u) = a u + sum_k K_k u + C(u) on a fixed grid. Linear kernels are
/// assembled once at construction.
class Problem {
public:
    /// Throws KernelUsesU, InvalidDomain, MissingBinding (kernel references a
    /// coordinate the domain lacks) or DerivativeMismatch when an explicit h_u
    /// disagrees with the symbolic derivative.
    explicit Problem(const ProblemSpec& spec);

    const Grid& grid() const noexcept { return grid_; }
    const DomainSpec& domain() const noexcept { return grid_.domain(); }
    double identity_coefficient() const noexcept { return identity_coefficient_; }

    const std::vector<Expr>& linear_kernels() const noexcept { return linear_kernels_; }
    const std::vector<NystromMatrix>& linear_matrices() const noexcept { return linear_matrices_; }
    /// Sum of the linear Nyström matrices (zero matrix when there are none).
    const NystromMatrix& linear_sum() const noexcept { return linear_sum_; }

    bool has_hammerstein() const noexcept { return hammerstein_.has_value(); }
    const std::optional<Expr>& hammerstein_kernel() const noexcept { return hammerstein_; }
    /// h_u: the explicit override when given, otherwise the symbolic derivative.
    const std::optional<Expr>& hammerstein_derivative() const noexcept { return hammerstein_u_; }
    /// Max discrepancy between the override and the symbolic derivative.
    std::optional<double> derivative_cross_check() const noexcept { return cross_check_; }

    GridFunction hammerstein(const GridFunction& u) const;
    /// C'(u) as a matrix (zero when there is no Hammerstein kernel).
    NystromMatrix hammerstein_jacobian(const GridFunction& u) const;
    /// f'(u) = a I + K + C'(u).
    NystromMatrix jacobian(const GridFunction& u) const;

private:
    Grid grid_;
    double identity_coefficient_;
    std::vector<Expr> linear_kernels_;
    std::vector<NystromMatrix> linear_matrices_;
    NystromMatrix linear_sum_;
    std::optional<Expr> hammerstein_;
    std::optional<Expr> hammerstein_u_;
    std::optional<double> cross_check_;
};

GridFunction apply_f(const Problem& problem, const GridFunction& u);

}  // namespace fredop
