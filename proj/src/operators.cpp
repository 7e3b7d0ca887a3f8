#include "fredop/operators.hpp"

#include <algorithm>
#include <cmath>

#include "fredop/errors.hpp"

namespace fredop {

void bind_point(const Grid& grid, Eigen::Index i, Bindings& b) {
    const auto& nodes = grid.nodes();
    b.set(Var::x1, nodes(i, 0));
    if (nodes.cols() > 1) b.set(Var::x2, nodes(i, 1));
}

void bind_pair(const Grid& grid, Eigen::Index i, Eigen::Index j, Bindings& b) {
    const auto& nodes = grid.nodes();
    b.set(Var::x1, nodes(i, 0));
    b.set(Var::y1, nodes(j, 0));
    if (nodes.cols() > 1) {
        b.set(Var::x2, nodes(i, 1));
        b.set(Var::y2, nodes(j, 1));
    }
}

namespace {

void require_dimension(const Grid& grid, const Expr& e, const char* what) {
    if (grid.dimension() < 2 && (e.depends_on(Var::x2) || e.depends_on(Var::y2))) {
        throw MissingBinding(std::string(what) + " uses x2/y2 on a one-dimensional domain");
    }
}

}  // namespace

GridFunction NystromMatrix::apply(const GridFunction& u) const {
    if (u.tag() != tag || u.size() != entries.cols()) throw GridMismatch();
    return GridFunction(tag, entries * u.values());
}

GridFunction sample(const Grid& grid, const Expr& expr) {
    if (expr.depends_on(Var::y1) || expr.depends_on(Var::y2) || expr.depends_on_u()) {
        throw MissingBinding("a function of x may only use x1/x2");
    }
    Eigen::VectorXd values(grid.size());
    Bindings b;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        bind_point(grid, i, b);
        values[i] = evaluate(expr, b);
    }
    return GridFunction(grid, std::move(values));
}

NystromMatrix assemble_linear(const Grid& grid, const Expr& kernel) {
    if (kernel.depends_on_u()) throw KernelUsesU();
    require_dimension(grid, kernel, "kernel");
    const Eigen::Index n = grid.size();
    const auto& w = grid.weights();
    NystromMatrix m{grid.tag(), Eigen::MatrixXd(n, n)};
    Bindings b;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            bind_pair(grid, i, j, b);
            m.entries(i, j) = w[j] * evaluate(kernel, b);
        }
    }
    return m;
}

GridFunction apply_hammerstein(const Grid& grid, const Expr& h, const GridFunction& u) {
    require_same_grid(grid, u);
    require_dimension(grid, h, "Hammerstein kernel");
    const Eigen::Index n = grid.size();
    const auto& w = grid.weights();
    Eigen::VectorXd out(n);
    Bindings b;
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            bind_pair(grid, i, j, b);
            b.set(Var::u, u[j]);
            acc += w[j] * evaluate(h, b);
        }
        out[i] = acc;
    }
    return GridFunction(grid, std::move(out));
}

NystromMatrix hammerstein_jacobian_from_derivative(const Grid& grid, const Expr& h_u, const GridFunction& u) {
    require_same_grid(grid, u);
    require_dimension(grid, h_u, "Hammerstein derivative");
    const Eigen::Index n = grid.size();
    const auto& w = grid.weights();
    NystromMatrix m{grid.tag(), Eigen::MatrixXd::Zero(n, n)};
    if (h_u.is_zero_constant()) return m;
    Bindings b;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            bind_pair(grid, i, j, b);
            b.set(Var::u, u[j]);
            m.entries(i, j) = w[j] * evaluate(h_u, b);
        }
    }
    return m;
}

NystromMatrix hammerstein_jacobian(const Grid& grid, const Expr& h, const GridFunction& u) {
    return hammerstein_jacobian_from_derivative(grid, differentiate_u(h), u);
}

Eigen::VectorXd linear_solve(const NystromMatrix& matrix, const Eigen::VectorXd& rhs) {
    return fredop::linear_solve(matrix.entries, rhs);
}

namespace {

// Every stride-th node, at most `cap` of them, always including the last.
std::vector<Eigen::Index> subsample(Eigen::Index n, Eigen::Index cap) {
    std::vector<Eigen::Index> idx;
    const Eigen::Index stride = std::max<Eigen::Index>(1, (n + cap - 1) / cap);
    for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

double max_derivative_discrepancy(const Grid& grid, const Expr& symbolic, const Expr& given) {
    const auto idx = subsample(grid.size(), 64);
    double worst = 0.0;
    Bindings b;
    for (Eigen::Index i : idx) {
        for (Eigen::Index j : idx) {
            bind_pair(grid, i, j, b);
            for (int k = 0; k <= 20; ++k) {
                b.set(Var::u, -10.0 + k);
                try {
                    worst = std::max(worst, std::abs(evaluate(symbolic, b) - evaluate(given, b)));
                } catch (const NumericDomainError&) {
                    // outside the kernel's domain; skip the sample
                }
            }
        }
    }
    return worst;
}

}  // namespace

Problem::Problem(const ProblemSpec& spec)
    : grid_(Grid::build(spec.domain, spec.rule,
                        spec.nodes_per_dim > 0 ? spec.nodes_per_dim
                                               : (spec.domain.intervals.size() > 1 ? kDefaultNodes2D
                                                                                   : kDefaultNodes1D))),
      identity_coefficient_(spec.identity_coefficient),
      linear_kernels_(spec.linear_kernels),
      linear_sum_{grid_.tag(), Eigen::MatrixXd::Zero(grid_.size(), grid_.size())},
      hammerstein_(spec.hammerstein_kernel) {
    if (identity_coefficient_ == 0.0 || !std::isfinite(identity_coefficient_)) {
        throw InvalidArgument("identity coefficient must be finite and non-zero");
    }
    for (const auto& k : linear_kernels_) {
        linear_matrices_.push_back(assemble_linear(grid_, k));
        linear_sum_.entries += linear_matrices_.back().entries;
    }
    if (spec.hammerstein_derivative && !hammerstein_) {
        throw MissingHammerstein();
    }
    if (hammerstein_) {
        require_dimension(grid_, *hammerstein_, "Hammerstein kernel");
        const Expr symbolic = differentiate_u(*hammerstein_);
        if (spec.hammerstein_derivative) {
            require_dimension(grid_, *spec.hammerstein_derivative, "Hammerstein derivative");
            cross_check_ = max_derivative_discrepancy(grid_, symbolic, *spec.hammerstein_derivative);
            if (!(*cross_check_ <= kDerivativeCrossCheckTolerance)) {
                throw DerivativeMismatch("explicit h_u differs from the symbolic derivative by " +
                                         std::to_string(*cross_check_));
            }
            hammerstein_u_ = spec.hammerstein_derivative;
        } else {
            hammerstein_u_ = symbolic;
        }
    }
}

GridFunction Problem::hammerstein(const GridFunction& u) const {
    if (!hammerstein_) {
        require_same_grid(grid_, u);
        return GridFunction::constant(grid_, 0.0);
    }
    return apply_hammerstein(grid_, *hammerstein_, u);
}

NystromMatrix Problem::hammerstein_jacobian(const GridFunction& u) const {
    if (!hammerstein_u_) {
        require_same_grid(grid_, u);
        return NystromMatrix{grid_.tag(), Eigen::MatrixXd::Zero(grid_.size(), grid_.size())};
    }
    return hammerstein_jacobian_from_derivative(grid_, *hammerstein_u_, u);
}

NystromMatrix Problem::jacobian(const GridFunction& u) const {
    NystromMatrix j = hammerstein_jacobian(u);
    j.entries += linear_sum_.entries;
    j.entries.diagonal().array() += identity_coefficient_;
    return j;
}

GridFunction apply_f(const Problem& problem, const GridFunction& u) {
    require_same_grid(problem.grid(), u);
    Eigen::VectorXd out = problem.identity_coefficient() * u.values();
    if (!problem.linear_kernels().empty()) out.noalias() += problem.linear_sum().entries * u.values();
    if (problem.has_hammerstein()) out += problem.hammerstein(u).values();
    return GridFunction(problem.grid(), std::move(out));
}

}  // namespace fredop
