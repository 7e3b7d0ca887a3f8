#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fredop/errors.hpp"

namespace fredop {

/// Induced operator norm for the max-norm: the largest absolute row sum.
template <typename Derived>
typename Derived::RealScalar induced_sup_norm(const Eigen::MatrixBase<Derived>& a) {
    using Real = typename Derived::RealScalar;
    if (a.rows() == 0 || a.cols() == 0) return Real(0);
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Pivots below this fraction of the largest initial |entry| count as zero.
inline constexpr double kPivotTolerance = 1e-14;

/// Dense LU factorisation with row partial pivoting, PA = LU, stored in place.
template <typename Scalar>
class PartialPivotLU {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Real = typename Eigen::NumTraits<Scalar>::Real;

    /// Throws SingularMatrix when a pivot falls below
    /// kPivotTolerance * max|a_ij|.
    template <typename Derived>
    explicit PartialPivotLU(const Eigen::MatrixBase<Derived>& a, Real relative_tolerance = Real(kPivotTolerance))
        : lu_(a), perm_(static_cast<std::size_t>(a.rows())) {
        if (a.rows() != a.cols()) throw SingularMatrix("matrix is not square");
        const Eigen::Index n = lu_.rows();
        for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
        if (n == 0) return;

        const Real scale = lu_.cwiseAbs().maxCoeff();
        threshold_ = relative_tolerance * scale;
        min_pivot_ = std::numeric_limits<Real>::infinity();

        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::Index p = k;
            Real best = std::abs(lu_(k, k));
            for (Eigen::Index i = k + 1; i < n; ++i) {
                const Real v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            min_pivot_ = std::min(min_pivot_, best);
            if (!(best > threshold_) || best == Real(0)) {
                throw SingularMatrix("pivot " + std::to_string(static_cast<double>(best)) + " in column " +
                                     std::to_string(k) + " is below " +
                                     std::to_string(static_cast<double>(threshold_)));
            }
            if (p != k) {
                lu_.row(k).swap(lu_.row(p));
                std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
            }
            const Eigen::Index rest = n - k - 1;
            if (rest == 0) continue;
            lu_.col(k).tail(rest) /= lu_(k, k);
            lu_.bottomRightCorner(rest, rest).noalias() -= lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
        }
    }

    Eigen::Index size() const noexcept { return lu_.rows(); }
    Real min_pivot() const noexcept { return min_pivot_; }
    Real threshold() const noexcept { return threshold_; }

    template <typename Derived>
    Vector solve(const Eigen::MatrixBase<Derived>& b) const {
        const Eigen::Index n = lu_.rows();
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = b[perm_[static_cast<std::size_t>(i)]];
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar s = x[i];
            for (Eigen::Index j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            Scalar s = x[i];
            for (Eigen::Index j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

private:
    Matrix lu_;
    std::vector<Eigen::Index> perm_;
    Real threshold_ = Real(0);
    Real min_pivot_ = Real(0);
};

/// Solves Ax = b and verifies ||Ax - b||_inf <= 1e-10 (1 + ||b||_inf).
/// Throws SingularMatrix on a small pivot or a failed residual check.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> linear_solve(const Eigen::MatrixBase<DerivedA>& a,
                                                                         const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != a.cols()) throw SingularMatrix("matrix is not square");
    if (b.size() != a.rows()) throw SingularMatrix("right-hand side has the wrong length");
    const PartialPivotLU<Scalar> lu(a);
    auto x = lu.solve(b);
    const double b_norm = b.size() ? static_cast<double>(b.cwiseAbs().maxCoeff()) : 0.0;
    const double residual = b.size() ? static_cast<double>((a * x - b).cwiseAbs().maxCoeff()) : 0.0;
    if (!(residual <= 1e-10 * (1.0 + b_norm))) {
        throw SingularMatrix("residual check failed: ||Ax-b|| = " + std::to_string(residual));
    }
    return x;
}

/// True when the pivot test in PartialPivotLU passes.
template <typename Derived>
bool is_nonsingular(const Eigen::MatrixBase<Derived>& a) {
    try {
        PartialPivotLU<typename Derived::Scalar> lu(a);
        return true;
    } catch (const SingularMatrix&) {
        return false;
    }
}

}  // namespace fredop
