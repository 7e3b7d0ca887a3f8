#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fredop/diagnostics.hpp"
#include "fredop/operators.hpp"

namespace fredop {

enum class SolveMethod { picard, newton };

std::string_view method_name(SolveMethod m) noexcept;

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 500;
    bool fd_validation = true;  // newton only
    std::uint64_t seed = 0;
};

struct SolveReport {
    explicit SolveReport(GridFunction start) : solution(std::move(start)) {}

    GridFunction solution;
    SolveMethod method = SolveMethod::picard;
    int iterations = 0;
    double residual_sup = 0.0;  // ||f(solution) - v||, recomputed at the end
    std::vector<double> step_sizes;
    std::optional<double> contraction_ratio_observed;
    std::optional<double> kappa_estimate;
    std::optional<double> a_priori_bound;
    /// Newton: max |C'(v) 1 - (C(v + t) - C(v)) / t| with t = 1e-6, relative
    /// to 1 + |C'(v) 1|.
    std::optional<double> fd_validation_error;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Solver failure; carries whatever the solver had computed so far.
class SolveError : public Error {
public:
    SolveError(const std::string& what, SolveReport partial) : Error(what), partial_(std::move(partial)) {}
    const SolveReport& partial() const noexcept { return partial_; }

private:
    SolveReport partial_;
};

class DivergenceError : public SolveError {
public:
    using SolveError::SolveError;
};

class MaxIterExceeded : public SolveError {
public:
    using SolveError::SolveError;
};

class SingularJacobian : public SolveError {
public:
    using SolveError::SolveError;
};

inline constexpr int kDivergenceRun = 3;

/// u_{n+1} = (v - K u_n - C(u_n)) / a from u_0 = v. When the sampled
/// contraction estimate is >= 1 a warning is recorded and three consecutive
/// growing steps raise DivergenceError. On convergence the geometric tail of
/// the remaining steps is added if that lowers the residual.
SolveReport solve_picard(const Problem& problem, const GridFunction& v, const SolverOptions& opts = {});

/// Newton on f(u) = v; starts from `initial` or v and returns at once when
/// the start already has residual <= tol. Throws SingularJacobian and
/// MaxIterExceeded.
SolveReport solve_newton(const Problem& problem, const GridFunction& v, const SolverOptions& opts = {},
                         const std::optional<GridFunction>& initial = std::nullopt);

struct ContinuationReport {
    int steps = 0;
    std::vector<double> parameters;  // t_j = j / steps
    std::vector<GridFunction> solutions;
    std::vector<SolveMethod> methods;
    double max_consecutive_jump = 0.0;
    double endpoint_distance = 0.0;
    bool endpoint_matches_direct = false;
};

class ContinuationError : public Error {
public:
    ContinuationError(double t, const std::string& what)
        : Error("continuation failed at t = " + std::to_string(t) + ": " + what), t_(t) {}
    double parameter() const noexcept { return t_; }

private:
    double t_;
};

/// Solves f(u) = (1 - t_j) v0 + t_j v1 for t_j = j / steps, warm-starting
/// Newton from the previous solution and falling back to Picard when the
/// Jacobian is singular.
ContinuationReport solve_continuation(const Problem& problem, const GridFunction& v0, const GridFunction& v1,
                                      int steps, const SolverOptions& opts = {});

inline constexpr double kClusterRadius = 1e-6;

struct UniquenessReport {
    int starts = 0;
    int converged_starts = 0;
    double start_radius = 0.0;
    std::vector<GridFunction> distinct_solutions;
    std::vector<int> cluster_sizes;
    double cluster_radius = kClusterRadius;
    bool all_converged = false;
    bool jacobian_nonsingular_at_each = false;
};

/// Newton from `starts` seeded random initial functions with values uniform in
/// [-R, R], R = 1 + 2 ||v||. Evidence only: it cannot certify a solution count.
UniquenessReport uniqueness_probe(const Problem& problem, const GridFunction& v, int starts,
                                  const SolverOptions& opts = {});

}  // namespace fredop
