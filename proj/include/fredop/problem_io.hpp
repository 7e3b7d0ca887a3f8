#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fredop/errors.hpp"
#include "fredop/operators.hpp"
#include "fredop/solvers.hpp"

namespace fredop {

/// Bad problem file or command line; the CLI maps it to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

enum class RunMethod { picard, newton, continuation };

struct ContinuationConfig {
    std::string rhs_start;
    int steps = 1;
};

/// A validated problem file. Expression fields are kept as text and parsed
/// by `build`, so the canonical form is exactly what the user wrote.
struct ProblemConfig {
    std::vector<Interval> intervals;
    std::string rule = "trapezoid";
    std::optional<int> nodes_per_dim;
    std::vector<std::string> linear_kernels;
    std::optional<std::string> hammerstein_kernel;
    std::optional<std::string> hammerstein_derivative;
    double identity_coefficient = 1.0;
    std::string rhs;
    RunMethod method = RunMethod::newton;
    SolverOptions solver;
    std::optional<ContinuationConfig> continuation;
};

/// Checks the document against the problem schema (unknown keys, types,
/// ranges, expression syntax) without touching any numerics. Throws
/// InputError naming the offending field.
ProblemConfig parse_problem(const nlohmann::json& doc);
ProblemConfig parse_problem_text(const std::string& text);
ProblemConfig load_problem_file(const std::string& path);

nlohmann::json to_json(const ProblemConfig& config);

/// Stable hex digest of the canonical problem document.
std::string problem_digest(const ProblemConfig& config);

struct BuiltProblem {
    Problem problem;
    GridFunction rhs;
    std::optional<GridFunction> rhs_start;
};

/// Assembles the discrete problem; numeric failures become InputError.
BuiltProblem build(const ProblemConfig& config);

std::string_view run_method_name(RunMethod m) noexcept;

}  // namespace fredop
