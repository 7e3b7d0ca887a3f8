#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fredop/problem_io.hpp"

namespace fredop {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitSolverFailure = 2,
};

struct RunFlags {
    std::string output = "report.json";
    std::optional<double> tol;
    std::optional<int> nodes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;  // picard | newton
    bool quiet = false;
    bool timings = false;  // off by default so reports stay byte-identical
};

inline constexpr int kUniquenessStarts = 16;
inline constexpr int kLaxMilgramTrials = 1000;
inline constexpr double kLaxMilgramConstant = 1e-8;

/// Problem file text of a built-in instance ("example1" or "example2").
std::optional<std::string> example_problem_json(std::string_view id);

/// Applies --tol/--nodes/--seed/--method to a validated problem.
void apply_overrides(ProblemConfig& config, const RunFlags& flags);

/// Hypothesis checks shared by `check` and `reproduce`. Each entry has a
/// "name" and a "status" of pass, fail, skipped or error.
nlohmann::json run_checks(const BuiltProblem& built, const ProblemConfig& config);

int run_solve(const std::string& path, const RunFlags& flags, std::ostream& out, std::ostream& err);
int run_check(const std::string& path, const RunFlags& flags, std::ostream& out, std::ostream& err);
int run_reproduce(const std::string& example_id, const RunFlags& flags, std::ostream& out, std::ostream& err);

/// Full command line: `solve <file>`, `check <file>`, `reproduce <id>`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fredop
