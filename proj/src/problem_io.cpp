#include "fredop/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fredop/report_json.hpp"

namespace fredop {

using nlohmann::json;

std::string_view run_method_name(RunMethod m) noexcept {
    switch (m) {
        case RunMethod::picard: return "picard";
        case RunMethod::newton: return "newton";
        case RunMethod::continuation: return "continuation";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.count(key)) {
            throw InputError(where + (where.empty() ? "" : ".") + key + ": unknown key");
        }
    }
}

const json& require_object(const json& doc, const std::string& field) {
    if (!doc.is_object()) throw InputError(field + ": expected an object");
    return doc;
}

double require_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw InputError(field + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw InputError(field + ": expected a finite number");
    return d;
}

std::int64_t require_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw InputError(field + ": expected an integer");
    return v.get<std::int64_t>();
}

// Parses the expression text for syntax only and checks which variables it
// may use.
std::string require_expression(const json& v, const std::string& field, bool allow_y, bool allow_u) {
    if (!v.is_string()) throw InputError(field + ": expected an expression string");
    const std::string text = v.get<std::string>();
    Expr e = Expr::constant(0.0);
    try {
        e = parse(text);
    } catch (const Error& err) {
        throw InputError(field + ": " + err.what());
    }
    if (!allow_u && e.depends_on_u()) throw InputError(field + ": must not depend on u");
    if (!allow_y && (e.depends_on(Var::y1) || e.depends_on(Var::y2))) {
        throw InputError(field + ": must be a function of x only");
    }
    return text;
}

}  // namespace

ProblemConfig parse_problem(const json& doc) {
    require_object(doc, "problem");
    reject_unknown_keys(doc, "",
                        {"domain", "quadrature", "linear_kernels", "hammerstein_kernel", "hammerstein_derivative",
                         "identity_coefficient", "rhs", "solver", "continuation"});
    ProblemConfig c;

    if (!doc.contains("domain")) throw InputError("domain: missing");
    const json& domain = require_object(doc["domain"], "domain");
    reject_unknown_keys(domain, "domain", {"intervals"});
    if (!domain.contains("intervals") || !domain["intervals"].is_array()) {
        throw InputError("domain.intervals: expected a list of [a, b] pairs");
    }
    const json& intervals = domain["intervals"];
    if (intervals.empty() || intervals.size() > 2) {
        throw InputError("domain.intervals: expected one or two intervals");
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const std::string field = "domain.intervals[" + std::to_string(i) + "]";
        const json& iv = intervals[i];
        if (!iv.is_array() || iv.size() != 2) throw InputError(field + ": expected [a, b]");
        const double lo = require_number(iv[0], field);
        const double hi = require_number(iv[1], field);
        if (!(lo < hi)) throw InputError(field + ": requires a < b");
        c.intervals.push_back({lo, hi});
    }
    const int dim = static_cast<int>(c.intervals.size());
    auto check_dim = [&](const std::string& text, const std::string& field) {
        if (dim < 2) {
            const Expr e = parse(text);
            if (e.depends_on(Var::x2) || e.depends_on(Var::y2)) {
                throw InputError(field + ": uses x2/y2 on a one-dimensional domain");
            }
        }
    };

    if (doc.contains("quadrature")) {
        const json& q = require_object(doc["quadrature"], "quadrature");
        reject_unknown_keys(q, "quadrature", {"rule", "nodes_per_dim"});
        if (q.contains("rule")) {
            if (!q["rule"].is_string()) throw InputError("quadrature.rule: expected a string");
            c.rule = q["rule"].get<std::string>();
            if (c.rule != "trapezoid" && c.rule != "gauss-legendre") {
                throw InputError("quadrature.rule: expected \"trapezoid\" or \"gauss-legendre\"");
            }
        }
        if (q.contains("nodes_per_dim")) {
            const auto m = require_integer(q["nodes_per_dim"], "quadrature.nodes_per_dim");
            if (m < 2 || m > 4096) throw InputError("quadrature.nodes_per_dim: must be in [2, 4096]");
            c.nodes_per_dim = static_cast<int>(m);
        }
    }

    if (doc.contains("linear_kernels")) {
        const json& ks = doc["linear_kernels"];
        if (!ks.is_array()) throw InputError("linear_kernels: expected a list of expression strings");
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::string field = "linear_kernels[" + std::to_string(i) + "]";
            c.linear_kernels.push_back(require_expression(ks[i], field, true, false));
            check_dim(c.linear_kernels.back(), field);
        }
    }
    if (doc.contains("hammerstein_kernel")) {
        c.hammerstein_kernel = require_expression(doc["hammerstein_kernel"], "hammerstein_kernel", true, true);
        check_dim(*c.hammerstein_kernel, "hammerstein_kernel");
    }
    if (doc.contains("hammerstein_derivative")) {
        if (!c.hammerstein_kernel) throw InputError("hammerstein_derivative: given without hammerstein_kernel");
        c.hammerstein_derivative =
            require_expression(doc["hammerstein_derivative"], "hammerstein_derivative", true, true);
        check_dim(*c.hammerstein_derivative, "hammerstein_derivative");
    }
    if (doc.contains("identity_coefficient")) {
        c.identity_coefficient = require_number(doc["identity_coefficient"], "identity_coefficient");
        if (c.identity_coefficient == 0.0) throw InputError("identity_coefficient: must be non-zero");
    }

    if (!doc.contains("rhs")) throw InputError("rhs: missing");
    c.rhs = require_expression(doc["rhs"], "rhs", false, false);
    check_dim(c.rhs, "rhs");

    if (doc.contains("solver")) {
        const json& s = require_object(doc["solver"], "solver");
        reject_unknown_keys(s, "solver", {"method", "tol", "max_iter", "seed"});
        if (s.contains("method")) {
            if (!s["method"].is_string()) throw InputError("solver.method: expected a string");
            const auto m = s["method"].get<std::string>();
            if (m == "picard") c.method = RunMethod::picard;
            else if (m == "newton") c.method = RunMethod::newton;
            else if (m == "continuation") c.method = RunMethod::continuation;
            else throw InputError("solver.method: expected \"picard\", \"newton\" or \"continuation\"");
        }
        if (s.contains("tol")) {
            c.solver.tol = require_number(s["tol"], "solver.tol");
            if (!(c.solver.tol > 0.0)) throw InputError("solver.tol: must be positive");
        }
        if (s.contains("max_iter")) {
            const auto n = require_integer(s["max_iter"], "solver.max_iter");
            if (n < 1 || n > 1000000) throw InputError("solver.max_iter: must be in [1, 1000000]");
            c.solver.max_iter = static_cast<int>(n);
        }
        if (s.contains("seed")) {
            const auto seed = require_integer(s["seed"], "solver.seed");
            if (seed < 0) throw InputError("solver.seed: must be non-negative");
            c.solver.seed = static_cast<std::uint64_t>(seed);
        }
    }

    if (doc.contains("continuation")) {
        const json& k = require_object(doc["continuation"], "continuation");
        reject_unknown_keys(k, "continuation", {"rhs_start", "steps"});
        ContinuationConfig cc;
        if (!k.contains("rhs_start")) throw InputError("continuation.rhs_start: missing");
        cc.rhs_start = require_expression(k["rhs_start"], "continuation.rhs_start", false, false);
        check_dim(cc.rhs_start, "continuation.rhs_start");
        if (k.contains("steps")) {
            const auto n = require_integer(k["steps"], "continuation.steps");
            if (n < 1 || n > 100000) throw InputError("continuation.steps: must be in [1, 100000]");
            cc.steps = static_cast<int>(n);
        }
        c.continuation = cc;
    }
    if (c.method == RunMethod::continuation && !c.continuation) {
        throw InputError("continuation: required when solver.method is \"continuation\"");
    }
    return c;
}

ProblemConfig parse_problem_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return parse_problem(doc);
}

ProblemConfig load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

json to_json(const ProblemConfig& c) {
    json doc = json::object();
    json intervals = json::array();
    for (const auto& iv : c.intervals) intervals.push_back(json::array({iv.lo, iv.hi}));
    doc["domain"] = {{"intervals", intervals}};
    json q = {{"rule", c.rule}};
    if (c.nodes_per_dim) q["nodes_per_dim"] = *c.nodes_per_dim;
    doc["quadrature"] = q;
    doc["linear_kernels"] = c.linear_kernels;
    if (c.hammerstein_kernel) doc["hammerstein_kernel"] = *c.hammerstein_kernel;
    if (c.hammerstein_derivative) doc["hammerstein_derivative"] = *c.hammerstein_derivative;
    doc["identity_coefficient"] = c.identity_coefficient;
    doc["rhs"] = c.rhs;
    doc["solver"] = {{"method", std::string(run_method_name(c.method))},
                     {"tol", c.solver.tol},
                     {"max_iter", c.solver.max_iter},
                     {"seed", c.solver.seed}};
    if (c.continuation) {
        doc["continuation"] = {{"rhs_start", c.continuation->rhs_start}, {"steps", c.continuation->steps}};
    }
    return doc;
}

std::string problem_digest(const ProblemConfig& config) {
    // FNV-1a, 64 bit
    const std::string text = dump_canonical(to_json(config));
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BuiltProblem build(const ProblemConfig& c) {
    ProblemSpec spec;
    spec.domain.intervals = c.intervals;
    spec.rule = parse_rule(c.rule);
    spec.nodes_per_dim = c.nodes_per_dim.value_or(0);
    for (const auto& k : c.linear_kernels) spec.linear_kernels.push_back(parse(k));
    if (c.hammerstein_kernel) spec.hammerstein_kernel = parse(*c.hammerstein_kernel);
    if (c.hammerstein_derivative) spec.hammerstein_derivative = parse(*c.hammerstein_derivative);
    spec.identity_coefficient = c.identity_coefficient;

    std::optional<Problem> problem;
    try {
        problem.emplace(spec);
    } catch (const Error& e) {
        throw InputError(std::string("problem: ") + e.what());
    }
    auto sample_field = [&](const std::string& text, const std::string& field) {
        try {
            return sample(problem->grid(), parse(text));
        } catch (const Error& e) {
            throw InputError(field + ": " + e.what());
        }
    };
    GridFunction rhs = sample_field(c.rhs, "rhs");
    std::optional<GridFunction> start;
    if (c.continuation) start = sample_field(c.continuation->rhs_start, "continuation.rhs_start");
    return BuiltProblem{std::move(*problem), std::move(rhs), std::move(start)};
}

}  // namespace fredop
