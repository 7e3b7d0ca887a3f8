#include "fredop/report_json.hpp"

#include <cmath>
#include <cstdio>

namespace fredop {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

void write_string(const std::string& s, std::string& out) {
    // nlohmann handles the escaping
    out += json(s).dump();
}

void write(const json& v, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: sorted
                if (!first) out += ",\n";
                first = false;
                out += pad;
                write_string(it.key(), out);
                out += ": ";
                write(it.value(), depth + 1, out);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write(v[i], depth + 1, out);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            out += buf;
            return;
        }
        case json::value_t::string:
            write_string(v.get<std::string>(), out);
            return;
        default:
            out += v.dump();
            return;
    }
}

}  // namespace

std::string dump_canonical(const json& doc) {
    std::string out;
    write(doc, 0, out);
    out += '\n';
    return out;
}

json to_json(const GridFunction& f) {
    json values = json::array();
    for (Eigen::Index i = 0; i < f.size(); ++i) values.push_back(f[i]);
    return values;
}

json to_json(const SolveReport& r) {
    json warnings = json::array();
    for (const auto& w : r.warnings) warnings.push_back(w);
    return {
        {"solution", to_json(r.solution)},
        {"method", std::string(method_name(r.method))},
        {"iterations", r.iterations},
        {"residual_sup", r.residual_sup},
        {"step_sizes", r.step_sizes},
        {"contraction_ratio_observed", optional_json(r.contraction_ratio_observed)},
        {"kappa_estimate", optional_json(r.kappa_estimate)},
        {"a_priori_bound", optional_json(r.a_priori_bound)},
        {"fd_validation_error", optional_json(r.fd_validation_error)},
        {"converged", r.converged},
        {"warnings", warnings},
    };
}

json to_json(const ContinuationReport& r) {
    json solutions = json::array();
    for (const auto& s : r.solutions) solutions.push_back(to_json(s));
    json methods = json::array();
    for (auto m : r.methods) methods.push_back(std::string(method_name(m)));
    return {
        {"steps", r.steps},
        {"parameters", r.parameters},
        {"solutions", solutions},
        {"methods", methods},
        {"max_consecutive_jump", r.max_consecutive_jump},
        {"endpoint_distance", r.endpoint_distance},
        {"endpoint_matches_direct", r.endpoint_matches_direct},
    };
}

json to_json(const UniquenessReport& r) {
    json reps = json::array();
    for (const auto& s : r.distinct_solutions) reps.push_back(to_json(s));
    return {
        {"starts", r.starts},
        {"converged_starts", r.converged_starts},
        {"start_radius", r.start_radius},
        {"distinct_solutions", reps},
        {"cluster_sizes", r.cluster_sizes},
        {"cluster_radius", r.cluster_radius},
        {"all_converged", r.all_converged},
        {"jacobian_nonsingular_at_each", r.jacobian_nonsingular_at_each},
    };
}

json to_json(const ContractionReport& r) {
    return {
        {"kernel_sup_M", r.kernel_sup_M},
        {"per_kernel_sup", r.per_kernel_sup},
        {"measure", r.measure},
        {"contraction_constant_k", r.contraction_constant_k},
        {"hammerstein_hu_sup", optional_json(r.hammerstein_hu_sup)},
        {"u_range", r.u_range},
        {"combined_estimate_kappa", r.combined_estimate_kappa},
        {"is_contractive", r.is_contractive},
    };
}

json to_json(const CoercivityReport& r) {
    json rays = json::array();
    for (const auto& ray : r.rays) rays.push_back({{"scales", ray.scales}, {"norms", ray.norms}});
    return {
        {"rays", rays},
        {"lower_bound_certified", optional_json(r.lower_bound_certified)},
        {"lower_bound_respected", optional_json(r.lower_bound_respected)},
        {"monotone_growth_observed", r.monotone_growth_observed},
        {"note", r.note},
    };
}

json to_json(const NormSeparationReport& r) {
    return {
        {"norm_K_plus_C", r.norm_K_plus_C},
        {"distance_from_1", r.distance_from_1},
        {"norm_F", optional_json(r.norm_F)},
        {"norm_C", optional_json(r.norm_C)},
        {"split_norm_gap", optional_json(r.split_norm_gap)},
        {"pass", r.pass},
    };
}

json to_json(const FrechetReport& r) {
    return {
        {"t_values", r.t_values},
        {"remainders", r.remainders},
        {"estimated_order", optional_json(r.estimated_order)},
        {"affine", r.affine},
        {"pass", r.pass},
    };
}

json to_json(const LaxMilgramReport& r) {
    return {{"min_rayleigh", r.min_rayleigh}, {"trials", r.trials}};
}

json to_json(const IndexReport& r) {
    return {
        {"rows", r.rows},
        {"cols", r.cols},
        {"rank", r.rank},
        {"dim_kernel", r.dim_kernel},
        {"codim_range", r.codim_range},
        {"index", r.index},
        {"sv_threshold_used", r.sv_threshold_used},
        {"singular_values", r.singular_values},
    };
}

}  // namespace fredop
