#pragma once

#include <string>

#include <json.hpp>

#include "fredop/diagnostics.hpp"
#include "fredop/solvers.hpp"

namespace fredop {

/// Sorted keys, two-space indent, floats with 17 significant digits and
/// non-finite floats as null. Byte-stable for equal documents.
std::string dump_canonical(const nlohmann::json& doc);

nlohmann::json to_json(const GridFunction& f);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const ContinuationReport& r);
nlohmann::json to_json(const UniquenessReport& r);
nlohmann::json to_json(const ContractionReport& r);
nlohmann::json to_json(const CoercivityReport& r);
nlohmann::json to_json(const NormSeparationReport& r);
nlohmann::json to_json(const FrechetReport& r);
nlohmann::json to_json(const LaxMilgramReport& r);
nlohmann::json to_json(const IndexReport& r);

}  // namespace fredop
