#ifndef CFIN_REPORT_HPP
#define CFIN_REPORT_HPP

#include <json.hpp>
#include <string>

#include "cfin/classification.hpp"
#include "cfin/geodesics.hpp"

namespace cfin {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

/// Byte-deterministic dump: fixed key order (insertion order of
/// ordered_json), every floating-point number rendered with 17 significant
/// digits, no locale dependence.
std::string dump_deterministic(const Json& doc, int indent = 2);

Json to_json(const ValidationReport& rep);
Json to_json(const ClassificationReport& rep);
Json to_json(const RelatednessReport& rep);
Json to_json(const RhoFamilyReport& rep);
Json to_json(const GeodesicTrace& rep);

}  // namespace cfin

#endif
