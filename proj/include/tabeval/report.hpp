#pragma once

#include <string>

#include <json.hpp>

#include "tabeval/harness.hpp"
#include "tabeval/quality.hpp"
#include "tabeval/stattests.hpp"

namespace tabeval {

inline constexpr const char* kToolName = "tabeval";
inline constexpr const char* kToolVersion = "0.1.0";

/// All reports are built as insertion-ordered JSON so identical inputs
/// produce byte-identical files.
using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a digest of the file's bytes as 16 hex characters.
std::string file_digest(const std::string& path);

/// RFC 3339 UTC timestamp.
std::string utc_timestamp_now();

Json to_json(const QualityReport& r);
Json to_json(const DiagnosticReport& r);
Json to_json(const GateDecision& d);
Json to_json(const PermutationResult& r);
Json to_json(const DistinguishabilityResult& r);
Json to_json(const MacroScores& s);
Json to_json(const UtilityResult& r);
Json to_json(const PrivacyResult& r);

/// Human-readable markdown view of an assembled report.
std::string render_markdown(const Json& report);

}  // namespace tabeval
