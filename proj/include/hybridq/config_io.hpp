#pragma once

// JSON schema for scenario and sweep files, and JSON renderings of results.
//
// Distributions:  {"kind": "normal", "mean": 5, "stddev": 1}
//   kinds: deterministic (mean), exponential (mean), normal (mean, stddev;
//   truncated at zero), empirical (samples: [...]).
// All times in minutes, rates per minute. Unknown keys are rejected.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "hybridq/analytic.hpp"
#include "hybridq/experiments.hpp"
#include "hybridq/simulator.hpp"

namespace hybridq::io {

using nlohmann::json;

Distribution distribution_from_json(const json& j);
json to_json(const Distribution& d);

/// Throws ValidationError on schema violations or invalid values.
SystemConfig system_config_from_json(const json& j);
json to_json(const SystemConfig& c);

/// {"base": {...}, "grid": {"n_clients": [...], ...}, "reps": 20, "sla": 5, "seed": 1}
experiments::SweepSpec sweep_spec_from_json(const json& j);
json to_json(const experiments::SweepSpec& s);

/// Parses text, wrapping parse errors as ValidationError.
json parse(const std::string& text);
/// Reads a file; throws IoError when it cannot be opened.
json load_file(const std::string& path);

json to_json(const SimulationMetrics& m);
json to_json(const Estimate& e);
json to_json(const ReplicatedMetrics& m);
json to_json(const analytic::AnalyticReport& r);

/// FNV-1a 64 of the compact JSON dump (keys sorted), as 16 hex digits.
std::string config_hash(const json& j);

/// JSON number, or null for NaN/inf.
json number_or_null(double v);

}  // namespace hybridq::io
