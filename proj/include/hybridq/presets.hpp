#pragma once

// Named experiment presets for the capacity-planning figures.
//
// The presets share one scenario: closed clients that ask about 0.1
// questions per working minute, s_alpha ~ N(1, 0.2) for both the operator
// and the agent, epsilon ~ N(0.5, 0.1), a single operator unless stated, an
// SLA of 5 minutes, and one-hour service sessions that start empty. Each
// grid point pools `episodes` sessions per replication.

#include <cstdint>
#include <string>
#include <vector>

#include "hybridq/experiments.hpp"
#include "hybridq/report.hpp"

namespace hybridq::presets {

inline constexpr double kSla = 5.0;
inline constexpr double kSessionMinutes = 60.0;

struct PresetOptions {
    std::uint64_t seed = 1;
    int reps = 20;
    int episodes = 500;  // sessions pooled per replication
    bool charts = false;
};

/// The shared scenario above, hybrid mode, alpha = 0.5, s_beta ~ N(5, 1).
SystemConfig session_base(int episodes);

const std::vector<std::string>& names();

/// Runs a named preset: fig4a, fig4b, fig4c, fig5, fig6, learning.
/// Throws ValidationError for an unknown name.
report::Output run(const std::string& name, const PresetOptions& options);

/// Generic sweep from a spec file: one row per grid point.
report::Output run_spec(const experiments::SweepSpec& spec, bool charts);

}  // namespace hybridq::presets
