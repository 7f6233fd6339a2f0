#pragma once

// Synthetic Plaso-style timelines with planted high-level events and their exact
// ground truth. Planted rows copy the artifact shapes of real psort output; noise
// rows are drawn from a vocabulary that no analyzer, rule or search preset matches.

#include "tleval/error.hpp"
#include "tleval/json_text.hpp"
#include "tleval/rules.hpp"
#include "tleval/summarizer.hpp"
#include "tleval/timeline.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tleval {

class SpecError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

struct PlantedEvent {
    std::string type;  ///< analyzer slug
    UtcInstant at{};
    std::map<std::string, std::string> params;  ///< overrides of the per-type defaults
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    UtcInstant start{};
    UtcInstant end{};
    std::size_t noise_rows = 0;
    /// Rows aimed at the search presets and the keyword rules but at no analyzer.
    std::size_t bait_rows = 0;
    std::vector<PlantedEvent> planted;
    RuleSet rules = default_rules();
};

ScenarioSpec scenario_from_json(const Json& value);
Json scenario_to_json(const ScenarioSpec& spec);

/// One planted event of each type following the reference user story (Edge start,
/// Bing search, download, installer run, Google search, tutorial visit, shutdown).
ScenarioSpec reference_scenario(std::uint64_t seed, std::size_t noise_rows, std::size_t bait_rows);

struct ForgeResult {
    std::string csv;
    Timeline timeline;
    std::vector<HighLevelEvent> expected_events;
    std::vector<DetectedEvent> expected_detections;
    std::vector<std::string> grep_outputs;  ///< one per search preset, grep-formatted
    std::vector<std::size_t> noise_row_indices;
    RuleSet rules;
};

/// Deterministic for a fixed spec. Throws SpecError for unknown types, instants
/// outside the span, or parameters that stop a planted row from triggering exactly
/// its own analyzer.
ForgeResult forge(const ScenarioSpec& spec);

/// The same timeline with every noise row removed.
Timeline without_noise(const ForgeResult& result);

} // namespace tleval
