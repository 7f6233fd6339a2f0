#pragma once

// Ground-truth generation, task runs against truth, and tabular reporting.
//
// Workspace layout (all paths relative to the workspace root):
//   timeline.csv, rules.json                  inputs
//   truth/window.csv                          the chunk handed to the model
//   truth/grep/<preset>.txt                   grep output per search preset
//   truth/detections.json                     rule-engine output
//   truth/summary/all.json, <slug>.json       summarizer output
//   truth/manifest.json                       window bounds, presets, scored types
//   runs/<mode>/<knowledge>/<task>/<item>.*   extracted artifacts and raw responses
//   runs/<mode>/results.json, report.txt, report.json

#include "tleval/error.hpp"
#include "tleval/json_text.hpp"
#include "tleval/llm.hpp"
#include "tleval/metrics.hpp"
#include "tleval/rules.hpp"
#include "tleval/search.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tleval {

struct HarnessConfig {
    SessionConfig session;
    std::size_t chunk_lines = default_window_rows;
    std::size_t window_start = 0;
    MetricConfig metrics;
    Normalization normalization = Normalization::None;
    /// Canonical JSON before scoring. Unset means on for self mode, off otherwise.
    std::optional<bool> canonicalize;
    /// Extra attempts when a response carries no usable artifact.
    int artifact_retries = 1;
    std::size_t max_in_flight = 2;

    /// Throws ConfigError on unknown keys or invalid values.
    static HarnessConfig from_json(const Json& value);
    static HarnessConfig load(const std::string& path);
    Json to_json() const;
};

enum class Schema { Detections, Summary, Generic };

/// Re-serializes JSON text with the schema's field order, two-space indentation,
/// standard escapes and a trailing newline. Unknown fields follow the known ones in
/// their original order. Throws BadArtifact when the text is not JSON.
std::string canonicalize(std::string_view json_text, Schema schema);

enum class RunMode { Self, Replay, Live };
RunMode parse_run_mode(std::string_view name);
std::string_view to_string(RunMode mode);

/// Report row labels.
inline constexpr const char* row_summary_single = "Event summarization (single)";
inline constexpr const char* row_summary_multiple = "Event summarization (multiple)";
inline constexpr const char* row_rules = "Rule-based anomaly detection";
inline constexpr const char* row_grep = "Run grep for specific terms";

struct EvalItem {
    std::string name;
    MetricBundle scores;
    bool skipped = false;  ///< reference has no tokens, so nothing can be scored
};

struct EvalRow {
    std::string task;
    Knowledge knowledge = Knowledge::Without;
    MetricBundle scores;  ///< per-metric average over scored items; mean recomputed
    std::vector<EvalItem> items;
};

Json rows_to_json(const std::vector<EvalRow>& rows);
std::vector<EvalRow> rows_from_json(const Json& value);

/// Copies a timeline and rule set into a fresh workspace.
void init_workspace(const std::string& root, const std::string& timeline_csv,
                    const RuleSet& rules);

/// Writes truth files for one task, or for every scorable task when `task` is empty.
/// Throws ConfigError for the EDA task, which has no ground truth.
void gen_ground_truth(const std::string& root, const HarnessConfig& config,
                      std::optional<Task> task = std::nullopt);

/// Scores one task. Self mode uses the truth as the candidate; replay and live
/// obtain it from `session`. Summarization yields two rows (single, multiple);
/// EDA writes its artifacts and yields none.
std::vector<EvalRow> run_task(const std::string& root, Task task, Knowledge knowledge,
                              RunMode mode, const HarnessConfig& config,
                              LlmSession* session = nullptr);

struct RunPlan {
    RunMode mode = RunMode::Self;
    std::vector<Task> tasks = {Task::Summarize, Task::Rules, Task::Grep, Task::Eda};
    std::vector<Knowledge> knowledge = {Knowledge::Without, Knowledge::With};
    std::string transcript_path;  ///< replay source and live destination
};

/// Runs the plan, then writes results.json, report.txt and report.json under
/// runs/<mode>/. Live runs append every exchange to the transcript file.
std::vector<EvalRow> run_plan(const std::string& root, const RunPlan& plan,
                              const HarnessConfig& config);

/// Two sections (without / with additional knowledge), values rounded half-up to
/// three decimals. Empty input gives the header alone.
std::string report_text(const std::vector<EvalRow>& rows);
Json report_json(const std::vector<EvalRow>& rows);

} // namespace tleval
