#include "tleval/harness.hpp"

#include "tleval/eda.hpp"
#include "tleval/summarizer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <thread>

namespace tleval {

namespace fs = std::filesystem;

namespace {

std::string path_in(const std::string& root, const std::string& rel) {
    return (fs::path(root) / rel).string();
}

std::string require_file(const std::string& root, const std::string& rel) {
    const auto path = path_in(root, rel);
    if (!fs::exists(path)) {
        throw EvaluationError("missing " + rel + " in workspace " + root +
                              " (run the truth step first)");
    }
    return read_file(path);
}

Json reorder(const Json& obj, const std::vector<std::string>& order) {
    if (!obj.is_object()) {
        return obj;
    }
    Json out = Json::object();
    for (const auto& key : order) {
        if (obj.contains(key)) {
            out[key] = obj.at(key);
        }
    }
    for (const auto& [key, value] : obj.items()) {
        if (!out.contains(key)) {
            out[key] = value;
        }
    }
    return out;
}

const std::vector<std::string> detection_fields = {"datetime", "event", "keyword", "message"};
const std::vector<std::string> event_fields = {
    "id",       "date_time_min", "date_time_max", "evidence_source", "type",       "description",
    "category", "plugin",        "files",         "keys",            "supporting", "trigger"};
const std::vector<std::string> context_fields = {"datetime", "message", "parser"};
const std::vector<std::string> trigger_fields = {"datetime", "message", "parser", "reason"};

Json canonical_event(const Json& event) {
    Json out = reorder(event, event_fields);
    if (out.is_object() && out.contains("supporting") && out["supporting"].is_array()) {
        for (auto& entry : out["supporting"]) {
            entry = reorder(entry, context_fields);
        }
    }
    if (out.is_object() && out.contains("trigger")) {
        out["trigger"] = reorder(out["trigger"], trigger_fields);
    }
    return out;
}

template <typename F>
Json map_entries(const Json& value, F&& fn) {
    Json out = value;
    if (value.is_array()) {
        for (auto& entry : out) {
            entry = fn(entry);
        }
    } else if (value.is_object()) {
        for (auto& [key, entry] : out.items()) {
            (void)key;
            entry = fn(entry);
        }
    }
    return out;
}

bool is_event_object(const Json& value) {
    return value.is_object() && (value.contains("date_time_min") || value.contains("trigger"));
}

struct Manifest {
    std::size_t window_start = 0;
    std::size_t window_rows = 0;
    std::vector<PresetPattern> presets;
    std::vector<std::string> summary_types;  ///< slugs with a non-empty truth
};

Json manifest_to_json(const Manifest& m) {
    Json presets = Json::array();
    for (const auto& p : m.presets) {
        presets.push_back(Json{{"name", p.name}, {"expression", p.expression}, {"purpose", p.purpose}});
    }
    return Json{{"window_start", m.window_start},
                {"window_rows", m.window_rows},
                {"presets", presets},
                {"summary_types", m.summary_types}};
}

Manifest load_manifest(const std::string& root) {
    const auto text = require_file(root, "truth/manifest.json");
    Manifest m;
    try {
        const auto j = Json::parse(text);
        m.window_start = j.at("window_start").get<std::size_t>();
        m.window_rows = j.at("window_rows").get<std::size_t>();
        for (const auto& p : j.at("presets")) {
            m.presets.push_back({p.at("name").get<std::string>(), p.at("expression").get<std::string>(),
                                 p.at("purpose").get<std::string>()});
        }
        m.summary_types = j.at("summary_types").get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
        throw EvaluationError(std::string("malformed truth manifest: ") + e.what());
    }
    return m;
}

Timeline load_window(const std::string& root, const HarnessConfig& config, Manifest& manifest) {
    const auto timeline = load_timeline(path_in(root, "timeline.csv"), ParseMode::Strict);
    if (config.window_start > timeline.size()) {
        throw ConfigError("window_start " + std::to_string(config.window_start) +
                          " lies past the end of a " + std::to_string(timeline.size()) +
                          "-row timeline");
    }
    auto window = slice_window(timeline, config.window_start, config.chunk_lines);
    manifest.window_start = config.window_start;
    manifest.window_rows = window.size();
    return window;
}

MetricBundle average(const std::vector<EvalItem>& items) {
    double b = 0, r1 = 0, r2 = 0, rl = 0;
    std::size_t n = 0;
    for (const auto& item : items) {
        if (item.skipped) {
            continue;
        }
        b += item.scores.bleu;
        r1 += item.scores.rouge1;
        r2 += item.scores.rouge2;
        rl += item.scores.rougeL;
        ++n;
    }
    if (n == 0) {
        return {};
    }
    const auto dn = static_cast<double>(n);
    return MetricBundle::from_scores(b / dn, r1 / dn, r2 / dn, rl / dn);
}

Json bundle_to_json(const MetricBundle& m) {
    return Json{{"bleu", m.bleu},
                {"rouge1", m.rouge1},
                {"rouge2", m.rouge2},
                {"rougeL", m.rougeL},
                {"mean", m.mean}};
}

MetricBundle bundle_from_json(const Json& j) {
    return MetricBundle::from_scores(j.at("bleu").get<double>(), j.at("rouge1").get<double>(),
                                     j.at("rouge2").get<double>(), j.at("rougeL").get<double>());
}

std::string fixed3(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", round_half_up(value, 3));
    return buf;
}

// One unit of scoring work: a prompt plus the truth it is compared with.
struct WorkItem {
    std::string name;
    std::string reference;
    PromptInputs inputs;
    Schema schema = Schema::Generic;
    bool json = false;
};

// Runs `fn(i)` for every index with at most `width` calls in flight; the first
// exception is rethrown after all workers stop.
template <typename F>
void bounded_for(std::size_t count, std::size_t width, F&& fn) {
    width = std::max<std::size_t>(1, std::min(width, count));
    if (width <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < width; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                {
                    std::lock_guard lock(failure_mutex);
                    if (failure) {
                        return;
                    }
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<EvalItem> score_items(const std::string& root, const std::string& run_dir,
                                  Task task, Knowledge knowledge, RunMode mode,
                                  const HarnessConfig& config, LlmSession* session,
                                  const std::vector<WorkItem>& work) {
    const bool canonical = config.canonicalize.value_or(mode == RunMode::Self);
    std::vector<EvalItem> items(work.size());
    bounded_for(work.size(), mode == RunMode::Self ? 1 : config.max_in_flight, [&](std::size_t i) {
        const auto& w = work[i];
        std::string candidate;
        if (mode == RunMode::Self) {
            candidate = w.reference;
        } else {
            const auto bundle = build_prompt(task, knowledge, w.inputs);
            std::string response;
            for (int attempt = 0;; ++attempt) {
                response = session->complete(bundle);
                try {
                    candidate = extract_artifact(response, bundle.artifact);
                    break;
                } catch (const BadArtifact&) {
                    if (attempt >= config.artifact_retries) {
                        write_file(path_in(root, run_dir + "/" + w.name + ".response.txt"), response);
                        throw;
                    }
                }
            }
            write_file(path_in(root, run_dir + "/" + w.name + ".response.txt"), response);
        }
        write_file(path_in(root, run_dir + "/" + w.name + (w.json ? ".json" : ".txt")), candidate);

        std::string cand = candidate;
        std::string ref = w.reference;
        if (w.json && canonical) {
            cand = canonicalize(cand, w.schema);
            ref = canonicalize(ref, w.schema);
        }
        if (!w.json) {
            cand = normalize_text(cand, config.normalization);
            ref = normalize_text(ref, config.normalization);
        }
        EvalItem item;
        item.name = w.name;
        if (tokenize(ref, config.metrics.tokenizer).empty()) {
            item.skipped = true;
        } else {
            item.scores = score_bundle(std::string_view(cand), std::string_view(ref), config.metrics);
        }
        items[i] = std::move(item);
    });
    return items;
}

std::string run_dir_for(RunMode mode, Knowledge knowledge, const std::string& task_dir) {
    return "runs/" + std::string(to_string(mode)) + "/" + std::string(to_string(knowledge)) + "/" +
           task_dir;
}

void push_row(std::vector<EvalRow>& rows, const char* label, Knowledge knowledge,
              std::vector<EvalItem> items) {
    const bool any = std::any_of(items.begin(), items.end(),
                                 [](const EvalItem& i) { return !i.skipped; });
    if (!any) {
        std::cerr << "note: " << label << " (" << to_string(knowledge)
                  << "): every reference is empty, row omitted\n";
        return;
    }
    EvalRow row;
    row.task = label;
    row.knowledge = knowledge;
    row.scores = average(items);
    row.items = std::move(items);
    rows.push_back(std::move(row));
}

int task_rank(const std::string& task) {
    const std::vector<std::string> order = {row_summary_single, row_summary_multiple, row_rules,
                                            row_grep};
    const auto it = std::find(order.begin(), order.end(), task);
    return static_cast<int>(it - order.begin());
}

std::vector<EvalRow> sorted_rows(const std::vector<EvalRow>& rows) {
    auto out = rows;
    std::stable_sort(out.begin(), out.end(), [](const EvalRow& a, const EvalRow& b) {
        const int ka = a.knowledge == Knowledge::Without ? 0 : 1;
        const int kb = b.knowledge == Knowledge::Without ? 0 : 1;
        if (ka != kb) {
            return ka < kb;
        }
        return task_rank(a.task) < task_rank(b.task);
    });
    return out;
}

} // namespace

// ---- configuration --------------------------------------------------------------

HarnessConfig HarnessConfig::from_json(const Json& value) {
    if (!value.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    HarnessConfig c;
    try {
        for (const auto& [key, v] : value.items()) {
            if (key == "endpoint") {
                c.session.endpoint = v.get<std::string>();
            } else if (key == "model") {
                c.session.model = v.get<std::string>();
            } else if (key == "temperature") {
                c.session.temperature = v.get<double>();
            } else if (key == "api_key_env") {
                c.session.api_key_env = v.get<std::string>();
            } else if (key == "max_retries") {
                c.session.max_retries = v.get<int>();
            } else if (key == "initial_backoff_ms") {
                c.session.initial_backoff = std::chrono::milliseconds(v.get<long long>());
            } else if (key == "max_backoff_ms") {
                c.session.max_backoff = std::chrono::milliseconds(v.get<long long>());
            } else if (key == "timeout_s") {
                c.session.timeout = std::chrono::seconds(v.get<long long>());
            } else if (key == "chunk_lines") {
                c.chunk_lines = v.get<std::size_t>();
            } else if (key == "window_start") {
                c.window_start = v.get<std::size_t>();
            } else if (key == "tokenizer") {
                c.metrics.tokenizer = parse_tokenizer(v.get<std::string>());
            } else if (key == "rouge_variant") {
                c.metrics.rouge_variant = parse_rouge_variant(v.get<std::string>());
            } else if (key == "max_n") {
                c.metrics.max_n = v.get<std::size_t>();
            } else if (key == "weights") {
                c.metrics.weights = v.get<std::vector<double>>();
            } else if (key == "normalization") {
                c.normalization = parse_normalization(v.get<std::string>());
            } else if (key == "canonicalize") {
                if (v.is_string() && v.get<std::string>() == "auto") {
                    c.canonicalize.reset();
                } else {
                    c.canonicalize = v.get<bool>();
                }
            } else if (key == "artifact_retries") {
                c.artifact_retries = v.get<int>();
            } else if (key == "max_in_flight") {
                c.max_in_flight = v.get<std::size_t>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (c.chunk_lines == 0) {
        throw ConfigError("chunk_lines must be positive");
    }
    if (c.session.max_retries < 0 || c.artifact_retries < 0) {
        throw ConfigError("retry counts must be non-negative");
    }
    if (c.max_in_flight == 0) {
        throw ConfigError("max_in_flight must be positive");
    }
    c.metrics.validate();
    return c;
}

HarnessConfig HarnessConfig::load(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    try {
        return from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path + " is not JSON: " + e.what());
    }
}

Json HarnessConfig::to_json() const {
    Json j{{"endpoint", session.endpoint},
           {"model", session.model},
           {"temperature", session.temperature},
           {"api_key_env", session.api_key_env},
           {"max_retries", session.max_retries},
           {"initial_backoff_ms", session.initial_backoff.count()},
           {"max_backoff_ms", session.max_backoff.count()},
           {"timeout_s", session.timeout.count()},
           {"chunk_lines", chunk_lines},
           {"window_start", window_start},
           {"tokenizer", to_string(metrics.tokenizer)},
           {"rouge_variant", to_string(metrics.rouge_variant)},
           {"max_n", metrics.max_n},
           {"weights", metrics.weights},
           {"normalization", to_string(normalization)}};
    j["canonicalize"] = canonicalize ? Json(*canonicalize) : Json("auto");
    j["artifact_retries"] = artifact_retries;
    j["max_in_flight"] = max_in_flight;
    return j;
}

// ---- canonical JSON -------------------------------------------------------------

std::string canonicalize(std::string_view json_text, Schema schema) {
    Json value;
    try {
        value = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw BadArtifact(std::string("artifact is not JSON: ") + e.what());
    }
    switch (schema) {
    case Schema::Detections:
        value = value.is_object() && value.contains("datetime")
                    ? reorder(value, detection_fields)
                    : map_entries(value, [](const Json& e) { return reorder(e, detection_fields); });
        break;
    case Schema::Summary:
        value = is_event_object(value) ? canonical_event(value)
                                       : map_entries(value, canonical_event);
        break;
    case Schema::Generic:
        break;
    }
    return canonical_dump(value);
}

RunMode parse_run_mode(std::string_view name) {
    if (name == "self") return RunMode::Self;
    if (name == "replay") return RunMode::Replay;
    if (name == "live") return RunMode::Live;
    throw ConfigError("unknown mode '" + std::string(name) + "' (self, replay, live)");
}

std::string_view to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Self: return "self";
    case RunMode::Replay: return "replay";
    case RunMode::Live: return "live";
    }
    return "self";
}

// ---- rows -----------------------------------------------------------------------

Json rows_to_json(const std::vector<EvalRow>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json items = Json::array();
        for (const auto& item : row.items) {
            Json j{{"name", item.name}, {"skipped", item.skipped}};
            if (!item.skipped) {
                j["scores"] = bundle_to_json(item.scores);
            }
            items.push_back(j);
        }
        out.push_back(Json{{"task", row.task},
                           {"knowledge", to_string(row.knowledge)},
                           {"scores", bundle_to_json(row.scores)},
                           {"items", items}});
    }
    return out;
}

std::vector<EvalRow> rows_from_json(const Json& value) {
    std::vector<EvalRow> rows;
    try {
        for (const auto& j : value) {
            EvalRow row;
            row.task = j.at("task").get<std::string>();
            row.knowledge = parse_knowledge(j.at("knowledge").get<std::string>());
            row.scores = bundle_from_json(j.at("scores"));
            for (const auto& i : j.value("items", Json::array())) {
                EvalItem item;
                item.name = i.at("name").get<std::string>();
                item.skipped = i.value("skipped", false);
                if (!item.skipped) {
                    item.scores = bundle_from_json(i.at("scores"));
                }
                row.items.push_back(std::move(item));
            }
            rows.push_back(std::move(row));
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed results file: ") + e.what());
    }
    return rows;
}

// ---- workspace and truth --------------------------------------------------------

void init_workspace(const std::string& root, const std::string& timeline_csv,
                    const RuleSet& rules) {
    write_file(path_in(root, "timeline.csv"), timeline_csv);
    write_file(path_in(root, "rules.json"), canonical_dump(rules_to_json(rules)));
}

void gen_ground_truth(const std::string& root, const HarnessConfig& config,
                      std::optional<Task> task) {
    if (task == Task::Eda) {
        throw ConfigError("the eda task has no ground truth");
    }
    Manifest manifest;
    const auto window = load_window(root, config, manifest);
    manifest.presets = preset_patterns();
    write_file(path_in(root, "truth/window.csv"), serialize(window));

    if (!task || *task == Task::Grep) {
        for (const auto& preset : manifest.presets) {
            const SearchPattern pattern(preset.expression);
            write_file(path_in(root, "truth/grep/" + preset.name + ".txt"),
                       format_grep_output(grep_timeline(window, pattern)));
        }
    }
    if (!task || *task == Task::Rules) {
        const auto rules = load_rules(require_file(root, "rules.json"));
        write_file(path_in(root, "truth/detections.json"),
                   canonical_dump(detections_to_json(detect(window, rules))));
    }
    if (!task || *task == Task::Summarize) {
        write_file(path_in(root, "truth/summary/all.json"), serialize_summary(summarize(window)));
        for (const auto& spec : list_analyzers()) {
            const auto events = summarize(window, spec.slug);
            write_file(path_in(root, "truth/summary/" + spec.slug + ".json"),
                       serialize_summary(events));
            if (!events.empty()) {
                manifest.summary_types.push_back(spec.slug);
            }
        }
    } else if (fs::exists(path_in(root, "truth/manifest.json"))) {
        manifest.summary_types = load_manifest(root).summary_types;
    }
    write_file(path_in(root, "truth/manifest.json"), canonical_dump(manifest_to_json(manifest)));
}

// ---- runs -----------------------------------------------------------------------

std::vector<EvalRow> run_task(const std::string& root, Task task, Knowledge knowledge,
                              RunMode mode, const HarnessConfig& config, LlmSession* session) {
    if (mode != RunMode::Self && session == nullptr) {
        throw ConfigError("replay and live runs need an LLM session");
    }
    const auto manifest = load_manifest(root);
    const auto window_csv = require_file(root, "truth/window.csv");
    PromptInputs base;
    base.timeline_csv = window_csv;
    base.line_budget = config.chunk_lines;

    std::vector<EvalRow> rows;
    switch (task) {
    case Task::Grep: {
        std::vector<WorkItem> work;
        for (const auto& preset : manifest.presets) {
            WorkItem w;
            w.name = preset.name;
            w.reference = require_file(root, "truth/grep/" + preset.name + ".txt");
            w.inputs = base;
            w.inputs.pattern = preset.expression;
            w.inputs.pattern_purpose = preset.purpose;
            work.push_back(std::move(w));
        }
        push_row(rows, row_grep, knowledge,
                 score_items(root, run_dir_for(mode, knowledge, "grep"), task, knowledge, mode,
                             config, session, work));
        break;
    }
    case Task::Rules: {
        WorkItem w;
        w.name = "detections";
        w.reference = require_file(root, "truth/detections.json");
        w.inputs = base;
        w.inputs.rules_json = require_file(root, "rules.json");
        w.schema = Schema::Detections;
        w.json = true;
        push_row(rows, row_rules, knowledge,
                 score_items(root, run_dir_for(mode, knowledge, "rules"), task, knowledge, mode,
                             config, session, {w}));
        break;
    }
    case Task::Summarize: {
        std::vector<WorkItem> single;
        for (const auto& slug : manifest.summary_types) {
            WorkItem w;
            w.name = slug;
            w.reference = require_file(root, "truth/summary/" + slug + ".json");
            w.inputs = base;
            w.inputs.event_type = slug;
            w.schema = Schema::Summary;
            w.json = true;
            single.push_back(std::move(w));
        }
        push_row(rows, row_summary_single, knowledge,
                 score_items(root, run_dir_for(mode, knowledge, "summarize-single"), task,
                             knowledge, mode, config, session, single));
        WorkItem all;
        all.name = "all";
        all.reference = require_file(root, "truth/summary/all.json");
        all.inputs = base;
        all.schema = Schema::Summary;
        all.json = true;
        push_row(rows, row_summary_multiple, knowledge,
                 score_items(root, run_dir_for(mode, knowledge, "summarize-multiple"), task,
                             knowledge, mode, config, session, {all}));
        break;
    }
    case Task::Eda: {
        const auto dir = run_dir_for(mode, knowledge, "eda");
        if (mode == RunMode::Self) {
            const auto window = parse_timeline(window_csv, ParseMode::Strict).timeline;
            write_file(path_in(root, dir + "/histogram.csv"),
                       histogram_to_csv(per_second_histogram(window)));
            write_file(path_in(root, dir + "/transitions.csv"),
                       transitions_to_csv(transition_matrix(window)));
        } else {
            const auto bundle = build_prompt(Task::Eda, knowledge, base);
            const auto response = session->complete(bundle);
            write_file(path_in(root, dir + "/histogram.response.txt"), response);
            write_file(path_in(root, dir + "/histogram.csv"),
                       extract_artifact(response, ArtifactKind::Text));
        }
        break;
    }
    }
    return rows;
}

std::vector<EvalRow> run_plan(const std::string& root, const RunPlan& plan,
                              const HarnessConfig& config) {
    std::unique_ptr<LlmSession> session;
    if (plan.mode != RunMode::Self) {
        if (plan.transcript_path.empty()) {
            throw ConfigError("replay and live runs need a transcript path");
        }
        std::vector<TranscriptEntry> transcript;
        if (fs::exists(plan.transcript_path)) {
            try {
                transcript = transcript_from_json(Json::parse(read_file(plan.transcript_path)));
            } catch (const Json::exception& e) {
                throw ConfigError("transcript " + plan.transcript_path + " is not valid: " +
                                  e.what());
            }
        } else if (plan.mode == RunMode::Replay) {
            throw ConfigError("transcript " + plan.transcript_path + " does not exist");
        }
        session = std::make_unique<LlmSession>(
            config.session,
            plan.mode == RunMode::Live ? SessionMode::Live : SessionMode::Replay,
            std::move(transcript));
    }

    const auto save_transcript = [&] {
        if (plan.mode == RunMode::Live && session) {
            write_file(plan.transcript_path, canonical_dump(transcript_to_json(session->transcript())));
        }
    };

    std::vector<EvalRow> rows;
    try {
        for (const auto knowledge : plan.knowledge) {
            for (const auto task : plan.tasks) {
                auto part = run_task(root, task, knowledge, plan.mode, config, session.get());
                rows.insert(rows.end(), part.begin(), part.end());
            }
        }
    } catch (...) {
        save_transcript();
        throw;
    }
    save_transcript();

    rows = sorted_rows(rows);
    const auto base = "runs/" + std::string(to_string(plan.mode)) + "/";
    write_file(path_in(root, base + "results.json"), canonical_dump(rows_to_json(rows)));
    write_file(path_in(root, base + "report.txt"), report_text(rows));
    write_file(path_in(root, base + "report.json"), canonical_dump(report_json(rows)));
    return rows;
}

// ---- report ---------------------------------------------------------------------

std::string report_text(const std::vector<EvalRow>& rows) {
    const auto ordered = sorted_rows(rows);
    const int width = 34;
    std::string out;
    const auto line = [&](const std::string& task, const std::vector<std::string>& cells) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-*s %7s %8s %8s %8s %11s\n", width, task.c_str(),
                      cells[0].c_str(), cells[1].c_str(), cells[2].c_str(), cells[3].c_str(),
                      cells[4].c_str());
        out += buf;
    };
    line("Task", {"BLEU", "ROUGE-1", "ROUGE-2", "ROUGE-L", "Mean score"});
    out += std::string(width + 48, '-') + "\n";
    for (const auto knowledge : {Knowledge::Without, Knowledge::With}) {
        bool header = false;
        for (const auto& row : ordered) {
            if (row.knowledge != knowledge) {
                continue;
            }
            if (!header) {
                out += knowledge == Knowledge::Without ? "Without additional knowledge\n"
                                                       : "With additional knowledge\n";
                header = true;
            }
            const auto& s = row.scores;
            line(row.task, {fixed3(s.bleu), fixed3(s.rouge1), fixed3(s.rouge2), fixed3(s.rougeL),
                            fixed3(s.mean)});
        }
    }
    return out;
}

Json report_json(const std::vector<EvalRow>& rows) {
    Json sections = Json::array();
    for (const auto knowledge : {Knowledge::Without, Knowledge::With}) {
        Json list = Json::array();
        for (const auto& row : sorted_rows(rows)) {
            if (row.knowledge != knowledge) {
                continue;
            }
            const auto& s = row.scores;
            list.push_back(Json{{"task", row.task},
                                {"scores", bundle_to_json(s)},
                                {"display",
                                 Json{{"bleu", fixed3(s.bleu)},
                                      {"rouge1", fixed3(s.rouge1)},
                                      {"rouge2", fixed3(s.rouge2)},
                                      {"rougeL", fixed3(s.rougeL)},
                                      {"mean", fixed3(s.mean)}}}});
        }
        if (!list.empty()) {
            sections.push_back(Json{{"knowledge", to_string(knowledge)}, {"rows", list}});
        }
    }
    return Json{{"columns", Json::array({"Task", "BLEU", "ROUGE-1", "ROUGE-2", "ROUGE-L",
                                         "Mean score"})},
                {"sections", sections}};
}

} // namespace tleval
