// Command-line front end: forge, truth, run, score, report, eda, grep, summarize, detect.
//
// Exit codes: 0 success, 1 evaluation error, 2 configuration or input error.

#include "tleval/eda.hpp"
#include "tleval/forge.hpp"
#include "tleval/harness.hpp"
#include "tleval/metrics.hpp"
#include "tleval/rules.hpp"
#include "tleval/search.hpp"
#include "tleval/summarizer.hpp"
#include "tleval/timeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace tleval;

namespace {

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

HarnessConfig config_from(const std::string& path) {
    return path.empty() ? HarnessConfig{} : HarnessConfig::load(path);
}

Schema parse_schema(const std::string& name) {
    if (name == "detections") return Schema::Detections;
    if (name == "summary") return Schema::Summary;
    if (name == "generic") return Schema::Generic;
    throw ConfigError("unknown schema '" + name + "' (detections, summary, generic)");
}

const PresetPattern* find_preset(const std::string& name) {
    for (const auto& p : preset_patterns()) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timeline analysis toolkit and LLM evaluation harness"};
    app.require_subcommand(1);

    // forge
    auto* forge_cmd = app.add_subcommand("forge", "Generate a synthetic timeline with planted events");
    std::string forge_spec, forge_out;
    bool forge_reference = false;
    std::uint64_t forge_seed = 7;
    std::size_t forge_noise = 1500, forge_bait = 80;
    forge_cmd->add_option("--spec", forge_spec, "Scenario spec JSON");
    forge_cmd->add_flag("--reference", forge_reference,
                        "Use the built-in scenario (one event of each type) instead of --spec");
    forge_cmd->add_option("--seed", forge_seed, "Seed for --reference");
    forge_cmd->add_option("--noise", forge_noise, "Noise rows for --reference");
    forge_cmd->add_option("--bait", forge_bait, "Bait rows for --reference");
    forge_cmd->add_option("--out-dir", forge_out, "Output directory")->required();

    // truth
    auto* truth_cmd = app.add_subcommand("truth", "Build ground truth for a workspace");
    std::string truth_ws, truth_task, truth_config, truth_timeline, truth_rules;
    truth_cmd->add_option("--workspace", truth_ws, "Workspace directory")->required();
    truth_cmd->add_option("--task", truth_task, "grep, rules or summarize (default: all)");
    truth_cmd->add_option("--timeline", truth_timeline, "Import this timeline into the workspace");
    truth_cmd->add_option("--rules", truth_rules, "Import this rule file into the workspace");
    truth_cmd->add_option("--config", truth_config, "Harness config JSON");

    // run
    auto* run_cmd = app.add_subcommand("run", "Run and score tasks");
    std::string run_ws, run_mode = "self", run_task_name = "all", run_knowledge = "both",
                        run_config, run_transcript;
    run_cmd->add_option("--workspace", run_ws, "Workspace directory")->required();
    run_cmd->add_option("--mode", run_mode, "self, replay or live");
    run_cmd->add_option("--task", run_task_name, "grep, rules, summarize, eda or all");
    run_cmd->add_option("--knowledge", run_knowledge, "with, without or both");
    run_cmd->add_option("--config", run_config, "Harness config JSON");
    run_cmd->add_option("--transcript", run_transcript,
                        "Transcript file (default: <workspace>/transcript.json)");

    // score
    auto* score_cmd = app.add_subcommand("score", "Score a candidate file against a reference");
    std::string score_candidate, score_reference, score_rouge = "recall", score_tokenizer = "alnum-lower",
                                                  score_schema, score_norm = "none", score_out;
    std::size_t score_max_n = 4;
    bool score_details = false;
    score_cmd->add_option("--candidate", score_candidate, "Candidate file")->required();
    score_cmd->add_option("--reference", score_reference, "Reference file")->required();
    score_cmd->add_option("--rouge", score_rouge, "recall or f1");
    score_cmd->add_option("--max-n", score_max_n, "Highest BLEU n-gram order");
    score_cmd->add_option("--tokenizer", score_tokenizer, "alnum-lower or whitespace");
    score_cmd->add_option("--canonical", score_schema,
                          "Canonicalize both JSON files first (detections, summary, generic)");
    score_cmd->add_option("--normalize", score_norm, "none, collapse-spaces, strip-commas or both");
    score_cmd->add_flag("--details", score_details, "Include n-gram counts");
    score_cmd->add_option("--out", score_out, "Output file (default stdout)");

    // report
    auto* report_cmd = app.add_subcommand("report", "Render a results file as a table");
    std::string report_results, report_out;
    bool report_as_json = false;
    report_cmd->add_option("--results", report_results, "results.json from a run")->required();
    report_cmd->add_flag("--json", report_as_json, "Emit JSON instead of text");
    report_cmd->add_option("--out", report_out, "Output file (default stdout)");

    // eda
    auto* eda_cmd = app.add_subcommand("eda", "Exploratory aggregations");
    std::string eda_kind, eda_timeline, eda_out, eda_svg;
    eda_cmd->add_option("kind", eda_kind, "histogram or transitions")
        ->required()
        ->check(CLI::IsMember({"histogram", "transitions"}));
    eda_cmd->add_option("--timeline", eda_timeline, "Timeline CSV")->required();
    eda_cmd->add_option("--out", eda_out, "Output .json or .csv")->required();
    eda_cmd->add_option("--svg", eda_svg, "Also write an SVG chart");

    // grep
    auto* grep_cmd = app.add_subcommand("grep", "Extended-regex line search");
    std::string grep_pattern, grep_preset, grep_timeline_path, grep_out;
    bool grep_list = false;
    grep_cmd->add_option("--pattern", grep_pattern, "Extended regular expression");
    grep_cmd->add_option("--preset", grep_preset, "Named preset pattern");
    grep_cmd->add_flag("--list-presets", grep_list, "Print the preset patterns");
    grep_cmd->add_option("--timeline", grep_timeline_path, "Timeline CSV");
    grep_cmd->add_option("--out", grep_out, "Output file (default stdout)");

    // summarize
    auto* sum_cmd = app.add_subcommand("summarize", "Reconstruct high-level events");
    std::string sum_in, sum_out, sum_type = "all";
    bool sum_list = false;
    sum_cmd->add_option("-i,--input", sum_in, "Timeline CSV");
    sum_cmd->add_option("-o,--output", sum_out, "Summary JSON (default stdout)");
    sum_cmd->add_option("-t,--type", sum_type, "Event type slug or name (default: all)");
    sum_cmd->add_flag("--list-types", sum_list, "Print the supported event types");

    // detect
    auto* det_cmd = app.add_subcommand("detect", "Keyword rule detection");
    std::string det_timeline, det_rules, det_out;
    det_cmd->add_option("--timeline", det_timeline, "Timeline CSV")->required();
    det_cmd->add_option("--rules", det_rules, "Rules JSON (default: shipped rules)");
    det_cmd->add_option("--out", det_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*forge_cmd) {
            if (forge_reference == !forge_spec.empty()) {
                throw ConfigError("give exactly one of --spec and --reference");
            }
            const auto spec = forge_reference
                                  ? reference_scenario(forge_seed, forge_noise, forge_bait)
                                  : scenario_from_json(Json::parse(read_file(forge_spec)));
            const auto result = forge(spec);
            const auto dir = fs::path(forge_out);
            write_file((dir / "timeline.csv").string(), result.csv);
            write_file((dir / "rules.json").string(), canonical_dump(rules_to_json(result.rules)));
            write_file((dir / "scenario.json").string(), canonical_dump(scenario_to_json(spec)));
            write_file((dir / "expected/summary.json").string(),
                       serialize_summary(result.expected_events));
            write_file((dir / "expected/detections.json").string(),
                       canonical_dump(detections_to_json(result.expected_detections)));
            for (std::size_t i = 0; i < preset_patterns().size(); ++i) {
                write_file((dir / "expected/grep" / (preset_patterns()[i].name + ".txt")).string(),
                           result.grep_outputs[i]);
            }
            std::cout << "forged " << result.timeline.size() << " rows with "
                      << result.expected_events.size() << " planted events into " << forge_out
                      << "\n";
        } else if (*truth_cmd) {
            const auto config = config_from(truth_config);
            if (!truth_timeline.empty() || !truth_rules.empty()) {
                const auto csv = truth_timeline.empty()
                                     ? read_file((fs::path(truth_ws) / "timeline.csv").string())
                                     : read_file(truth_timeline);
                const auto rules =
                    truth_rules.empty() ? default_rules() : load_rules(read_file(truth_rules));
                init_workspace(truth_ws, csv, rules);
            } else if (!fs::exists(fs::path(truth_ws) / "rules.json")) {
                write_file((fs::path(truth_ws) / "rules.json").string(),
                           canonical_dump(rules_to_json(default_rules())));
            }
            std::optional<Task> task;
            if (!truth_task.empty() && truth_task != "all") {
                task = parse_task(truth_task);
            }
            gen_ground_truth(truth_ws, config, task);
            std::cout << "ground truth written to " << (fs::path(truth_ws) / "truth").string()
                      << "\n";
        } else if (*run_cmd) {
            const auto config = config_from(run_config);
            RunPlan plan;
            plan.mode = parse_run_mode(run_mode);
            if (run_task_name != "all") {
                plan.tasks = {parse_task(run_task_name)};
            }
            if (run_knowledge != "both") {
                plan.knowledge = {parse_knowledge(run_knowledge)};
            }
            plan.transcript_path = run_transcript.empty()
                                       ? (fs::path(run_ws) / "transcript.json").string()
                                       : run_transcript;
            const auto rows = run_plan(run_ws, plan, config);
            std::cout << report_text(rows);
        } else if (*score_cmd) {
            MetricConfig cfg;
            cfg.max_n = score_max_n;
            cfg.rouge_variant = parse_rouge_variant(score_rouge);
            cfg.tokenizer = parse_tokenizer(score_tokenizer);
            cfg.validate();
            auto candidate = read_file(score_candidate);
            auto reference = read_file(score_reference);
            if (!score_schema.empty()) {
                const auto schema = parse_schema(score_schema);
                candidate = canonicalize(candidate, schema);
                reference = canonicalize(reference, schema);
            }
            const auto norm = parse_normalization(score_norm);
            candidate = normalize_text(candidate, norm);
            reference = normalize_text(reference, norm);
            const auto m = score_bundle(std::string_view(candidate), std::string_view(reference), cfg);
            Json out{{"bleu", m.bleu},
                     {"rouge1", m.rouge1},
                     {"rouge2", m.rouge2},
                     {"rougeL", m.rougeL},
                     {"mean", m.mean}};
            if (score_details) {
                const auto b = bleu(std::string_view(candidate), std::string_view(reference), cfg);
                out["details"] = Json{{"precisions", b.precisions},
                                      {"matches", b.matches},
                                      {"totals", b.totals},
                                      {"bp", b.bp},
                                      {"candidate_len", b.candidate_len},
                                      {"reference_len", b.reference_len}};
            }
            emit(score_out, canonical_dump(out));
        } else if (*report_cmd) {
            const auto rows = rows_from_json(Json::parse(read_file(report_results)));
            emit(report_out, report_as_json ? canonical_dump(report_json(rows)) : report_text(rows));
        } else if (*eda_cmd) {
            const auto timeline = load_timeline(eda_timeline);
            const bool csv = ends_with(eda_out, ".csv");
            if (eda_kind == "histogram") {
                const auto h = per_second_histogram(timeline);
                write_file(eda_out, csv ? histogram_to_csv(h) : canonical_dump(histogram_to_json(h)));
                if (!eda_svg.empty()) {
                    write_file(eda_svg, histogram_to_svg(h));
                }
            } else {
                const auto m = transition_matrix(timeline);
                write_file(eda_out, csv ? transitions_to_csv(m) : canonical_dump(transitions_to_json(m)));
                if (!eda_svg.empty()) {
                    write_file(eda_svg, transitions_to_svg(m));
                }
            }
        } else if (*grep_cmd) {
            if (grep_list) {
                for (const auto& p : preset_patterns()) {
                    std::cout << p.name << "\t" << p.expression << "\t" << p.purpose << "\n";
                }
                return 0;
            }
            if (grep_pattern.empty() == grep_preset.empty()) {
                throw ConfigError("give exactly one of --pattern and --preset");
            }
            if (grep_timeline_path.empty()) {
                throw ConfigError("--timeline is required");
            }
            std::string expression = grep_pattern;
            if (!grep_preset.empty()) {
                const auto* preset = find_preset(grep_preset);
                if (preset == nullptr) {
                    throw ConfigError("unknown preset '" + grep_preset + "'");
                }
                expression = preset->expression;
            }
            const SearchPattern pattern(expression);
            const auto timeline = load_timeline(grep_timeline_path);
            emit(grep_out, format_grep_output(grep_timeline(timeline, pattern)));
        } else if (*sum_cmd) {
            if (sum_list) {
                for (const auto& spec : list_analyzers()) {
                    std::cout << spec.slug << "\t" << spec.name << "\t" << to_string(spec.category)
                              << "\n";
                }
                return 0;
            }
            if (sum_in.empty()) {
                throw ConfigError("-i/--input is required");
            }
            const auto timeline = load_timeline(sum_in);
            emit(sum_out, serialize_summary(summarize(timeline, sum_type)));
        } else if (*det_cmd) {
            const auto timeline = load_timeline(det_timeline);
            const auto rules = det_rules.empty() ? default_rules() : load_rules(read_file(det_rules));
            emit(det_out, canonical_dump(detections_to_json(detect(timeline, rules))));
        }
    } catch (const EvaluationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: invalid JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
