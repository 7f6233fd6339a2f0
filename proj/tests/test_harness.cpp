#include "mock_llm.hpp"
#include "support.hpp"

#include "tleval/forge.hpp"
#include "tleval/harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace tleval;
namespace fs = std::filesystem;

namespace {

void forged_workspace(const support::ScratchDir& dir, std::uint64_t seed = 4,
                      std::size_t noise = 600) {
    const auto result = forge(reference_scenario(seed, noise, 60));
    init_workspace(dir.str(), result.csv, result.rules);
}

HarnessConfig mock_harness(const mock::Server& server) {
    HarnessConfig c;
    c.session.endpoint = server.endpoint();
    c.session.model = "mock-model";
    c.session.api_key_env = "TLEVAL_TEST_KEY";
    c.session.initial_backoff = std::chrono::milliseconds(1);
    c.session.max_backoff = std::chrono::milliseconds(2);
    return c;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("canonical form fixes field order and is idempotent") {
    const std::string messy =
        R"([{"message": "m \"q\" \\ path", "keyword": "k", "datetime": "d", "event": "e", "extra": 1}])";
    const auto c = canonicalize(messy, Schema::Detections);
    CHECK(c ==
          "[\n  {\n    \"datetime\": \"d\",\n    \"event\": \"e\",\n    \"keyword\": \"k\",\n"
          "    \"message\": \"m \\\"q\\\" \\\\ path\",\n    \"extra\": 1\n  }\n]\n");
    CHECK(canonicalize(c, Schema::Detections) == c);
    CHECK_THROWS_AS(canonicalize("not json", Schema::Generic), BadArtifact);

    const std::string summary =
        R"({"0": {"trigger": {"reason": "r", "datetime": "d"}, "id": 1, "supporting": [{"parser": "p", "datetime": "d"}]}})";
    const auto s = canonicalize(summary, Schema::Summary);
    CHECK(s.find("\"id\"") < s.find("\"supporting\""));
    CHECK(s.find("\"supporting\"") < s.find("\"trigger\""));
    CHECK(s.find("\"datetime\": \"d\",\n        \"parser\"") != std::string::npos);
    CHECK(canonicalize(s, Schema::Summary) == s);
}

TEST_CASE("property: canonicalize(parse(canonicalize(x))) == canonicalize(x)") {
    std::mt19937_64 rng(8);
    const std::vector<std::string> words = {"datetime", "event", "keyword", "message", "x", "y\\z",
                                            "\"", "\xC3\xA9", "\t", "id", "trigger"};
    for (int i = 0; i < 200; ++i) {
        Json arr = Json::array();
        const auto n = rng() % 4;
        for (std::size_t k = 0; k < n; ++k) {
            Json obj = Json::object();
            const auto fields = rng() % 6;
            for (std::size_t f = 0; f < fields; ++f) {
                obj[words[rng() % words.size()]] =
                    rng() % 2 ? Json(words[rng() % words.size()]) : Json(static_cast<int>(rng() % 100));
            }
            arr.push_back(obj);
        }
        for (const auto schema : {Schema::Detections, Schema::Summary, Schema::Generic}) {
            const auto once = canonicalize(arr.dump(), schema);
            CHECK(canonicalize(once, schema) == once);
        }
    }
}

TEST_CASE("config file parsing") {
    const auto c = HarnessConfig::from_json(Json::parse(
        R"({"model": "local", "chunk_lines": 500, "tokenizer": "whitespace",
            "rouge_variant": "f1", "normalization": "both", "canonicalize": true})"));
    CHECK(c.session.model == "local");
    CHECK(c.chunk_lines == 500);
    CHECK(c.metrics.tokenizer == Tokenizer::Whitespace);
    CHECK(c.metrics.rouge_variant == RougeVariant::F1);
    CHECK(c.normalization == Normalization::Both);
    CHECK(c.canonicalize == true);
    CHECK(HarnessConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS_AS(HarnessConfig::from_json(Json::parse(R"({"modle": "x"})")), ConfigError);
    CHECK_THROWS_AS(HarnessConfig::from_json(Json::parse(R"({"chunk_lines": "many"})")), ConfigError);
    CHECK_THROWS_AS(HarnessConfig::from_json(Json::parse(R"({"chunk_lines": 0})")), ConfigError);
    CHECK_THROWS_AS(HarnessConfig::from_json(Json::parse(R"({"weights": [0.9, 0.9]})")), ConfigError);
    CHECK_THROWS_AS(HarnessConfig::load("/nonexistent/config.json"), ConfigError);
    // The API key itself is never a config field.
    CHECK_FALSE(c.to_json().dump().find("sk-") != std::string::npos);
}

TEST_CASE("report rendering") {
    EvalRow grep;
    grep.task = row_grep;
    grep.knowledge = Knowledge::Without;
    grep.scores = MetricBundle::from_scores(0.847, 1.0, 1.0, 1.0);
    const auto text = report_text({grep});
    CHECK(text.find("Without additional knowledge") != std::string::npos);
    CHECK(text.find("With additional knowledge") == std::string::npos);
    CHECK(text.find("0.847    1.000    1.000    1.000       0.962") != std::string::npos);

    const auto empty = report_text({});
    CHECK(empty.find("Task") == 0);
    CHECK(std::count(empty.begin(), empty.end(), '\n') == 2);

    const auto j = report_json({grep});
    CHECK(j["sections"][0]["rows"][0]["display"]["mean"] == "0.962");
    CHECK(j["sections"][0]["rows"][0]["scores"]["mean"].get<double>() == doctest::Approx(0.96175));
    CHECK(rows_from_json(rows_to_json({grep}))[0].scores.mean == doctest::Approx(0.96175));
}

TEST_CASE("ground truth matches system grep and the library") {
    const support::ScratchDir dir("truth");
    forged_workspace(dir);
    HarnessConfig config;
    gen_ground_truth(dir.str(), config);
    const auto window = read_file(dir / "truth/window.csv");
    for (const auto& p : preset_patterns()) {
        CHECK(read_file(dir / ("truth/grep/" + p.name + ".txt")) == support::system_grep(window, p.expression, dir));
    }
    const auto t = parse_timeline(window).timeline;
    CHECK(read_file(dir / "truth/summary/all.json") == serialize_summary(summarize(t)));
    CHECK(read_file(dir / "truth/summary/last-shutdown.json") ==
          serialize_summary(summarize(t, "last-shutdown")));
    CHECK(Json::parse(read_file(dir / "truth/detections.json")) ==
          detections_to_json(detect(t, default_rules())));
    CHECK_THROWS_AS(gen_ground_truth(dir.str(), config, Task::Eda), ConfigError);
}

TEST_CASE("the truth window honours the chunk size") {
    const support::ScratchDir dir("window");
    forged_workspace(dir, 4, 3000);
    HarnessConfig config;
    config.window_start = 100;
    gen_ground_truth(dir.str(), config);
    const auto manifest = Json::parse(read_file(dir / "truth/manifest.json"));
    CHECK(manifest["window_start"] == 100);
    CHECK(manifest["window_rows"] == 2000);
    CHECK(parse_timeline(read_file(dir / "truth/window.csv")).timeline.size() == 2000);
    config.window_start = 999999;
    CHECK_THROWS_AS(gen_ground_truth(dir.str(), config), ConfigError);
}

TEST_CASE("self mode scores every task perfectly") {
    const support::ScratchDir dir("self");
    forged_workspace(dir);
    HarnessConfig config;
    gen_ground_truth(dir.str(), config);
    const auto rows = run_plan(dir.str(), RunPlan{}, config);
    CHECK(rows.size() == 8);
    for (const auto& row : rows) {
        CAPTURE(row.task);
        CHECK(row.scores.bleu >= 0.999);
        CHECK(row.scores.rouge1 == 1.0);
        CHECK(row.scores.rouge2 == 1.0);
        CHECK(row.scores.rougeL == 1.0);
        CHECK(row.scores.mean ==
              doctest::Approx((row.scores.bleu + row.scores.rouge1 + row.scores.rouge2 + row.scores.rougeL) / 4));
    }
    CHECK(fs::exists(dir.path() / "runs/self/report.txt"));
    CHECK(fs::exists(dir.path() / "runs/self/with/eda/histogram.csv"));
    CHECK(fs::exists(dir.path() / "runs/self/without/summarize-single/process-creation.json"));
}

TEST_CASE("runs need truth, and replay needs a transcript") {
    const support::ScratchDir dir("missing");
    forged_workspace(dir);
    HarnessConfig config;
    CHECK_THROWS_AS(run_task(dir.str(), Task::Grep, Knowledge::With, RunMode::Self, config), EvaluationError);
    gen_ground_truth(dir.str(), config);
    RunPlan plan;
    plan.mode = RunMode::Replay;
    plan.transcript_path = dir / "absent.json";
    CHECK_THROWS_AS(run_plan(dir.str(), plan, config), ConfigError);
    write_file(plan.transcript_path, "[]");
    CHECK_THROWS_AS(run_plan(dir.str(), plan, config), ReplayMiss);
}

TEST_CASE("live run against a local endpoint, then replay reproduces it") {
    ::setenv("TLEVAL_TEST_KEY", "sk-live-test", 1);
    const support::ScratchDir dir("live");
    forged_workspace(dir);
    mock::Server server;
    const auto config = mock_harness(server);
    gen_ground_truth(dir.str(), config);

    RunPlan live;
    live.mode = RunMode::Live;
    live.transcript_path = dir / "transcript.json";
    const auto live_rows = run_plan(dir.str(), live, config);
    CHECK(live_rows.size() == 8);
    const auto transcript_text = read_file(live.transcript_path);
    CHECK(transcript_text.find("sk-live-test") == std::string::npos);
    const auto requests = server.request_count();
    CHECK(requests == transcript_from_json(Json::parse(transcript_text)).size());

    for (const auto& row : live_rows) {
        if (row.knowledge == Knowledge::With) {
            CAPTURE(row.task);
            CHECK(row.scores.rouge1 == 1.0);
        }
    }

    RunPlan replay = live;
    replay.mode = RunMode::Replay;
    const auto replay_rows = run_plan(dir.str(), replay, config);
    CHECK(server.request_count() == requests);
    CHECK(canonical_dump(rows_to_json(replay_rows)) == canonical_dump(rows_to_json(live_rows)));
}

TEST_CASE("a response without an artifact is retried, then reported") {
    ::setenv("TLEVAL_TEST_KEY", "k", 1);
    const support::ScratchDir dir("badartifact");
    forged_workspace(dir);
    std::atomic<int> calls{0};
    mock::Server server([&](const Json& request) -> std::pair<int, std::string> {
        if (calls++ == 0) {
            return {200, mock::Server::completion("I could not produce the file.")};
        }
        return {200, mock::Server::completion(mock::answer(request["messages"][0]["content"].get<std::string>()))};
    });
    auto config = mock_harness(server);
    gen_ground_truth(dir.str(), config);
    LlmSession session(config.session, SessionMode::Live);
    const auto rows = run_task(dir.str(), Task::Rules, Knowledge::With, RunMode::Live, config, &session);
    REQUIRE(rows.size() == 1);
    CHECK(calls == 2);
    CHECK(rows[0].scores.rouge1 == 1.0);

    mock::Server prose([](const Json&) -> std::pair<int, std::string> {
        return {200, mock::Server::completion("Sorry.")};
    });
    auto c2 = mock_harness(prose);
    LlmSession s2(c2.session, SessionMode::Live);
    CHECK_THROWS_AS(run_task(dir.str(), Task::Rules, Knowledge::With, RunMode::Live, c2, &s2), BadArtifact);
}

} // TEST_SUITE
