#include "support.hpp"

#include "tleval/json_text.hpp"

#include <doctest.h>

using namespace tleval;
namespace fs = std::filesystem;

namespace {

std::string cli() { return TLEVAL_CLI_PATH; }

support::CommandResult tleval_cmd(const std::string& args) {
    return support::run(cli() + " " + args + " 2>/dev/null");
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("forge, truth, run and report from the command line") {
    const support::ScratchDir dir("cli");
    const auto ws = dir.str();
    REQUIRE(tleval_cmd("forge --reference --seed 3 --noise 300 --bait 40 --out-dir " + ws).exit_code == 0);
    CHECK(fs::exists(dir.path() / "timeline.csv"));
    CHECK(fs::exists(dir.path() / "expected/summary.json"));
    CHECK(fs::exists(dir.path() / "expected/grep/time-change.txt"));

    REQUIRE(tleval_cmd("truth --workspace " + ws).exit_code == 0);
    CHECK(read_file(dir / "truth/grep/time-change.txt") == read_file(dir / "expected/grep/time-change.txt"));

    const auto run = tleval_cmd("run --workspace " + ws + " --mode self");
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("Run grep for specific terms") != std::string::npos);

    const auto report = tleval_cmd("report --results " + (dir / "runs/self/results.json"));
    CHECK(report.exit_code == 0);
    CHECK(report.output == read_file(dir / "runs/self/report.txt"));
}

TEST_CASE("single-purpose subcommands") {
    const support::ScratchDir dir("cli-tools");
    const auto ws = dir.str();
    REQUIRE(tleval_cmd("forge --reference --seed 5 --noise 100 --bait 16 --out-dir " + ws).exit_code == 0);
    const auto timeline = dir / "timeline.csv";

    CHECK(tleval_cmd("summarize -i " + timeline + " -o " + (dir / "s.json") + " -t last-shutdown").exit_code == 0);
    const auto s = Json::parse(read_file(dir / "s.json"));
    REQUIRE(s.size() == 1);
    CHECK(s["0"]["type"] == "Last Shutdown");
    CHECK(tleval_cmd("summarize -i " + timeline + " -o " + (dir / "all.json")).exit_code == 0);
    CHECK(read_file(dir / "all.json") == read_file(dir / "expected/summary.json"));

    CHECK(tleval_cmd("detect --timeline " + timeline + " --rules " + (dir / "rules.json") +
                     " --out " + (dir / "d.json"))
              .exit_code == 0);
    CHECK(read_file(dir / "d.json") == read_file(dir / "expected/detections.json"));

    const auto g = tleval_cmd("grep --preset onedrive --timeline " + timeline);
    CHECK(g.exit_code == 0);
    CHECK(g.output == read_file(dir / "expected/grep/onedrive.txt"));
    CHECK(tleval_cmd("grep --pattern 'OneDrive' --timeline " + timeline).output == g.output);

    CHECK(tleval_cmd("eda histogram --timeline " + timeline + " --out " + (dir / "h.csv") + " --svg " +
                     (dir / "h.svg"))
              .exit_code == 0);
    CHECK(read_file(dir / "h.csv").substr(0, 13) == "second,count\n");
    CHECK(tleval_cmd("eda transitions --timeline " + timeline + " --out " + (dir / "t.json")).exit_code == 0);
    CHECK(Json::parse(read_file(dir / "t.json"))["total"] == 123);

    write_file(dir / "a.txt", "the quick brown fox jumps over the dog\n");
    write_file(dir / "b.txt", "the quick brown fox jumped over the lazy dog\n");
    const auto score = tleval_cmd("score --candidate " + (dir / "a.txt") + " --reference " + (dir / "b.txt"));
    CHECK(score.exit_code == 0);
    const auto m = Json::parse(score.output);
    CHECK(m["bleu"].get<double>() == doctest::Approx(0.37707945965932077));
    CHECK(m["rouge1"].get<double>() == doctest::Approx(7.0 / 9.0));
    const auto f1 = Json::parse(tleval_cmd("score --rouge f1 --candidate " + (dir / "a.txt") +
                                           " --reference " + (dir / "b.txt"))
                                    .output);
    CHECK(f1["rouge1"].get<double>() == doctest::Approx(0.823529411764706));
}

TEST_CASE("exit codes") {
    const support::ScratchDir dir("cli-exit");
    const auto ws = dir.str();
    CHECK(tleval_cmd("").exit_code == 2);
    CHECK(tleval_cmd("frobnicate").exit_code == 2);
    CHECK(tleval_cmd("grep --pattern '(' --timeline /dev/null").exit_code == 2);
    CHECK(tleval_cmd("run --workspace " + ws + " --mode sideways").exit_code == 2);
    write_file(dir / "bad-config.json", "{\"unknown\": 1}");
    CHECK(tleval_cmd("run --workspace " + ws + " --config " + (dir / "bad-config.json")).exit_code == 2);
    REQUIRE(tleval_cmd("forge --reference --noise 10 --bait 8 --out-dir " + ws).exit_code == 0);
    // No truth yet: an evaluation error.
    CHECK(tleval_cmd("run --workspace " + ws + " --mode self").exit_code == 1);
    REQUIRE(tleval_cmd("truth --workspace " + ws).exit_code == 0);
    write_file(dir / "empty.json", "[]");
    CHECK(tleval_cmd("run --workspace " + ws + " --mode replay --transcript " + (dir / "empty.json")).exit_code == 1);
    CHECK(tleval_cmd("truth --workspace " + ws + " --task eda").exit_code == 2);
    // Live mode with no key configured.
    write_file(dir / "live.json", "{\"api_key_env\": \"TLEVAL_KEY_NOT_SET_ANYWHERE\", \"endpoint\": \"http://127.0.0.1:9/v1\"}");
    CHECK(tleval_cmd("run --workspace " + ws + " --mode live --config " + (dir / "live.json")).exit_code == 2);
}

} // TEST_SUITE
