#include "tleval/forge.hpp"
#include "tleval/rules.hpp"

#include <doctest.h>

#include <random>

using namespace tleval;

namespace {

const std::string prefetch_message =
    "Prefetch [REGEDIT.EXE] was executed - run count 3 path hints: \\WINDOWS\\REGEDIT.EXE hash: "
    "0x246AC210 volume: 1 [serial number: 0x5CE1DF5A  device path: "
    "\\VOLUME{01da182ce1985a64-5ce1df5a}]";

Timeline tiny() {
    std::string csv = "datetime,message,parser\n";
    csv += "2023-12-26T00:34:47.890403+00:00," + csv_escape(prefetch_message) + ",prefetch\n";
    csv += "2023-12-26T00:35:00+00:00,nothing here,filestat\n";
    csv += "2023-12-26T00:36:00+00:00,\"[4616 / 0x1208] and [4625 / 0x1211]\",winevtx\n";
    return parse_timeline(csv, ParseMode::Strict).timeline;
}

} // namespace

TEST_SUITE("rules") {

TEST_CASE("the shipped rule set starts with the published Prefetch rule") {
    const auto& rules = default_rules();
    REQUIRE(rules.size() == 7);
    CHECK(rules[0].event == "Registry launch with prefetch file");
    CHECK(rules[0].keyword == "Prefetch [REGEDIT.EXE] was executed");
}

TEST_CASE("detection reproduces the published example record") {
    const auto hits = detect(tiny(), default_rules());
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].datetime == "2023-12-26T00:34:47.890403+00:00");
    CHECK(hits[0].event == "Registry launch with prefetch file");
    CHECK(hits[0].keyword == "Prefetch [REGEDIT.EXE] was executed");
    CHECK(hits[0].message == prefetch_message);
    // One row, two rules: ordered by rule.
    CHECK(hits[1].keyword == "[4616 / 0x1208]");
    CHECK(hits[2].keyword == "[4625 / 0x1211]");
}

TEST_CASE("matching is a case-sensitive literal substring") {
    const RuleSet rules = {{"lower", "prefetch [regedit.exe]"}, {"regex chars", "[REGEDIT.EXE]"}};
    const auto hits = detect(tiny(), rules);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].event == "regex chars");
}

TEST_CASE("JSON output keeps the documented field order") {
    const auto j = detections_to_json(detect(tiny(), default_rules()));
    REQUIRE(j.size() == 3);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j[0].items()) {
        (void)v;
        keys.push_back(k);
    }
    CHECK(keys == std::vector<std::string>{"datetime", "event", "keyword", "message"});
    CHECK(detections_from_json(j) == detect(tiny(), default_rules()));
    CHECK(detections_to_json({}).dump() == "[]");
}

TEST_CASE("rule files") {
    CHECK(load_rules(R"([{"event": "e", "keyword": "k"}])") == RuleSet{{"e", "k"}});
    CHECK(load_rules(R"({"event": "e", "keyword": "k"})") == RuleSet{{"e", "k"}});
    CHECK(load_rules("[]").empty());
    CHECK_THROWS_AS(load_rules("not json"), BadRuleFile);
    CHECK_THROWS_AS(load_rules(R"([{"event": "e"}])"), BadRuleFile);
    CHECK_THROWS_AS(load_rules(R"([{"event": "e", "keyword": ""}])"), BadRuleFile);
    CHECK_THROWS_AS(load_rules(R"([{"event": 1, "keyword": "k"}])"), BadRuleFile);
    CHECK_THROWS_AS(load_rules("42"), BadRuleFile);
    CHECK(load_rules(rules_to_json(default_rules()).dump()) == default_rules());
}

TEST_CASE("property: detection equals a per-row substring oracle on forged timelines") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 10; ++round) {
        const auto result = forge(reference_scenario(rng(), 100 + rng() % 400, rng() % 60));
        const auto hits = detect(result.timeline, result.rules);
        std::size_t expected = 0;
        for (const auto& row : result.timeline.events()) {
            for (const auto& rule : result.rules) {
                expected += row.message.find(rule.keyword) != std::string::npos ? 1 : 0;
            }
        }
        CHECK(hits.size() == expected);
        CHECK(hits == result.expected_detections);
    }
}

} // TEST_SUITE
