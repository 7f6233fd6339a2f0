#include "support.hpp"

#include "tleval/forge.hpp"
#include "tleval/search.hpp"

#include <doctest.h>

#include <random>

using namespace tleval;

TEST_SUITE("search") {

TEST_CASE("the five presets are shipped in order") {
    const auto& presets = preset_patterns();
    REQUIRE(presets.size() == 5);
    CHECK(presets[0].expression == "RegisteredApplications");
    CHECK(presets[1].expression == "(OneDrive|OneDrive\\.exe)");
    CHECK(presets[2].expression == "\\b[A-Za-z0-9_\\-\\\\:.]+\\.exe\\b");
    CHECK(presets[3].expression == "4616 /");
    CHECK(presets[4].expression ==
          "\\[4616 / 0x1208\\].*Microsoft-Windows-Security-Auditing.*svchost.exe");
    for (const auto& p : presets) {
        CHECK_NOTHROW(SearchPattern(p.expression));
    }
}

TEST_CASE("ERE semantics") {
    CHECK(SearchPattern("a|b").matches("xbx"));
    CHECK_FALSE(SearchPattern("^b").matches("ab"));
    CHECK(SearchPattern("a{2,3}").matches("caab"));
    CHECK(SearchPattern("[[:digit:]]+ /").matches("[4616 / 0x1208]"));
    CHECK(SearchPattern("\\bexe\\b").matches("run.exe now"));
    CHECK_FALSE(SearchPattern("\\bexe\\b").matches("runexenow"));
    CHECK(SearchPattern("").matches("anything"));
    CHECK_THROWS_AS(SearchPattern("(unclosed"), InvalidPattern);
    CHECK_THROWS_AS(SearchPattern("a{2"), InvalidPattern);
}

TEST_CASE("matching is per physical line and keeps raw text") {
    const std::string csv =
        "datetime,message\n"
        "2023-01-01T00:00:00+00:00,\"first\nsecond OneDrive\"\n"
        "2023-01-01T00:00:01+00:00,plain OneDrive.exe\n"
        "2023-01-01T00:00:02+00:00,nothing\n";
    const auto t = parse_timeline(csv, ParseMode::Strict).timeline;
    const auto lines = grep_timeline(t, SearchPattern("OneDrive"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "second OneDrive\"");
    CHECK(lines[1] == "2023-01-01T00:00:01+00:00,plain OneDrive.exe");
    CHECK(grep_timeline(t, SearchPattern("^2023")).size() == 3);
    CHECK(grep_timeline(t, SearchPattern("^second")).size() == 1);
    CHECK(grep_timeline(t, SearchPattern("message")).empty());
    CHECK(format_grep_output({"a", "b"}) == "a\nb\n");
    CHECK(format_grep_output({}).empty());
}

TEST_CASE("CRLF lines keep their carriage return like grep") {
    const std::string csv =
        "datetime,message\r\n2023-01-01T00:00:00+00:00,hit\r\n2023-01-01T00:00:01+00:00,miss\r\n";
    const auto t = parse_timeline(csv).timeline;
    const auto lines = grep_timeline(t, SearchPattern("hit"));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] == "2023-01-01T00:00:00+00:00,hit\r");
    CHECK(grep_timeline(t, SearchPattern("hit$")).empty());
    const support::ScratchDir dir("crlf");
    CHECK(format_grep_output(lines) == support::system_grep(csv, "hit", dir));
}

TEST_CASE("presets agree with system grep on a forged timeline") {
    const support::ScratchDir dir("presets");
    const auto result = forge(reference_scenario(3, 1200, 120));
    for (const auto& p : preset_patterns()) {
        CAPTURE(p.name);
        const auto ours = format_grep_output(grep_timeline(result.timeline, SearchPattern(p.expression)));
        CHECK(ours == support::system_grep(result.csv, p.expression, dir));
        CHECK_FALSE(ours.empty());
    }
}

TEST_CASE("property: random extended regexes agree with system grep") {
    const support::ScratchDir dir("random-ere");
    const auto result = forge(reference_scenario(9, 400, 60));
    const std::vector<std::string> atoms = {
        "Prefetch", "exe", "OneDrive", "4616", "Security", "REG", "[0-9]+", "[A-Z]{2,}",
        "\\.", ".", "\\[", "\\]", "[[:space:]]", "dll", "0x[0-9a-f]+", "\\bWin", "svchost",
        "Time", "(Creation|Access)", "[^,]*", "\\\\", "User"};
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 60; ++i) {
        std::string pattern;
        if (rng() % 5 == 0) {
            pattern += "^";
        }
        const auto parts = 1 + rng() % 4;
        for (std::size_t k = 0; k < parts; ++k) {
            pattern += atoms[rng() % atoms.size()];
            switch (rng() % 6) {
            case 0: pattern += ".*"; break;
            case 1: pattern += "|"; pattern += atoms[rng() % atoms.size()]; break;
            case 2: pattern += "?"; break;
            default: break;
            }
        }
        if (rng() % 6 == 0) {
            pattern += "$";
        }
        CAPTURE(pattern);
        const auto ours = format_grep_output(grep_timeline(result.timeline, SearchPattern(pattern)));
        CHECK(ours == support::system_grep(result.csv, pattern, dir));
    }
}

TEST_CASE("normalization policies") {
    CHECK(normalize_text("a,  b", Normalization::None) == "a,  b");
    CHECK(normalize_text("a,  b", Normalization::CollapseSpaces) == "a, b");
    CHECK(normalize_text("a,  b", Normalization::StripCommas) == "a  b");
    CHECK(normalize_text("a,  b", Normalization::Both) == "a b");
    CHECK(parse_normalization("both") == Normalization::Both);
    CHECK(to_string(Normalization::StripCommas) == "strip-commas");
    CHECK_THROWS_AS(parse_normalization("lower"), ConfigError);
}

} // TEST_SUITE
