#include "tleval/timeline.hpp"

#include <doctest.h>

using namespace tleval;

namespace {

const std::string header =
    "datetime,timestamp_desc,source,source_long,message,parser,display_name,tag";

std::string sample() {
    return header + "\n" +
           "2023-12-27T00:37:14.609465+00:00,Last Time Executed,LOG,WinPrefetch,"
           "Prefetch [REGEDIT.EXE] was executed - run count 3,prefetch,NTFS:\\Windows\\prefetch\\REGEDIT.EXE-246AC210.pf,-\n"
           "2023-12-27T00:38:00+01:00,Creation Time,FILE,File stat,\"a, \"\"quoted\"\"\nsecond line\",filestat,x,\n"
           "2023-12-27 00:39:00Z,Creation Time,FILE,File stat,plain,filestat,y,\n";
}

} // namespace

TEST_SUITE("timeline") {

TEST_CASE("instants parse and normalize to UTC") {
    const auto a = parse_instant("2023-12-26T00:34:47.890403+00:00");
    REQUIRE(a);
    CHECK(format_instant(*a) == "2023-12-26 00:34:47.890403+00:00");
    CHECK(format_instant_iso(*a) == "2023-12-26T00:34:47.890403+00:00");
    CHECK(format_clock(*a) == "00:34:47");

    const auto b = parse_instant("2023-12-26 02:34:47+02:00");
    REQUIRE(b);
    CHECK(format_instant(*b) == "2023-12-26 00:34:47.000000+00:00");

    const auto c = parse_instant("2023-12-26T00:34:47.1234569Z");
    REQUIRE(c);
    CHECK(format_instant(*c) == "2023-12-26 00:34:47.123456+00:00");

    CHECK_FALSE(parse_instant("not a date"));
    CHECK_FALSE(parse_instant("2023-13-01T00:00:00"));
    CHECK_FALSE(parse_instant("2023-02-30T00:00:00"));
    CHECK_FALSE(parse_instant("2023-12-26T25:00:00"));
}

TEST_CASE("header-driven parsing with quoted multi-line fields") {
    const auto result = parse_timeline(sample(), ParseMode::Strict);
    const auto& t = result.timeline;
    REQUIRE(t.size() == 3);
    CHECK(t.header().size() == 8);
    CHECK(t[0].parser == "prefetch");
    CHECK(t[0].message == "Prefetch [REGEDIT.EXE] was executed - run count 3");
    CHECK(t[1].message == "a, \"quoted\"\nsecond line");
    CHECK(format_instant(t[1].instant) == "2023-12-26 23:38:00.000000+00:00");
    CHECK(t[1].line_no == 3);
    CHECK(t[2].line_no == 5);
    CHECK(t.field(2, "display_name") == "y");
    CHECK(t.field(2, "nonexistent").empty());
}

TEST_CASE("serialization is byte-exact") {
    for (const auto& text :
         {sample(), sample().substr(0, sample().size() - 1), std::string("\xEF\xBB\xBF") + sample()}) {
        CHECK(serialize(parse_timeline(text).timeline) == text);
    }
    std::string crlf;
    for (const char ch : sample()) {
        if (ch == '\n') {
            crlf += "\r\n";
        } else {
            crlf += ch;
        }
    }
    const auto t = parse_timeline(crlf).timeline;
    CHECK(t.line_ending() == "\r\n");
    CHECK(serialize(t) == crlf);
}

TEST_CASE("extra and reordered columns are accepted") {
    const std::string csv = "message,extra,datetime\nhello,1,2023-01-01T00:00:00+00:00\n";
    const auto t = parse_timeline(csv, ParseMode::Strict).timeline;
    REQUIRE(t.size() == 1);
    CHECK(t[0].message == "hello");
    CHECK(t[0].parser.empty());
    CHECK(t.field(0, "extra") == "1");
}

TEST_CASE("bad rows: lenient collects, strict throws") {
    const std::string csv = header + "\n" +
                            "2023-12-27T00:00:00+00:00,a,b,c,ok,p,d,t\n"
                            "garbage,a,b,c,bad time,p,d,t\n"
                            "2023-12-27T00:00:00+00:00,too,few\n"
                            "2023-12-27T00:00:01+00:00,a,b,c,\"unterminated,p,d,t\n";
    const auto lenient = parse_timeline(csv, ParseMode::Lenient);
    CHECK(lenient.timeline.size() == 1);
    REQUIRE(lenient.errors.size() == 3);
    CHECK(lenient.errors[0].kind == RowErrorKind::BadTimestamp);
    CHECK(lenient.errors[0].line_no == 3);
    CHECK(lenient.errors[1].kind == RowErrorKind::BadRow);
    CHECK(lenient.errors[2].kind == RowErrorKind::BadRow);
    CHECK_THROWS_AS(parse_timeline(csv, ParseMode::Strict), TimelineParseError);
}

TEST_CASE("missing header or required columns") {
    CHECK_THROWS_AS(parse_timeline(""), MissingHeader);
    CHECK_THROWS_AS(parse_timeline("\n"), MissingHeader);
    CHECK_THROWS_AS(parse_timeline("a,b\n1,2\n"), Error);
}

TEST_CASE("header-only timeline") {
    const auto t = parse_timeline(header + "\n").timeline;
    CHECK(t.empty());
    CHECK(serialize(t) == header + "\n");
}

TEST_CASE("window slicing clips at the end") {
    const auto t = parse_timeline(sample()).timeline;
    CHECK(slice_window(t, 0, 2).size() == 2);
    CHECK(slice_window(t, 1).size() == 2);
    CHECK(slice_window(t, 3).size() == 0);
    CHECK(slice_window(t, 99).size() == 0);
    const auto w = slice_window(t, 0, 2);
    const auto text = serialize(w);
    CHECK(text.back() == '\n');
    CHECK(parse_timeline(text).timeline.size() == 2);
    CHECK(serialize(slice_window(t, 0)) == sample());
}

TEST_CASE("CSV helpers") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_join({"a", "b,c", ""}) == "a,\"b,c\",");
    const auto fields = split_csv_record("a,\"b,c\",,\"d\"\"e\"");
    REQUIRE(fields);
    CHECK(*fields == std::vector<std::string>{"a", "b,c", "", "d\"e"});
    CHECK_FALSE(split_csv_record("\"open"));
}

} // TEST_SUITE
