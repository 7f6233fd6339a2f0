#include "tleval/timeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tleval {

namespace {

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > text.size()) {
        return false;
    }
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = text[pos + i];
        if (c < '0' || c > '9') {
            return false;
        }
        value = value * 10 + (c - '0');
    }
    pos += count;
    out = value;
    return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
    if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

std::string two_digits(long long v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02lld", v);
    return buf;
}

std::string format_with_separator(UtcInstant instant, char sep) {
    using namespace std::chrono;
    const auto day = floor<days>(instant);
    const year_month_day ymd{day};
    const auto since_midnight = instant - day;
    const auto h = duration_cast<hours>(since_midnight);
    const auto m = duration_cast<minutes>(since_midnight - h);
    const auto s = duration_cast<seconds>(since_midnight - h - m);
    const auto us = since_midnight - h - m - s;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u%c%02lld:%02lld:%02lld.%06lld+00:00",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), sep, static_cast<long long>(h.count()),
                  static_cast<long long>(m.count()), static_cast<long long>(s.count()),
                  static_cast<long long>(us.count()));
    return buf;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) {
        ++b;
    }
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

struct RawRecord {
    std::string_view text;
    std::size_t line_no;
    bool unterminated_quote;
};

// Splits the input into records, honouring quoted CR/LF. Record text excludes the
// terminator; a trailing CR before LF is stripped.
std::vector<RawRecord> split_records(std::string_view csv, bool& trailing_newline,
                                     std::string& eol) {
    std::vector<RawRecord> records;
    std::size_t start = 0;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool in_quotes = false;
    bool eol_seen = false;
    trailing_newline = false;
    for (std::size_t i = 0; i < csv.size(); ++i) {
        const char c = csv[i];
        if (c == '"') {
            in_quotes = !in_quotes;
        } else if (c == '\n') {
            if (!in_quotes) {
                std::size_t end = i;
                const bool crlf = end > start && csv[end - 1] == '\r';
                if (crlf) {
                    --end;
                }
                if (!eol_seen) {
                    eol = crlf ? "\r\n" : "\n";
                    eol_seen = true;
                }
                records.push_back({csv.substr(start, end - start), record_line, false});
                start = i + 1;
                record_line = line + 1;
            }
            ++line;
        }
    }
    if (start < csv.size()) {
        records.push_back({csv.substr(start), record_line, in_quotes});
    } else {
        trailing_newline = !records.empty();
    }
    return records;
}

} // namespace

std::optional<UtcInstant> parse_instant(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_digits(text, pos, 4, y) || !expect(text, pos, '-') ||
        !read_digits(text, pos, 2, mo) || !expect(text, pos, '-') ||
        !read_digits(text, pos, 2, d)) {
        return std::nullopt;
    }
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) {
        return std::nullopt;
    }
    ++pos;
    if (!read_digits(text, pos, 2, h) || !expect(text, pos, ':') ||
        !read_digits(text, pos, 2, mi) || !expect(text, pos, ':') ||
        !read_digits(text, pos, 2, s)) {
        return std::nullopt;
    }
    long long micros = 0;
    if (expect(text, pos, '.')) {
        std::size_t digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (digits < 6) {
                micros = micros * 10 + (text[pos] - '0');
            }
            ++digits;
            ++pos;
        }
        if (digits == 0) {
            return std::nullopt;
        }
        for (std::size_t k = digits; k < 6; ++k) {
            micros *= 10;
        }
    }
    long long offset_minutes = 0;
    if (pos < text.size()) {
        const char sign = text[pos];
        if (sign == 'Z' && pos + 1 == text.size()) {
            ++pos;
        } else if (sign == '+' || sign == '-') {
            ++pos;
            int oh = 0, om = 0;
            if (!read_digits(text, pos, 2, oh)) {
                return std::nullopt;
            }
            expect(text, pos, ':');
            if (!read_digits(text, pos, 2, om) || oh > 23 || om > 59) {
                return std::nullopt;
            }
            offset_minutes = (oh * 60 + om) * (sign == '-' ? -1 : 1);
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
        return std::nullopt;
    }
    const auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + microseconds{micros};
    return UtcInstant{local - minutes{offset_minutes}};
}

std::string format_instant(UtcInstant instant) { return format_with_separator(instant, ' '); }

std::string format_instant_iso(UtcInstant instant) {
    return format_with_separator(instant, 'T');
}

std::string format_clock(UtcInstant instant) {
    using namespace std::chrono;
    const auto since_midnight = instant - floor<days>(instant);
    const auto secs = duration_cast<seconds>(since_midnight).count();
    return two_digits(secs / 3600) + ":" + two_digits((secs / 60) % 60) + ":" +
           two_digits(secs % 60);
}

Timeline::Timeline(std::vector<std::string> header, std::string header_line)
    : header_(std::move(header)), header_line_(std::move(header_line)) {}

std::optional<std::size_t> Timeline::column(std::string_view name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - header_.begin());
}

const std::string& Timeline::field(std::size_t row, std::string_view name) const {
    static const std::string empty;
    const auto col = column(name);
    if (!col) {
        return empty;
    }
    const auto& values = events_.at(row).values;
    return *col < values.size() ? values[*col] : empty;
}

std::string to_string(const RowError& error) {
    const char* kind = error.kind == RowErrorKind::BadRow ? "BadRow" : "BadTimestamp";
    return std::string(kind) + " at line " + std::to_string(error.line_no) + ": " + error.detail;
}

std::optional<std::vector<std::string>> split_csv_record(std::string_view record) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < record.size(); ++i) {
        const char c = record[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < record.size() && record[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            was_quoted = false;
        } else if (c == '"' && current.empty() && !was_quoted) {
            in_quotes = true;
            was_quoted = true;
        } else {
            // Stray quotes inside unquoted fields are kept literally.
            current.push_back(c);
        }
    }
    if (in_quotes) {
        return std::nullopt;
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out.push_back(',');
        }
        out += csv_escape(fields[i]);
    }
    return out;
}

ParseResult parse_timeline(std::string_view csv, ParseMode mode) {
    ParseResult result;
    bool bom = false;
    if (csv.substr(0, 3) == "\xEF\xBB\xBF") {
        bom = true;
        csv.remove_prefix(3);
    }
    bool trailing_newline = false;
    std::string eol = "\n";
    const auto records = split_records(csv, trailing_newline, eol);
    if (records.empty()) {
        throw MissingHeader();
    }
    auto header_fields = split_csv_record(records.front().text);
    if (!header_fields || header_fields->empty() ||
        (header_fields->size() == 1 && trim((*header_fields)[0]).empty())) {
        throw MissingHeader();
    }
    std::vector<std::string> header;
    header.reserve(header_fields->size());
    for (const auto& name : *header_fields) {
        header.push_back(trim(name));
    }
    Timeline timeline(header, std::string(records.front().text));
    timeline.set_bom(bom);
    timeline.set_line_ending(eol);
    timeline.set_trailing_newline(trailing_newline);

    const auto datetime_col = timeline.column("datetime");
    const auto message_col = timeline.column("message");
    if (!datetime_col || !message_col) {
        throw Error("timeline header must contain 'datetime' and 'message' columns");
    }
    auto col_or_none = [&](std::string_view name) { return timeline.column(name); };
    const auto desc_col = col_or_none("timestamp_desc");
    const auto source_col = col_or_none("source");
    const auto source_long_col = col_or_none("source_long");
    const auto parser_col = col_or_none("parser");
    const auto display_col = col_or_none("display_name");
    const auto tag_col = col_or_none("tag");

    auto reject = [&](RowError error) {
        if (mode == ParseMode::Strict) {
            throw TimelineParseError(std::move(error));
        }
        result.errors.push_back(std::move(error));
    };

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        auto values = rec.unterminated_quote ? std::nullopt : split_csv_record(rec.text);
        if (!values) {
            reject({RowErrorKind::BadRow, rec.line_no, "unterminated quoted field"});
            continue;
        }
        if (values->size() != header.size()) {
            reject({RowErrorKind::BadRow, rec.line_no,
                    "expected " + std::to_string(header.size()) + " columns, found " +
                        std::to_string(values->size())});
            continue;
        }
        LowLevelEvent event;
        event.datetime = (*values)[*datetime_col];
        const auto instant = parse_instant(event.datetime);
        if (!instant) {
            reject({RowErrorKind::BadTimestamp, rec.line_no,
                    "unparseable datetime '" + event.datetime + "'"});
            continue;
        }
        event.instant = *instant;
        auto pick = [&](const std::optional<std::size_t>& col) {
            return col ? (*values)[*col] : std::string();
        };
        event.message = (*values)[*message_col];
        event.timestamp_desc = pick(desc_col);
        event.source = pick(source_col);
        event.source_long = pick(source_long_col);
        event.parser = pick(parser_col);
        event.display_name = pick(display_col);
        event.tag = pick(tag_col);
        event.values = std::move(*values);
        event.raw_line = std::string(rec.text);
        event.line_no = rec.line_no;
        timeline.push_back(std::move(event));
    }
    result.timeline = std::move(timeline);
    return result;
}

Timeline load_timeline(const std::string& path, ParseMode mode) {
    return parse_timeline(read_file(path), mode).timeline;
}

std::string serialize(const Timeline& timeline) {
    std::string out;
    if (timeline.has_bom()) {
        out += "\xEF\xBB\xBF";
    }
    out += timeline.header_line();
    const auto& eol = timeline.line_ending();
    for (const auto& event : timeline.events()) {
        out += eol;
        out += event.raw_line;
    }
    if (timeline.trailing_newline()) {
        out += eol;
    }
    return out;
}

Timeline slice_window(const Timeline& timeline, std::size_t start, std::size_t count) {
    Timeline window(timeline.header(), timeline.header_line());
    window.set_bom(timeline.has_bom());
    window.set_line_ending(timeline.line_ending());
    window.set_trailing_newline(true);
    const auto& events = timeline.events();
    const std::size_t begin = std::min(start, events.size());
    const std::size_t end = begin + std::min(count, events.size() - begin);
    for (std::size_t i = begin; i < end; ++i) {
        window.push_back(events[i]);
    }
    if (end == events.size()) {
        window.set_trailing_newline(timeline.trailing_newline() || events.empty());
    }
    return window;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

} // namespace tleval
