#pragma once

// Plaso (psort) CSV timelines: parsing, slicing and byte-exact re-serialization.

#include "tleval/error.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tleval {

using Microseconds = std::chrono::microseconds;
using UtcInstant = std::chrono::sys_time<Microseconds>;

/// Parses `YYYY-MM-DD[T ]HH:MM:SS[.ffffff][Z|+HH:MM|-HH:MM]` and normalizes to UTC.
/// Fractions longer than six digits are truncated to microseconds.
std::optional<UtcInstant> parse_instant(std::string_view text);

/// `2023-12-26 00:34:47.890403+00:00` (the form used in summary records).
std::string format_instant(UtcInstant instant);

/// `2023-12-26T00:34:47.890403+00:00` (psort's dynamic-profile form).
std::string format_instant_iso(UtcInstant instant);

/// `hh:mm:ss` of the UTC instant.
std::string format_clock(UtcInstant instant);

struct LowLevelEvent {
    std::string datetime;        ///< datetime column text, verbatim
    UtcInstant instant{};        ///< datetime normalized to UTC
    std::string timestamp_desc;
    std::string source;
    std::string source_long;
    std::string message;
    std::string parser;
    std::string display_name;
    std::string tag;
    std::vector<std::string> values;  ///< every column in header order
    std::string raw_line;             ///< the record text as read, without its terminator
    std::size_t line_no = 0;          ///< 1-based physical line where the record starts
};

class Timeline {
public:
    Timeline() = default;
    Timeline(std::vector<std::string> header, std::string header_line);

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::string& header_line() const noexcept { return header_line_; }
    const std::vector<LowLevelEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const LowLevelEvent& operator[](std::size_t i) const { return events_[i]; }

    /// Index of a header column, if present.
    std::optional<std::size_t> column(std::string_view name) const;

    /// Value of a named column for row `row`; empty when the column does not exist.
    const std::string& field(std::size_t row, std::string_view name) const;

    const std::string& line_ending() const noexcept { return eol_; }
    bool trailing_newline() const noexcept { return trailing_newline_; }
    bool has_bom() const noexcept { return bom_; }

    void set_line_ending(std::string eol) { eol_ = std::move(eol); }
    void set_trailing_newline(bool on) noexcept { trailing_newline_ = on; }
    void set_bom(bool on) noexcept { bom_ = on; }
    void push_back(LowLevelEvent event) { events_.push_back(std::move(event)); }

private:
    std::vector<std::string> header_;
    std::string header_line_;
    std::vector<LowLevelEvent> events_;
    std::string eol_ = "\n";
    bool trailing_newline_ = true;
    bool bom_ = false;
};

enum class RowErrorKind { BadRow, BadTimestamp };

struct RowError {
    RowErrorKind kind;
    std::size_t line_no;
    std::string detail;
};

std::string to_string(const RowError& error);

class MissingHeader : public Error {
public:
    MissingHeader() : Error("timeline has no header row") {}
};

/// Raised by strict parsing on the first rejected row.
class TimelineParseError : public Error {
public:
    explicit TimelineParseError(RowError error)
        : Error(to_string(error)), error_(std::move(error)) {}
    const RowError& row_error() const noexcept { return error_; }

private:
    RowError error_;
};

enum class ParseMode { Lenient, Strict };

struct ParseResult {
    Timeline timeline;
    std::vector<RowError> errors;  ///< rows rejected in lenient mode
};

/// Header-driven parse; only `datetime` and `message` columns are required.
ParseResult parse_timeline(std::string_view csv, ParseMode mode = ParseMode::Lenient);

/// Strict parse of a file on disk.
Timeline load_timeline(const std::string& path, ParseMode mode = ParseMode::Strict);

std::string serialize(const Timeline& timeline);

inline constexpr std::size_t default_window_rows = 2000;

/// Header plus rows [start, start + count), clipped to the end of the timeline.
Timeline slice_window(const Timeline& timeline, std::size_t start,
                      std::size_t count = default_window_rows);

/// Splits one CSV record (no terminator) into fields using RFC 4180 quoting.
std::optional<std::vector<std::string>> split_csv_record(std::string_view record);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace tleval
