#pragma once

// High-level event reconstruction from low-level timeline rows.
//
// Each analyzer (EventTypeSpec) owns one or more detectors. A detector selects
// rows by parser name and message pattern, and turns regex captures into the
// event's key/value attributes. Every matched row yields one high-level event
// whose time bounds collapse onto that row's instant.

#include "tleval/error.hpp"
#include "tleval/json_text.hpp"
#include "tleval/timeline.hpp"

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tleval {

enum class Category { Web, Windows, UserActivity };

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view text);

enum class ValueTransform {
    Verbatim,
    Basename,   ///< last path component (either slash)
    UrlDecode,  ///< query-string decoding: '+' is a space, %XX a byte
};

struct KeyExtractor {
    std::string key;
    std::size_t group;
    ValueTransform transform = ValueTransform::Verbatim;
};

struct Detector {
    std::string reason;           ///< recorded in the trigger
    std::string parser_pattern;   ///< searched in the parser column
    std::string message_pattern;  ///< searched in the message column
    std::string exclude_pattern;  ///< rows whose message matches this are skipped; empty = none
    std::vector<KeyExtractor> extractors;

    std::regex parser_re;
    std::regex message_re;
    std::optional<std::regex> exclude_re;
};

struct EventTypeSpec {
    std::string name;  ///< e.g. "Process Creation"
    std::string slug;  ///< selector name, e.g. "process-creation"
    Category category;
    std::vector<Detector> detectors;
    std::string description_template;  ///< `{Key name}` placeholders refer to extracted keys
};

/// The eight analyzers, in registry order.
const std::vector<EventTypeSpec>& list_analyzers();

/// Finds an analyzer by slug or display name.
const EventTypeSpec* find_analyzer(std::string_view name);

/// Placeholder names used by a description template.
std::vector<std::string> template_placeholders(std::string_view description_template);

struct ContextEntry {
    std::string datetime;
    std::string message;
    std::string parser;

    bool operator==(const ContextEntry&) const = default;
};

struct Trigger {
    std::string datetime;
    std::string message;
    std::string parser;
    std::string reason;

    bool operator==(const Trigger&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct HighLevelEvent {
    long long id = 0;
    UtcInstant date_time_min{};
    UtcInstant date_time_max{};
    std::string evidence_source;
    std::string type;
    std::string description;
    Category category = Category::Web;
    std::string plugin;
    std::string files;
    KeyValues keys;
    std::vector<ContextEntry> supporting;
    Trigger trigger;

    bool operator==(const HighLevelEvent&) const = default;
};

class UnknownEventType : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t context_radius = 5;

/// Up to five rows before and five after `row_index`, in timeline order.
std::vector<ContextEntry> gather_context(const Timeline& timeline, std::size_t row_index);

/// Describes what one detector recognized in a row.
struct DetectorHit {
    KeyValues keys;
    std::string description;
    std::string reason;
};

/// Runs one analyzer against a single row.
std::optional<DetectorHit> match_row(const EventTypeSpec& spec, const LowLevelEvent& row);

/// `selector` is "all" or an analyzer slug/name; throws UnknownEventType otherwise.
/// Output is sorted by instant (stable on row order) with ids 1..n.
std::vector<HighLevelEvent> summarize(const Timeline& timeline, std::string_view selector = "all");

Json event_to_json(const HighLevelEvent& event);
HighLevelEvent event_from_json(const Json& value);

/// `{"0": {...}, "1": {...}}` in event order.
Json summary_to_json(const std::vector<HighLevelEvent>& events);
std::string serialize_summary(const std::vector<HighLevelEvent>& events);
std::vector<HighLevelEvent> parse_summary(std::string_view json_text);

/// Helpers shared with the scenario forge.
std::string basename_of(std::string_view path);
std::string url_decode(std::string_view text);

} // namespace tleval
