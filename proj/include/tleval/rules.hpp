#pragma once

// Keyword rules cross-referenced against the timeline's message column.

#include "tleval/error.hpp"
#include "tleval/json_text.hpp"
#include "tleval/timeline.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tleval {

struct KeywordRule {
    std::string event;    ///< human-readable event name
    std::string keyword;  ///< literal, case-sensitive substring of a message

    bool operator==(const KeywordRule&) const = default;
};

using RuleSet = std::vector<KeywordRule>;

struct DetectedEvent {
    std::string datetime;  ///< source row's datetime text, verbatim
    std::string event;
    std::string keyword;
    std::string message;

    bool operator==(const DetectedEvent&) const = default;
};

class BadRuleFile : public Error {
public:
    using Error::Error;
};

/// Accepts a JSON array of {event, keyword} objects or a single such object.
RuleSet load_rules(std::string_view json_text);

/// The shipped seven-rule set. The first rule is the published Prefetch rule;
/// the remaining six target artifacts the scenario forge plants.
const RuleSet& default_rules();

Json rules_to_json(const RuleSet& rules);

/// One detection per (row, rule) where the keyword occurs in the message;
/// ordered by row, then by rule.
std::vector<DetectedEvent> detect(const Timeline& timeline, const RuleSet& rules);

/// JSON array with fields in the order datetime, event, keyword, message.
Json detections_to_json(const std::vector<DetectedEvent>& detections);
std::vector<DetectedEvent> detections_from_json(const Json& value);

} // namespace tleval
