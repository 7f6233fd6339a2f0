#include "tleval/rules.hpp"

namespace tleval {

namespace {

KeywordRule rule_from_json(const Json& item, std::size_t index) {
    const auto where = " (rule #" + std::to_string(index) + ")";
    if (!item.is_object()) {
        throw BadRuleFile("rule entries must be objects" + where);
    }
    auto text_field = [&](const char* name) {
        const auto it = item.find(name);
        if (it == item.end() || !it->is_string()) {
            throw BadRuleFile(std::string("missing string field '") + name + "'" + where);
        }
        auto value = it->get<std::string>();
        if (value.empty()) {
            throw BadRuleFile(std::string("field '") + name + "' is empty" + where);
        }
        return value;
    };
    return {text_field("event"), text_field("keyword")};
}

} // namespace

RuleSet load_rules(std::string_view json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw BadRuleFile(std::string("malformed rule file: ") + e.what());
    }
    RuleSet rules;
    if (doc.is_object()) {
        rules.push_back(rule_from_json(doc, 0));
    } else if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            rules.push_back(rule_from_json(doc[i], i));
        }
    } else {
        throw BadRuleFile("rule file must hold an array or an object");
    }
    return rules;
}

const RuleSet& default_rules() {
    static const RuleSet rules = {
        {"Registry launch with prefetch file", "Prefetch [REGEDIT.EXE] was executed"},
        {"Firefox installer launch with prefetch file",
         "Prefetch [FIREFOX INSTALLER.EXE] was executed"},
        {"Microsoft Edge process started", "Strings: ['msedge.exe\""},
        {"System time changed", "[4616 / 0x1208]"},
        {"Failed logon attempt", "[4625 / 0x1211]"},
        {"User account created", "[4720 / 0x1270]"},
        {"Security audit log cleared", "[1102 / 0x044e]"},
    };
    return rules;
}

Json rules_to_json(const RuleSet& rules) {
    Json out = Json::array();
    for (const auto& rule : rules) {
        out.push_back(Json{{"event", rule.event}, {"keyword", rule.keyword}});
    }
    return out;
}

std::vector<DetectedEvent> detect(const Timeline& timeline, const RuleSet& rules) {
    std::vector<DetectedEvent> found;
    for (const auto& row : timeline.events()) {
        for (const auto& rule : rules) {
            if (row.message.find(rule.keyword) != std::string::npos) {
                found.push_back({row.datetime, rule.event, rule.keyword, row.message});
            }
        }
    }
    return found;
}

Json detections_to_json(const std::vector<DetectedEvent>& detections) {
    Json out = Json::array();
    for (const auto& d : detections) {
        out.push_back(Json{{"datetime", d.datetime},
                           {"event", d.event},
                           {"keyword", d.keyword},
                           {"message", d.message}});
    }
    return out;
}

std::vector<DetectedEvent> detections_from_json(const Json& value) {
    if (!value.is_array()) {
        throw Error("detections must be a JSON array");
    }
    std::vector<DetectedEvent> out;
    for (const auto& item : value) {
        out.push_back({item.at("datetime").get<std::string>(), item.at("event").get<std::string>(),
                       item.at("keyword").get<std::string>(),
                       item.at("message").get<std::string>()});
    }
    return out;
}

} // namespace tleval
