#include "tleval/summarizer.hpp"

#include <algorithm>
#include <numeric>

namespace tleval {

namespace {

Detector make_detector(std::string reason, std::string parser_pattern,
                       std::string message_pattern, std::string exclude_pattern,
                       std::vector<KeyExtractor> extractors) {
    Detector d;
    d.reason = std::move(reason);
    d.parser_pattern = std::move(parser_pattern);
    d.message_pattern = std::move(message_pattern);
    d.exclude_pattern = std::move(exclude_pattern);
    d.extractors = std::move(extractors);
    d.parser_re = std::regex(d.parser_pattern);
    d.message_re = std::regex(d.message_pattern);
    if (!d.exclude_pattern.empty()) {
        d.exclude_re = std::regex(d.exclude_pattern);
    }
    return d;
}

// Browser history plugins report page visits and downloads under the same parser.
constexpr const char* history_parser = R"(_history$|msie_webcache)";
constexpr const char* search_url =
    R"(^https?://(?:www\.)?(?:google\.[a-z.]+|bing\.com)/search\?(?:[^ ]*&)?q=)";
constexpr const char* download_message =
    R"(^(https?://[^ ]+) \((.+)\)\. Received: (\d+) bytes out of: (\d+) bytes\.$)";

std::vector<EventTypeSpec> build_registry() {
    using VT = ValueTransform;
    std::vector<EventTypeSpec> specs;

    specs.push_back({"Google Search", "google-search", Category::Web,
                     {make_detector("Google search results page in browser history",
                                    history_parser,
                                    R"(^(https?://(?:www\.)?google\.[a-z.]+/search\?(?:[^ ]*&)?q=([^& ]*)[^ ]*))",
                                    "", {{"Search query", 2, VT::UrlDecode}, {"URL", 1}})},
                     "Google search for '{Search query}'"});

    specs.push_back({"Bing Search", "bing-search", Category::Web,
                     {make_detector("Bing search results page in browser history",
                                    history_parser,
                                    R"(^(https?://(?:www\.)?bing\.com/search\?(?:[^ ]*&)?q=([^& ]*)[^ ]*))",
                                    "", {{"Search query", 2, VT::UrlDecode}, {"URL", 1}})},
                     "Bing search for '{Search query}'"});

    specs.push_back({"Web Visit", "web-visit", Category::Web,
                     {make_detector("URL visit in browser history", history_parser,
                                    R"(^(https?://([^/ :?#]+)[^ ]*))",
                                    std::string(search_url) + "|" + download_message,
                                    {{"Domain", 2}, {"URL", 1}})},
                     "Web visit to '{Domain}'"});

    specs.push_back({"Last Shutdown", "last-shutdown", Category::Windows,
                     {make_detector("ShutdownTime value in the Windows registry",
                                    R"(windows_shutdown)", R"(^\[([^\]]+)\] .*ShutdownTime)", "",
                                    {{"Registry key", 1}})},
                     "Last shutdown of the system"});

    specs.push_back(
        {"Process Creation", "process-creation", Category::Windows,
         {make_detector("Shell-Core event 9707 (process start)", R"(winevtx)",
                        R"(^\[(9707) / (0x25eb)\] .*Source Name: Microsoft-Windows-Shell-Core .*Strings: \['"?([^'"]*?\.[Ee][Xx][Ee]))",
                        "",
                        {{"Windows Event ID", 1},
                         {"Windows Event ID (hex)", 2},
                         {"Executable name", 3, VT::Basename}}),
          make_detector("Security event 4688 (new process)", R"(winevtx)",
                        R"(^\[(4688) / (0x1250)\] .*Source Name: Microsoft-Windows-Security-Auditing .*Strings: \[[^\]]*?'([^']*?\.[Ee][Xx][Ee])')",
                        "",
                        {{"Windows Event ID", 1},
                         {"Windows Event ID (hex)", 2},
                         {"Executable name", 3, VT::Basename}})},
         "Process creation of '{Executable name}'"});

    specs.push_back({"Program Opened", "program-opened", Category::Windows,
                     {make_detector("Prefetch execution record", R"(prefetch)",
                                    R"(^Prefetch \[([^\]]+)\] was executed - run count (\d+))", "",
                                    {{"Executable name", 1}, {"Run count", 2}})},
                     "Program opened: '{Executable name}'"});

    specs.push_back({"File Download", "file-download", Category::UserActivity,
                     {make_detector("Download entry in browser history",
                                    R"(_history$|_downloads$)", download_message, "",
                                    {{"File name", 2, VT::Basename},
                                     {"Full path", 2},
                                     {"URL", 1},
                                     {"Received bytes", 3},
                                     {"Total bytes", 4}})},
                     "File download of '{File name}'"});

    specs.push_back(
        {"Recent File Access", "recent-file-access", Category::UserActivity,
         {make_detector("Shortcut (LNK) to a local file", R"(lnk)",
                        R"(Local path: (.+?)(?= (?:Network path|Relative path|Working dir|Command line arguments|Icon location|Environment variables location|Link target):|$))",
                        "", {{"File name", 1, VT::Basename}, {"File path", 1}})},
         "Recent file access of '{File name}'"});

    return specs;
}

std::string apply_transform(const std::string& value, ValueTransform transform) {
    switch (transform) {
    case ValueTransform::Verbatim: return value;
    case ValueTransform::Basename: return basename_of(value);
    case ValueTransform::UrlDecode: return url_decode(value);
    }
    return value;
}

std::string fill_template(std::string_view tmpl, const KeyValues& keys) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            break;
        }
        const auto close = tmpl.find('}', open);
        if (close == std::string_view::npos) {
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const auto name = tmpl.substr(open + 1, close - open - 1);
        const auto it = std::find_if(keys.begin(), keys.end(),
                                     [&](const auto& kv) { return kv.first == name; });
        if (it != keys.end()) {
            out += it->second;
        }
        pos = close + 1;
    }
    out.append(tmpl.substr(pos));
    return out;
}

Json context_to_json(const ContextEntry& entry) {
    return Json{{"datetime", entry.datetime},
                {"message", entry.message},
                {"parser", entry.parser}};
}

std::string get_string(const Json& obj, const char* name) {
    return obj.at(name).get<std::string>();
}

UtcInstant get_instant(const Json& obj, const char* name) {
    const auto text = get_string(obj, name);
    const auto instant = parse_instant(text);
    if (!instant) {
        throw Error(std::string("bad instant in field '") + name + "': " + text);
    }
    return *instant;
}

} // namespace

std::string_view to_string(Category category) {
    switch (category) {
    case Category::Web: return "Web";
    case Category::Windows: return "Windows";
    case Category::UserActivity: return "User activity";
    }
    return "Web";
}

std::optional<Category> parse_category(std::string_view text) {
    for (const auto c : {Category::Web, Category::Windows, Category::UserActivity}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    return std::nullopt;
}

const std::vector<EventTypeSpec>& list_analyzers() {
    static const std::vector<EventTypeSpec> registry = build_registry();
    return registry;
}

const EventTypeSpec* find_analyzer(std::string_view name) {
    for (const auto& spec : list_analyzers()) {
        if (spec.slug == name || spec.name == name) {
            return &spec;
        }
    }
    return nullptr;
}

std::vector<std::string> template_placeholders(std::string_view description_template) {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (true) {
        const auto open = description_template.find('{', pos);
        if (open == std::string_view::npos) {
            break;
        }
        const auto close = description_template.find('}', open);
        if (close == std::string_view::npos) {
            break;
        }
        names.emplace_back(description_template.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    return names;
}

std::string basename_of(std::string_view path) {
    const auto cut = path.find_last_of("\\/");
    return std::string(cut == std::string_view::npos ? path : path.substr(cut + 1));
}

std::string url_decode(std::string_view text) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '+') {
            out.push_back(' ');
        } else if (c == '%' && i + 2 < text.size() && hex(text[i + 1]) >= 0 &&
                   hex(text[i + 2]) >= 0) {
            out.push_back(static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2])));
            i += 2;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<ContextEntry> gather_context(const Timeline& timeline, std::size_t row_index) {
    std::vector<ContextEntry> out;
    const auto& events = timeline.events();
    if (row_index >= events.size()) {
        return out;
    }
    const std::size_t first = row_index >= context_radius ? row_index - context_radius : 0;
    const std::size_t last = std::min(events.size() - 1, row_index + context_radius);
    for (std::size_t i = first; i <= last; ++i) {
        if (i == row_index) {
            continue;
        }
        out.push_back({events[i].datetime, events[i].message, events[i].parser});
    }
    return out;
}

std::optional<DetectorHit> match_row(const EventTypeSpec& spec, const LowLevelEvent& row) {
    for (const auto& detector : spec.detectors) {
        if (!std::regex_search(row.parser, detector.parser_re)) {
            continue;
        }
        std::smatch m;
        if (!std::regex_search(row.message, m, detector.message_re)) {
            continue;
        }
        if (detector.exclude_re && std::regex_search(row.message, *detector.exclude_re)) {
            continue;
        }
        DetectorHit hit;
        for (const auto& extractor : detector.extractors) {
            hit.keys.emplace_back(extractor.key,
                                  apply_transform(m[extractor.group].str(), extractor.transform));
        }
        hit.description = fill_template(spec.description_template, hit.keys);
        hit.reason = detector.reason;
        return hit;
    }
    return std::nullopt;
}

std::vector<HighLevelEvent> summarize(const Timeline& timeline, std::string_view selector) {
    std::vector<const EventTypeSpec*> active;
    if (selector == "all") {
        for (const auto& spec : list_analyzers()) {
            active.push_back(&spec);
        }
    } else if (const auto* spec = find_analyzer(selector)) {
        active.push_back(spec);
    } else {
        throw UnknownEventType("unknown event type '" + std::string(selector) + "'");
    }

    struct Pending {
        std::size_t row;
        std::size_t analyzer;
        HighLevelEvent event;
    };
    std::vector<Pending> pending;
    const auto& rows = timeline.events();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        for (std::size_t a = 0; a < active.size(); ++a) {
            const auto hit = match_row(*active[a], row);
            if (!hit) {
                continue;
            }
            HighLevelEvent ev;
            ev.date_time_min = row.instant;
            ev.date_time_max = row.instant;
            ev.evidence_source = row.message;
            ev.type = active[a]->name;
            ev.description = hit->description;
            ev.category = active[a]->category;
            ev.plugin = row.source + "-" + row.source_long + "-" + row.parser;
            ev.files = row.display_name;
            ev.keys = hit->keys;
            ev.supporting = gather_context(timeline, r);
            ev.trigger = {row.datetime, row.message, row.parser, hit->reason};
            pending.push_back({r, a, std::move(ev)});
        }
    }
    std::stable_sort(pending.begin(), pending.end(), [](const Pending& x, const Pending& y) {
        return x.event.date_time_min < y.event.date_time_min;
    });
    std::vector<HighLevelEvent> out;
    out.reserve(pending.size());
    for (auto& p : pending) {
        p.event.id = static_cast<long long>(out.size()) + 1;
        out.push_back(std::move(p.event));
    }
    return out;
}

Json event_to_json(const HighLevelEvent& event) {
    Json keys = Json::object();
    for (const auto& [k, v] : event.keys) {
        keys[k] = v;
    }
    Json supporting = Json::array();
    for (const auto& entry : event.supporting) {
        supporting.push_back(context_to_json(entry));
    }
    return Json{{"id", event.id},
                {"date_time_min", format_instant(event.date_time_min)},
                {"date_time_max", format_instant(event.date_time_max)},
                {"evidence_source", event.evidence_source},
                {"type", event.type},
                {"description", event.description},
                {"category", std::string(to_string(event.category))},
                {"plugin", event.plugin},
                {"files", event.files},
                {"keys", keys},
                {"supporting", supporting},
                {"trigger", Json{{"datetime", event.trigger.datetime},
                                 {"message", event.trigger.message},
                                 {"parser", event.trigger.parser},
                                 {"reason", event.trigger.reason}}}};
}

HighLevelEvent event_from_json(const Json& value) {
    HighLevelEvent ev;
    ev.id = value.at("id").get<long long>();
    ev.date_time_min = get_instant(value, "date_time_min");
    ev.date_time_max = get_instant(value, "date_time_max");
    ev.evidence_source = get_string(value, "evidence_source");
    ev.type = get_string(value, "type");
    ev.description = get_string(value, "description");
    const auto category = parse_category(get_string(value, "category"));
    if (!category) {
        throw Error("unknown category '" + get_string(value, "category") + "'");
    }
    ev.category = *category;
    ev.plugin = get_string(value, "plugin");
    ev.files = get_string(value, "files");
    for (const auto& [k, v] : value.at("keys").items()) {
        ev.keys.emplace_back(k, v.get<std::string>());
    }
    for (const auto& entry : value.at("supporting")) {
        ev.supporting.push_back({get_string(entry, "datetime"), get_string(entry, "message"),
                                 get_string(entry, "parser")});
    }
    const auto& trig = value.at("trigger");
    ev.trigger = {get_string(trig, "datetime"), get_string(trig, "message"),
                  get_string(trig, "parser"), get_string(trig, "reason")};
    return ev;
}

Json summary_to_json(const std::vector<HighLevelEvent>& events) {
    Json out = Json::object();
    for (std::size_t i = 0; i < events.size(); ++i) {
        out[std::to_string(i)] = event_to_json(events[i]);
    }
    return out;
}

std::string serialize_summary(const std::vector<HighLevelEvent>& events) {
    return canonical_dump(summary_to_json(events));
}

std::vector<HighLevelEvent> parse_summary(std::string_view json_text) {
    const auto doc = Json::parse(json_text);
    if (!doc.is_object()) {
        throw Error("summary must be a JSON object");
    }
    std::vector<HighLevelEvent> out;
    for (const auto& [key, value] : doc.items()) {
        out.push_back(event_from_json(value));
    }
    return out;
}

} // namespace tleval
