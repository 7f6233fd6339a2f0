#include "tleval/llm.hpp"

#include "tleval/summarizer.hpp"
#include "tleval/timeline.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <thread>

namespace tleval {

namespace {

constexpr const char* persona = "I am a forensic investigator.";
constexpr const char* plaso_origin =
    "The CSV file is a forensic timeline generated from the log2timeline/Plaso tool.";

constexpr const char* detection_format = R"({
  "datetime": "datetime_here",
  "event": "event_name_here",
  "keyword": "keyword_here",
  "message": "message_from_logs_here"
})";

std::size_t count_data_lines(std::string_view csv) {
    std::size_t lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    if (!csv.empty() && csv.back() != '\n') {
        ++lines;
    }
    return lines > 0 ? lines - 1 : 0;
}

std::string fenced(std::string_view name, std::string_view lang, std::string_view body) {
    std::string out(name);
    out += ":\n```";
    out += lang;
    out += "\n";
    out += body;
    if (!body.empty() && body.back() != '\n') {
        out += "\n";
    }
    out += "```";
    return out;
}

std::string join_paragraphs(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& part : parts) {
        if (!out.empty()) {
            out += "\n\n";
        }
        out += part;
    }
    return out;
}

std::string utc_now_iso() {
    const auto now = std::chrono::time_point_cast<Microseconds>(std::chrono::system_clock::now());
    return format_instant_iso(now);
}

struct Endpoint {
    std::string origin;  ///< scheme://host[:port]
    std::string path;    ///< base path, no trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must be an absolute http(s) URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = url.substr(0, path_start);
    ep.path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!ep.path.empty() && ep.path.back() == '/') {
        ep.path.pop_back();
    }
    return ep;
}

struct Fence {
    std::string info;
    std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
    std::vector<Fence> blocks;
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    auto fence_of = [](std::string_view line, std::string_view& info) {
        std::size_t indent = 0;
        while (indent < line.size() && indent < 3 && line[indent] == ' ') {
            ++indent;
        }
        line.remove_prefix(indent);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.substr(0, 3) != "```") {
            return false;
        }
        info = line.substr(3);
        while (!info.empty() && info.front() == '`') {
            info.remove_prefix(1);
        }
        while (!info.empty() && (info.front() == ' ')) {
            info.remove_prefix(1);
        }
        while (!info.empty() && (info.back() == ' ')) {
            info.remove_suffix(1);
        }
        return true;
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view info;
        if (!fence_of(lines[i], info)) {
            continue;
        }
        Fence block;
        block.info = std::string(info);
        std::size_t j = i + 1;
        bool closed = false;
        for (; j < lines.size(); ++j) {
            std::string_view closing;
            if (fence_of(lines[j], closing) && closing.empty()) {
                closed = true;
                break;
            }
            block.body += lines[j];
            block.body += '\n';
        }
        if (!closed) {
            break;
        }
        blocks.push_back(std::move(block));
        i = j;
    }
    return blocks;
}

bool parses_as_json(std::string_view text) {
    return Json::accept(text);
}

} // namespace

Task parse_task(std::string_view name) {
    if (name == "grep") return Task::Grep;
    if (name == "rules") return Task::Rules;
    if (name == "summarize") return Task::Summarize;
    if (name == "eda") return Task::Eda;
    throw MissingInput("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(Task task) {
    switch (task) {
    case Task::Grep: return "grep";
    case Task::Rules: return "rules";
    case Task::Summarize: return "summarize";
    case Task::Eda: return "eda";
    }
    return "grep";
}

Knowledge parse_knowledge(std::string_view name) {
    if (name == "with") return Knowledge::With;
    if (name == "without") return Knowledge::Without;
    throw ConfigError("knowledge must be 'with' or 'without', got '" + std::string(name) + "'");
}

std::string_view to_string(Knowledge knowledge) {
    return knowledge == Knowledge::With ? "with" : "without";
}

std::string summarizer_library_payload() {
    Json analyzers = Json::array();
    for (const auto& spec : list_analyzers()) {
        Json detectors = Json::array();
        for (const auto& d : spec.detectors) {
            Json keys = Json::array();
            for (const auto& k : d.extractors) {
                const char* transform = k.transform == ValueTransform::Basename    ? "basename"
                                        : k.transform == ValueTransform::UrlDecode ? "url-decode"
                                                                                   : "verbatim";
                keys.push_back(Json{{"key", k.key}, {"group", k.group}, {"transform", transform}});
            }
            detectors.push_back(Json{{"reason", d.reason},
                                     {"parser_pattern", d.parser_pattern},
                                     {"message_pattern", d.message_pattern},
                                     {"exclude_pattern", d.exclude_pattern},
                                     {"keys", keys}});
        }
        analyzers.push_back(Json{{"type", spec.name},
                                 {"selector", spec.slug},
                                 {"category", std::string(to_string(spec.category))},
                                 {"description", spec.description_template},
                                 {"detectors", detectors}});
    }
    Json payload{
        {"analyzers", analyzers},
        {"procedure",
         Json::array({"Parse the CSV with its header; use the datetime, message, parser, source, "
                      "source_long and display_name columns.",
                      "For every row and every selected analyzer, try the detectors in order: "
                      "the parser column must match parser_pattern, the message must match "
                      "message_pattern and must not match exclude_pattern.",
                      "Each match is one event: date_time_min = date_time_max = the row datetime "
                      "in UTC written as 'YYYY-MM-DD HH:MM:SS.ffffff+00:00'; evidence_source = "
                      "message; plugin = source-source_long-parser; files = display_name; keys "
                      "from the capture groups; description from the template.",
                      "supporting = the five rows before and the five rows after (datetime, "
                      "message, parser); trigger = the matched row (datetime, message, parser, "
                      "reason).",
                      "Sort events by date_time_min (ties keep row order), number ids from 1, "
                      "and emit {\"0\": {...}, \"1\": {...}} with fields id, date_time_min, "
                      "date_time_max, evidence_source, type, description, category, plugin, "
                      "files, keys, supporting, trigger."})}};
    return canonical_dump(payload);
}

PromptBundle build_prompt(Task task, Knowledge knowledge, const PromptInputs& inputs) {
    if (inputs.timeline_csv.empty()) {
        throw MissingInput("prompt needs a timeline chunk");
    }
    if (count_data_lines(inputs.timeline_csv) > inputs.line_budget) {
        throw MissingInput("timeline chunk exceeds the line budget of " +
                           std::to_string(inputs.line_budget) + " rows");
    }
    const bool with = knowledge == Knowledge::With;
    const auto timeline = fenced("timeline.csv", "csv", inputs.timeline_csv);
    PromptBundle bundle{task, knowledge, {}, ArtifactKind::Text};
    std::vector<std::string> parts;

    switch (task) {
    case Task::Grep: {
        if (inputs.pattern.empty()) {
            throw MissingInput("grep prompt needs a pattern");
        }
        const auto purpose =
            inputs.pattern_purpose.empty() ? std::string("the pattern") : inputs.pattern_purpose;
        parts.push_back(std::string(persona) + " I need to find these terms: " + inputs.pattern +
                        " in the given CSV file to get all entries related to " + purpose + ". " +
                        plaso_origin);
        if (with) {
            parts.push_back("For your references, the grep command is: grep -E \"" +
                            inputs.pattern + "\" timeline.csv.");
        }
        parts.push_back("Do not include the first line of the file containing column names. "
                        "Include all columns in the results, not only the message column. "
                        "Export the results into plain text.");
        parts.push_back("Return the exported file content in a single fenced code block.");
        break;
    }
    case Task::Rules: {
        bundle.artifact = ArtifactKind::Json;
        if (with) {
            if (!inputs.rules_json) {
                throw MissingInput("rule detection with knowledge needs a keyword file");
            }
            parts.push_back(std::string(persona) +
                            " Read this list of keywords to find suspicious events.");
            parts.push_back(fenced("keywords.json", "json", *inputs.rules_json));
        } else {
            parts.push_back(std::string(persona) +
                            " Find suspicious events in the given CSV file. " + plaso_origin);
        }
        parts.push_back(std::string("Format your answer using this JSON format:\n") +
                        detection_format);
        parts.push_back("I need all entries of suspicious entries. Export to a JSON file for all "
                        "of the results.");
        parts.push_back("Return the exported JSON file content in a single fenced code block.");
        break;
    }
    case Task::Summarize: {
        bundle.artifact = ArtifactKind::Json;
        if (inputs.event_type != "all" && find_analyzer(inputs.event_type) == nullptr) {
            throw MissingInput("unknown event type '" + inputs.event_type + "'");
        }
        const bool all = inputs.event_type == "all";
        parts.push_back(std::string(persona) +
                        " I need to summarize the low-level events in the given CSV file into "
                        "high-level events. " +
                        plaso_origin);
        parts.push_back(all ? std::string("Summarize all supported event types.")
                            : "The event type of interest is " + inputs.event_type + ".");
        if (with) {
            parts.push_back(fenced("Use this event summarization library", "json",
                                   inputs.library_payload ? *inputs.library_payload
                                                          : summarizer_library_payload()));
            parts.push_back("Steps to run an event summarization: 1. Read the uploaded CSV file. "
                            "2. Select the event type " +
                            inputs.event_type +
                            ". 3. Run the summarization using the given library. 4. Export the "
                            "result to a JSON file.");
        } else {
            parts.push_back("Export the result to a JSON file.");
        }
        parts.push_back("Return the exported JSON file content in a single fenced code block.");
        break;
    }
    case Task::Eda:
        parts.push_back("Explore patterns of event occurrences based on the datetime field per "
                        "second (e.g., busiest times, significant gaps), use a bar chart. Write "
                        "the hour:minute:second in the x axis");
        parts.push_back("Return the chart data as CSV with the columns second,count in a single "
                        "fenced code block.");
        break;
    }
    parts.push_back(timeline);
    bundle.messages.push_back({"user", join_paragraphs(parts)});
    return bundle;
}

Json messages_to_json(const std::vector<ChatMessage>& messages) {
    Json out = Json::array();
    for (const auto& m : messages) {
        out.push_back(Json{{"role", m.role}, {"content", m.content}});
    }
    return out;
}

std::string prompt_hash(std::string_view model, const std::vector<ChatMessage>& messages) {
    const std::string payload =
        Json{{"model", model}, {"messages", messages_to_json(messages)}}.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

Json transcript_to_json(const std::vector<TranscriptEntry>& entries) {
    Json out = Json::array();
    for (const auto& e : entries) {
        out.push_back(Json{{"request", e.request}, {"response", e.response},
                           {"timestamp", e.timestamp}});
    }
    return out;
}

std::vector<TranscriptEntry> transcript_from_json(const Json& value) {
    if (!value.is_array()) {
        throw ConfigError("transcript must be a JSON array");
    }
    std::vector<TranscriptEntry> out;
    for (const auto& item : value) {
        out.push_back({item.at("request"), item.at("response").get<std::string>(),
                       item.value("timestamp", std::string())});
    }
    return out;
}

LlmSession::LlmSession(SessionConfig config, SessionMode mode,
                       std::vector<TranscriptEntry> transcript)
    : config_(std::move(config)), mode_(mode), transcript_(std::move(transcript)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

std::vector<TranscriptEntry> LlmSession::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::string LlmSession::complete(const PromptBundle& bundle) {
    const auto hash = prompt_hash(config_.model, bundle.messages);
    return mode_ == SessionMode::Replay ? complete_replay(hash) : complete_live(bundle, hash);
}

std::string LlmSession::complete_replay(const std::string& hash) {
    std::lock_guard lock(mutex_);
    std::vector<std::size_t> matches;
    for (std::size_t i = 0; i < transcript_.size(); ++i) {
        if (transcript_[i].request.value("prompt_hash", std::string()) == hash) {
            matches.push_back(i);
        }
    }
    if (matches.empty()) {
        throw ReplayMiss("no recorded response for prompt " + hash.substr(0, 12));
    }
    auto& cursor = replay_cursor_[hash];
    const auto pick = matches[std::min(cursor, matches.size() - 1)];
    ++cursor;
    return transcript_[pick].response;
}

std::string LlmSession::complete_live(const PromptBundle& bundle, const std::string& hash) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("live mode needs an API key in $" + config_.api_key_env);
    }
    const auto endpoint = split_endpoint(config_.endpoint);
    Json request{{"model", config_.model},
                 {"temperature", config_.temperature},
                 {"messages", messages_to_json(bundle.messages)}};
    const std::string body = request.dump();

    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};

    std::string last_error;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            sleeper_(backoff);
            backoff = std::min(backoff * 2, config_.max_backoff);
        }
        auto res = client.Post(endpoint.path + "/chat/completions", headers, body,
                               "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
        }
        std::string content;
        try {
            const auto reply = Json::parse(res->body);
            content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception& e) {
            throw TransportError(std::string("malformed chat-completions reply: ") + e.what());
        }
        Json record = request;
        record["prompt_hash"] = hash;
        std::lock_guard lock(mutex_);
        transcript_.push_back({std::move(record), content, utc_now_iso()});
        return content;
    }
    throw TransportError("giving up after " + std::to_string(config_.max_retries + 1) +
                         " attempts: " + last_error);
}

std::string extract_artifact(std::string_view response, ArtifactKind kind) {
    const auto blocks = fenced_blocks(response);
    if (kind == ArtifactKind::Text) {
        return blocks.empty() ? std::string(response) : blocks.back().body;
    }
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        if (it->info == "json" || parses_as_json(it->body)) {
            if (!parses_as_json(it->body)) {
                throw BadArtifact("fenced json block does not parse");
            }
            return it->body;
        }
    }
    if (parses_as_json(response)) {
        return std::string(response);
    }
    throw BadArtifact("response holds no parseable JSON artifact");
}

} // namespace tleval
