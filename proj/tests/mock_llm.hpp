#pragma once

// A local chat-completions server for live-mode tests. Its "model" answers each
// task by running the library on the timeline chunk embedded in the prompt, so
// the evaluation flow can be exercised end to end without network access.
// Prompts without additional knowledge get deliberately degraded answers.

#include "tleval/eda.hpp"
#include "tleval/json_text.hpp"
#include "tleval/rules.hpp"
#include "tleval/search.hpp"
#include "tleval/summarizer.hpp"
#include "tleval/timeline.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mock {

inline std::string between(const std::string& text, const std::string& open, const std::string& close) {
    const auto a = text.find(open);
    if (a == std::string::npos) {
        return {};
    }
    const auto from = a + open.size();
    const auto b = text.find(close, from);
    return b == std::string::npos ? std::string() : text.substr(from, b - from);
}

inline std::string timeline_chunk(const std::string& prompt) {
    const std::string open = "timeline.csv:\n```csv\n";
    const auto a = prompt.rfind(open);
    const auto b = prompt.rfind("```");
    if (a == std::string::npos || b == std::string::npos || b < a + open.size()) {
        return {};
    }
    return prompt.substr(a + open.size(), b - a - open.size());
}

inline std::string fence(const std::string& lang, const std::string& body) {
    return "Here is the result.\n\n```" + lang + "\n" + body +
           (body.empty() || body.back() == '\n' ? "" : "\n") + "```\n";
}

/// The answer a well-behaved model would give; without knowledge it is degraded.
inline std::string answer(const std::string& prompt) {
    using namespace tleval;
    const auto csv = timeline_chunk(prompt);
    const auto timeline = parse_timeline(csv, ParseMode::Lenient).timeline;
    const bool with = prompt.find("For your references") != std::string::npos ||
                      prompt.find("Read this list of keywords") != std::string::npos ||
                      prompt.find("Use this event summarization library") != std::string::npos;

    if (prompt.find("I need to find these terms: ") != std::string::npos) {
        const auto pattern =
            between(prompt, "I need to find these terms: ", " in the given CSV file");
        auto lines = grep_timeline(timeline, SearchPattern(pattern));
        if (!with && !lines.empty()) {
            lines.pop_back();
        }
        return fence("", format_grep_output(lines));
    }
    if (prompt.find("Format your answer using this JSON format") != std::string::npos) {
        RuleSet rules = default_rules();
        if (with) {
            rules = load_rules(between(prompt, "keywords.json:\n```json\n", "```"));
        } else {
            rules.resize(2);
        }
        return fence("json", canonical_dump(detections_to_json(detect(timeline, rules))));
    }
    if (prompt.find("summarize the low-level events") != std::string::npos) {
        const auto type = between(prompt, "The event type of interest is ", ".\n");
        auto events = summarize(timeline, type.empty() ? "all" : type);
        if (!with) {
            std::reverse(events.begin(), events.end());
            for (auto& e : events) {
                e.supporting.clear();
            }
        }
        return fence("json", serialize_summary(events));
    }
    if (prompt.find("per second") != std::string::npos) {
        return fence("csv", histogram_to_csv(per_second_histogram(timeline)));
    }
    return "I am not sure what you are asking for.";
}

class Server {
public:
    /// `responder` maps the request JSON to (status, body); the default answers
    /// every prompt with `answer()` in chat-completions format.
    using Responder = std::function<std::pair<int, std::string>(const tleval::Json&)>;

    explicit Server(Responder responder = {}) : responder_(std::move(responder)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const auto request = tleval::Json::parse(req.body);
            {
                std::lock_guard lock(mutex_);
                requests_.push_back(request);
                auth_headers_.push_back(req.get_header_value("Authorization"));
            }
            std::pair<int, std::string> reply;
            if (responder_) {
                reply = responder_(request);
            } else {
                reply = {200, completion(answer(request.at("messages").at(0).at("content").get<std::string>()))};
            }
            res.status = reply.first;
            res.set_content(reply.second, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~Server() {
        server_.stop();
        thread_.join();
    }

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    std::size_t request_count() const {
        std::lock_guard lock(mutex_);
        return requests_.size();
    }
    std::vector<std::string> auth_headers() const {
        std::lock_guard lock(mutex_);
        return auth_headers_;
    }

    static std::string completion(const std::string& content) {
        return tleval::Json{{"id", "chatcmpl-mock"},
                            {"object", "chat.completion"},
                            {"choices", tleval::Json::array({tleval::Json{
                                            {"index", 0},
                                            {"message", {{"role", "assistant"}, {"content", content}}},
                                            {"finish_reason", "stop"}}})}}
            .dump();
    }

private:
    Responder responder_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<tleval::Json> requests_;
    std::vector<std::string> auth_headers_;
};

} // namespace mock
