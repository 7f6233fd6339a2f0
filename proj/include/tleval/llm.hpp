#pragma once

// Task prompts, a chat-completions client with record/replay, and artifact extraction.

#include "tleval/error.hpp"
#include "tleval/json_text.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tleval {

enum class Task { Grep, Rules, Summarize, Eda };
enum class Knowledge { With, Without };
enum class ArtifactKind { Json, Text };

Task parse_task(std::string_view name);
std::string_view to_string(Task task);
Knowledge parse_knowledge(std::string_view name);
std::string_view to_string(Knowledge knowledge);

class MissingInput : public ConfigError {
public:
    using ConfigError::ConfigError;
};

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct PromptInputs {
    std::string timeline_csv;            ///< the chunk, header included
    std::string pattern;                 ///< grep: extended regex
    std::string pattern_purpose;         ///< grep: what the matches are related to
    std::optional<std::string> rules_json;
    std::string event_type = "all";      ///< summarize: analyzer slug or "all"
    std::optional<std::string> library_payload;  ///< summarize: overrides the built-in payload
    std::size_t line_budget = 2000;
};

struct PromptBundle {
    Task task;
    Knowledge knowledge;
    std::vector<ChatMessage> messages;
    ArtifactKind artifact = ArtifactKind::Text;
};

/// Pure function of its arguments. Throws MissingInput when a required input is absent
/// or the chunk exceeds the line budget.
PromptBundle build_prompt(Task task, Knowledge knowledge, const PromptInputs& inputs);

/// Machine-readable description of the analyzers handed to the model as "the library".
std::string summarizer_library_payload();

Json messages_to_json(const std::vector<ChatMessage>& messages);

/// Hex SHA-256 over the model name and the canonical message list.
std::string prompt_hash(std::string_view model, const std::vector<ChatMessage>& messages);

struct SessionConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4o";
    double temperature = 0.0;
    std::string api_key_env = "OPENAI_API_KEY";
    int max_retries = 4;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds max_backoff{8000};
    std::chrono::seconds timeout{180};
};

enum class SessionMode { Live, Replay };

struct TranscriptEntry {
    Json request;       ///< model, temperature, messages and prompt_hash; never credentials
    std::string response;
    std::string timestamp;
};

Json transcript_to_json(const std::vector<TranscriptEntry>& entries);
std::vector<TranscriptEntry> transcript_from_json(const Json& value);

class TransportError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

class ReplayMiss : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

class BadArtifact : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

class LlmSession {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    LlmSession(SessionConfig config, SessionMode mode,
               std::vector<TranscriptEntry> transcript = {});

    /// Live: POST {endpoint}/chat/completions, retrying transient failures with capped
    /// exponential backoff, and append the exchange to the transcript.
    /// Replay: return recorded responses for the prompt hash in recorded order; no I/O.
    std::string complete(const PromptBundle& bundle);

    SessionMode mode() const noexcept { return mode_; }
    const SessionConfig& config() const noexcept { return config_; }
    std::vector<TranscriptEntry> transcript() const;

    /// Replaces the sleep used between retries (tests).
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

private:
    std::string complete_live(const PromptBundle& bundle, const std::string& hash);
    std::string complete_replay(const std::string& hash);

    SessionConfig config_;
    SessionMode mode_;
    mutable std::mutex mutex_;
    std::vector<TranscriptEntry> transcript_;
    std::map<std::string, std::size_t> replay_cursor_;
    Sleeper sleeper_;
};

/// The last fenced code block suited to `kind`, else the whole response.
/// JSON artifacts must parse; otherwise BadArtifact.
std::string extract_artifact(std::string_view response, ArtifactKind kind);

} // namespace tleval
