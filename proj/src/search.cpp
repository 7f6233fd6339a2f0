#include "tleval/search.hpp"

#include <regex.h>

namespace tleval {

struct SearchPattern::Compiled {
    regex_t regex{};

    explicit Compiled(const std::string& expression) {
        const int rc = regcomp(&regex, expression.c_str(), REG_EXTENDED | REG_NOSUB);
        if (rc != 0) {
            char buf[256];
            regerror(rc, &regex, buf, sizeof buf);
            throw InvalidPattern("invalid pattern '" + expression + "': " + buf);
        }
    }
    ~Compiled() { regfree(&regex); }
    Compiled(const Compiled&) = delete;
    Compiled& operator=(const Compiled&) = delete;
};

SearchPattern::SearchPattern(std::string expression)
    : expression_(std::move(expression)),
      compiled_(std::make_shared<const Compiled>(expression_)) {}

bool SearchPattern::matches(std::string_view line) const {
    // REG_STARTEND lets us match a view without copying and tolerates embedded NULs.
    regmatch_t range[1];
    range[0].rm_so = 0;
    range[0].rm_eo = static_cast<regoff_t>(line.size());
    return regexec(&compiled_->regex, line.data(), 1, range, REG_STARTEND) == 0;
}

const std::vector<PresetPattern>& preset_patterns() {
    static const std::vector<PresetPattern> presets = {
        {"registered-applications", "RegisteredApplications",
         "registered applications in Windows registry"},
        {"onedrive", "(OneDrive|OneDrive\\.exe)", "Microsoft OneDrive application"},
        {"executables", "\\b[A-Za-z0-9_\\-\\\\:.]+\\.exe\\b", "executable files (.exe)"},
        {"time-change", "4616 /", "Windows event ID 4616 (system time change)"},
        {"time-change-svchost",
         "\\[4616 / 0x1208\\].*Microsoft-Windows-Security-Auditing.*svchost.exe",
         "Windows event ID 4616 (system time change) made by svchost.exe"},
    };
    return presets;
}

std::vector<std::string> grep_timeline(const Timeline& timeline, const SearchPattern& pattern) {
    std::vector<std::string> out;
    const bool crlf = timeline.line_ending() == "\r\n";
    for (const auto& event : timeline.events()) {
        std::string_view rest = event.raw_line;
        while (true) {
            const auto nl = rest.find('\n');
            if (nl == std::string_view::npos) {
                break;
            }
            const auto line = rest.substr(0, nl);
            if (pattern.matches(line)) {
                out.emplace_back(line);
            }
            rest.remove_prefix(nl + 1);
        }
        std::string line(rest);
        if (crlf) {
            line.push_back('\r');
        }
        if (pattern.matches(line)) {
            out.push_back(std::move(line));
        }
    }
    return out;
}

std::string format_grep_output(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

Normalization parse_normalization(std::string_view name) {
    if (name == "none") return Normalization::None;
    if (name == "collapse-spaces") return Normalization::CollapseSpaces;
    if (name == "strip-commas") return Normalization::StripCommas;
    if (name == "both") return Normalization::Both;
    throw ConfigError("unknown normalization policy '" + std::string(name) + "'");
}

std::string_view to_string(Normalization policy) {
    switch (policy) {
    case Normalization::None: return "none";
    case Normalization::CollapseSpaces: return "collapse-spaces";
    case Normalization::StripCommas: return "strip-commas";
    case Normalization::Both: return "both";
    }
    return "none";
}

std::string normalize_text(std::string_view text, Normalization policy) {
    const bool strip = policy == Normalization::StripCommas || policy == Normalization::Both;
    const bool collapse =
        policy == Normalization::CollapseSpaces || policy == Normalization::Both;
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        if (strip && c == ',') {
            continue;
        }
        if (collapse && c == ' ' && !out.empty() && out.back() == ' ') {
            continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace tleval
