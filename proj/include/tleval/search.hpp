#pragma once

// Line-oriented extended-regex search over timelines, equivalent to `grep -E`.

#include "tleval/error.hpp"
#include "tleval/timeline.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tleval {

class InvalidPattern : public Error {
public:
    using Error::Error;
};

/// A compiled POSIX extended regular expression. GNU operators such as `\b`
/// are accepted, and matching runs in the C locale (byte semantics), which
/// is what `LC_ALL=C grep -E` does.
class SearchPattern {
public:
    /// Throws InvalidPattern when the expression does not compile.
    explicit SearchPattern(std::string expression);

    const std::string& expression() const noexcept { return expression_; }
    bool matches(std::string_view line) const;

private:
    struct Compiled;
    std::string expression_;
    std::shared_ptr<const Compiled> compiled_;
};

struct PresetPattern {
    std::string name;        ///< short file-safe identifier
    std::string expression;
    std::string purpose;     ///< what the entries are "related to"
};

/// The five reference search terms, in order.
const std::vector<PresetPattern>& preset_patterns();

/// Every physical data line (header excluded) that contains a match, in file order.
/// Records spanning several physical lines are matched line by line, as grep does.
std::vector<std::string> grep_timeline(const Timeline& timeline, const SearchPattern& pattern);

/// Joins lines the way grep prints them: each followed by a newline.
std::string format_grep_output(const std::vector<std::string>& lines);

enum class Normalization { None, CollapseSpaces, StripCommas, Both };

Normalization parse_normalization(std::string_view name);
std::string_view to_string(Normalization policy);

std::string normalize_text(std::string_view text, Normalization policy);

} // namespace tleval
