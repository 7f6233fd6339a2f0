#include "tleval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace tleval {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// N-grams are keyed by their tokens joined with a unit separator, which neither
// tokenizer can emit inside a token.
NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
    NgramCounts counts;
    if (n == 0 || tokens.size() < n) {
        return counts;
    }
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
            key.push_back('\x1f');
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t clipped_matches(const NgramCounts& candidate, const NgramCounts& reference) {
    std::size_t matches = 0;
    for (const auto& [gram, count] : candidate) {
        const auto it = reference.find(gram);
        if (it != reference.end()) {
            matches += std::min(count, it->second);
        }
    }
    return matches;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

void fill_rouge_scores(RougeReport& report, const MetricConfig& cfg) {
    report.recall = ratio(report.match_count, report.total_count);
    report.precision = ratio(report.match_count, report.candidate_count);
    report.f1 = harmonic(report.precision, report.recall);
    report.score = cfg.rouge_variant == RougeVariant::F1 ? report.f1 : report.recall;
}

} // namespace

Tokenizer parse_tokenizer(std::string_view name) {
    if (name == "alnum-lower") return Tokenizer::AlnumLower;
    if (name == "whitespace") return Tokenizer::Whitespace;
    throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
}

std::string_view to_string(Tokenizer tokenizer) {
    return tokenizer == Tokenizer::AlnumLower ? "alnum-lower" : "whitespace";
}

RougeVariant parse_rouge_variant(std::string_view name) {
    if (name == "recall") return RougeVariant::Recall;
    if (name == "f1") return RougeVariant::F1;
    throw ConfigError("unknown ROUGE variant '" + std::string(name) + "'");
}

std::string_view to_string(RougeVariant variant) {
    return variant == RougeVariant::Recall ? "recall" : "f1";
}

void MetricConfig::validate() const {
    if (max_n < 1) {
        throw ConfigError("max_n must be at least 1");
    }
    if (weights.empty()) {
        return;
    }
    if (weights.size() != max_n) {
        throw ConfigError("expected " + std::to_string(max_n) + " BLEU weights");
    }
    double sum = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0)) {
            throw ConfigError("BLEU weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("BLEU weights must sum to 1");
    }
}

std::vector<double> MetricConfig::effective_weights() const {
    if (!weights.empty()) {
        return weights;
    }
    return std::vector<double>(max_n, 1.0 / static_cast<double>(max_n));
}

Tokens tokenize(std::string_view text, Tokenizer tokenizer) {
    Tokens tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (tokenizer == Tokenizer::Whitespace) {
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                flush();
            } else {
                current.push_back(ch);
            }
        } else {
            const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                               (c >= 'A' && c <= 'Z') || c >= 0x80;
            if (alnum) {
                current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
            } else {
                flush();
            }
        }
    }
    flush();
    return tokens;
}

BleuReport bleu(const Tokens& candidate, const Tokens& reference, const MetricConfig& cfg) {
    cfg.validate();
    if (reference.empty()) {
        throw EmptyReference();
    }
    const auto weights = cfg.effective_weights();
    BleuReport report;
    report.candidate_len = candidate.size();
    report.reference_len = reference.size();

    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t n = 1; n <= cfg.max_n; ++n) {
        const auto cand = count_ngrams(candidate, n);
        const auto ref = count_ngrams(reference, n);
        const std::size_t total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
        const std::size_t matches = clipped_matches(cand, ref);
        const double p = ratio(matches, total);
        report.matches.push_back(matches);
        report.totals.push_back(total);
        report.precisions.push_back(p);
        const double w = weights[n - 1];
        if (w == 0.0) {
            continue;
        }
        if (p == 0.0) {
            zero = true;
        } else {
            log_sum += w * std::log(p);
        }
    }

    const double c = static_cast<double>(report.candidate_len);
    const double r = static_cast<double>(report.reference_len);
    if (report.candidate_len > report.reference_len) {
        report.bp = 1.0;
    } else if (report.candidate_len == 0) {
        report.bp = 0.0;
    } else {
        report.bp = std::exp(1.0 - r / c);
    }
    report.score = zero ? 0.0 : std::clamp(report.bp * std::exp(log_sum), 0.0, 1.0);
    return report;
}

BleuReport bleu(std::string_view candidate, std::string_view reference, const MetricConfig& cfg) {
    return bleu(tokenize(candidate, cfg.tokenizer), tokenize(reference, cfg.tokenizer), cfg);
}

RougeReport rouge_n(const Tokens& candidate, const Tokens& reference, std::size_t n,
                    const MetricConfig& cfg) {
    if (reference.empty()) {
        throw EmptyReference();
    }
    if (n == 0) {
        throw ConfigError("ROUGE-N needs n >= 1");
    }
    const auto cand = count_ngrams(candidate, n);
    const auto ref = count_ngrams(reference, n);
    RougeReport report;
    report.reference_length = reference.size();
    report.match_count = clipped_matches(cand, ref);
    report.total_count = reference.size() >= n ? reference.size() - n + 1 : 0;
    report.candidate_count = candidate.size() >= n ? candidate.size() - n + 1 : 0;
    fill_rouge_scores(report, cfg);
    return report;
}

RougeReport rouge_n(std::string_view candidate, std::string_view reference, std::size_t n,
                    const MetricConfig& cfg) {
    return rouge_n(tokenize(candidate, cfg.tokenizer), tokenize(reference, cfg.tokenizer), n, cfg);
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    if (a.empty() || b.empty()) {
        return 0;
    }
    // Bit i of V tracks row i of the DP table over `a`; zeros count the LCS.
    const std::size_t words = (a.size() + 63) / 64;
    std::unordered_map<std::string_view, std::vector<std::uint64_t>> match_masks;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto& mask = match_masks[a[i]];
        if (mask.empty()) {
            mask.assign(words, 0);
        }
        mask[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
    for (const auto& token : b) {
        const auto it = match_masks.find(token);
        if (it == match_masks.end()) {
            continue;
        }
        const auto& mask = it->second;
        std::uint64_t carry = 0;
        std::uint64_t borrow = 0;
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t u = v[w] & mask[w];
            const std::uint64_t sum_partial = v[w] + u;
            const std::uint64_t sum = sum_partial + carry;
            carry = (sum_partial < v[w] || sum < sum_partial) ? 1 : 0;
            const std::uint64_t diff_partial = v[w] - u;
            const std::uint64_t diff = diff_partial - borrow;
            borrow = (v[w] < u || diff_partial < borrow) ? 1 : 0;
            v[w] = sum | diff;
        }
    }
    std::size_t ones = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t word = v[w];
        const std::size_t bits = std::min<std::size_t>(64, a.size() - w * 64);
        if (bits < 64) {
            word &= (std::uint64_t{1} << bits) - 1;
        }
        ones += static_cast<std::size_t>(__builtin_popcountll(word));
    }
    return a.size() - ones;
}

RougeReport rouge_l(const Tokens& candidate, const Tokens& reference, const MetricConfig& cfg) {
    if (reference.empty()) {
        throw EmptyReference();
    }
    RougeReport report;
    report.reference_length = reference.size();
    report.lcs_length = lcs_length(reference, candidate);
    report.match_count = report.lcs_length;
    report.total_count = reference.size();
    report.candidate_count = candidate.size();
    fill_rouge_scores(report, cfg);
    return report;
}

RougeReport rouge_l(std::string_view candidate, std::string_view reference,
                    const MetricConfig& cfg) {
    return rouge_l(tokenize(candidate, cfg.tokenizer), tokenize(reference, cfg.tokenizer), cfg);
}

MetricBundle MetricBundle::from_scores(double bleu, double rouge1, double rouge2, double rougeL) {
    return {bleu, rouge1, rouge2, rougeL, (bleu + rouge1 + rouge2 + rougeL) / 4.0};
}

MetricBundle score_bundle(const Tokens& candidate, const Tokens& reference,
                          const MetricConfig& cfg) {
    return MetricBundle::from_scores(bleu(candidate, reference, cfg).score,
                                     rouge_n(candidate, reference, 1, cfg).score,
                                     rouge_n(candidate, reference, 2, cfg).score,
                                     rouge_l(candidate, reference, cfg).score);
}

MetricBundle score_bundle(std::string_view candidate, std::string_view reference,
                          const MetricConfig& cfg) {
    return score_bundle(tokenize(candidate, cfg.tokenizer), tokenize(reference, cfg.tokenizer),
                        cfg);
}

double round_half_up(double value, int places) {
    const double scale = std::pow(10.0, places);
    // The nudge absorbs representation error so that e.g. 0.96175 rounds up.
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

} // namespace tleval
