#pragma once

// BLEU and ROUGE text-similarity scores.
//
//   BLEU    = BP * exp(sum_n w_n * log p_n)
//   BP      = 1 if c > r, else exp(1 - r/c)
//   ROUGE-N = sum Count_match(gram) / sum Count(gram)    (over reference n-grams)
//   ROUGE-L = LCS(reference, candidate) / Length(reference)
//
// p_n is the clipped (modified) n-gram precision. No smoothing is applied, so a
// zero p_n makes BLEU zero. ROUGE defaults to the recall form above; an F1 form is
// available. All scores are document-level: one candidate against one reference.

#include "tleval/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tleval {

enum class Tokenizer {
    Whitespace,  ///< split on ASCII whitespace, case preserved
    AlnumLower,  ///< lowercase, split on runs of non-alphanumeric ASCII (bytes >= 0x80 are kept)
};

enum class RougeVariant { Recall, F1 };

Tokenizer parse_tokenizer(std::string_view name);
std::string_view to_string(Tokenizer tokenizer);
RougeVariant parse_rouge_variant(std::string_view name);
std::string_view to_string(RougeVariant variant);

struct MetricConfig {
    std::size_t max_n = 4;
    std::vector<double> weights;  ///< empty means uniform 1/max_n
    Tokenizer tokenizer = Tokenizer::AlnumLower;
    RougeVariant rouge_variant = RougeVariant::Recall;

    /// Throws ConfigError unless max_n >= 1 and the weights (if given) are max_n
    /// non-negative values summing to 1.
    void validate() const;
    std::vector<double> effective_weights() const;
};

using Tokens = std::vector<std::string>;

Tokens tokenize(std::string_view text, Tokenizer tokenizer);

class EmptyReference : public Error {
public:
    EmptyReference() : Error("reference text has no tokens") {}
};

struct BleuReport {
    double score = 0.0;
    std::vector<double> precisions;     ///< p_1..p_N
    std::vector<std::size_t> matches;   ///< clipped matches per order
    std::vector<std::size_t> totals;    ///< candidate n-grams per order
    double bp = 0.0;
    std::size_t candidate_len = 0;      ///< c
    std::size_t reference_len = 0;      ///< r
};

struct RougeReport {
    double score = 0.0;                 ///< recall or F1, per config
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    std::size_t match_count = 0;        ///< clipped n-gram matches (ROUGE-N) or LCS (ROUGE-L)
    std::size_t total_count = 0;        ///< reference n-grams (ROUGE-N) or reference length (ROUGE-L)
    std::size_t candidate_count = 0;    ///< candidate n-grams or candidate length
    std::size_t lcs_length = 0;         ///< ROUGE-L only
    std::size_t reference_length = 0;   ///< reference token count
};

struct MetricBundle {
    double bleu = 0.0;
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rougeL = 0.0;
    double mean = 0.0;

    static MetricBundle from_scores(double bleu, double rouge1, double rouge2, double rougeL);
};

BleuReport bleu(const Tokens& candidate, const Tokens& reference, const MetricConfig& cfg = {});
BleuReport bleu(std::string_view candidate, std::string_view reference,
                const MetricConfig& cfg = {});

/// A reference shorter than `n` tokens (but not empty) has no n-grams and scores 0.
RougeReport rouge_n(const Tokens& candidate, const Tokens& reference, std::size_t n,
                    const MetricConfig& cfg = {});
RougeReport rouge_n(std::string_view candidate, std::string_view reference, std::size_t n,
                    const MetricConfig& cfg = {});

RougeReport rouge_l(const Tokens& candidate, const Tokens& reference, const MetricConfig& cfg = {});
RougeReport rouge_l(std::string_view candidate, std::string_view reference,
                    const MetricConfig& cfg = {});

MetricBundle score_bundle(const Tokens& candidate, const Tokens& reference,
                          const MetricConfig& cfg = {});
MetricBundle score_bundle(std::string_view candidate, std::string_view reference,
                          const MetricConfig& cfg = {});

/// Length of the longest common subsequence (bit-parallel, O(|a|*|b|/64)).
std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// Half-up rounding to `places` decimals, as used for report display.
double round_half_up(double value, int places = 3);

} // namespace tleval
