#pragma once

// Exploratory aggregations: events per second and timestamp-type transitions.

#include "tleval/json_text.hpp"
#include "tleval/timeline.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tleval {

struct SecondBucket {
    std::string label;      ///< hh:mm:ss (UTC)
    std::size_t count = 0;
    long long epoch_second = 0;
};

struct SecondHistogram {
    std::vector<SecondBucket> buckets;  ///< strictly increasing in time, no empty seconds

    std::size_t total() const;
};

struct TransitionMatrix {
    std::vector<std::string> labels;               ///< timestamp_desc values, first-seen order
    std::vector<std::vector<std::size_t>> counts;  ///< counts[from][to]

    std::size_t total() const;
};

SecondHistogram per_second_histogram(const Timeline& timeline);

/// Counts successive pairs in file order.
TransitionMatrix transition_matrix(const Timeline& timeline);

Json histogram_to_json(const SecondHistogram& histogram);
std::string histogram_to_csv(const SecondHistogram& histogram);
/// Plain bar chart, seconds on the x axis.
std::string histogram_to_svg(const SecondHistogram& histogram);

Json transitions_to_json(const TransitionMatrix& matrix);
std::string transitions_to_csv(const TransitionMatrix& matrix);
/// Grey-scale grid: rows are the current type, columns the next type.
std::string transitions_to_svg(const TransitionMatrix& matrix);

} // namespace tleval
