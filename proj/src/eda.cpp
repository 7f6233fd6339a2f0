#include "tleval/eda.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace tleval {

namespace {

std::string xml_escape(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::size_t SecondHistogram::total() const {
    std::size_t sum = 0;
    for (const auto& b : buckets) {
        sum += b.count;
    }
    return sum;
}

std::size_t TransitionMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts) {
        for (const auto v : row) {
            sum += v;
        }
    }
    return sum;
}

SecondHistogram per_second_histogram(const Timeline& timeline) {
    using namespace std::chrono;
    std::map<long long, std::size_t> counts;
    for (const auto& event : timeline.events()) {
        ++counts[floor<seconds>(event.instant).time_since_epoch().count()];
    }
    SecondHistogram histogram;
    histogram.buckets.reserve(counts.size());
    for (const auto& [second, count] : counts) {
        const UtcInstant at{seconds{second}};
        histogram.buckets.push_back({format_clock(at), count, second});
    }
    return histogram;
}

TransitionMatrix transition_matrix(const Timeline& timeline) {
    TransitionMatrix matrix;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> sequence;
    sequence.reserve(timeline.size());
    for (const auto& event : timeline.events()) {
        const auto [it, inserted] = index.try_emplace(event.timestamp_desc, matrix.labels.size());
        if (inserted) {
            matrix.labels.push_back(event.timestamp_desc);
        }
        sequence.push_back(it->second);
    }
    const auto n = matrix.labels.size();
    matrix.counts.assign(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        ++matrix.counts[sequence[i - 1]][sequence[i]];
    }
    return matrix;
}

Json histogram_to_json(const SecondHistogram& histogram) {
    Json buckets = Json::array();
    for (const auto& b : histogram.buckets) {
        buckets.push_back(Json{{"second", b.label}, {"count", b.count}});
    }
    return Json{{"total", histogram.total()}, {"buckets", buckets}};
}

std::string histogram_to_csv(const SecondHistogram& histogram) {
    std::string out = "second,count\n";
    for (const auto& b : histogram.buckets) {
        out += b.label + "," + std::to_string(b.count) + "\n";
    }
    return out;
}

std::string histogram_to_svg(const SecondHistogram& histogram) {
    const std::size_t bar = 14;
    const std::size_t gap = 4;
    const std::size_t plot_h = 240;
    const std::size_t left = 50;
    const std::size_t bottom = 70;
    std::size_t peak = 1;
    for (const auto& b : histogram.buckets) {
        peak = std::max(peak, b.count);
    }
    const std::size_t width = left + histogram.buckets.size() * (bar + gap) + 20;
    const std::size_t height = plot_h + bottom + 20;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << plot_h + 20 << "\" x2=\"" << width - 10
        << "\" y2=\"" << plot_h + 20 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"5\" y=\"15\">events per second (max " << peak << ")</text>\n";
    for (std::size_t i = 0; i < histogram.buckets.size(); ++i) {
        const auto& b = histogram.buckets[i];
        const std::size_t h = b.count * plot_h / peak;
        const std::size_t x = left + i * (bar + gap);
        svg << "<rect x=\"" << x << "\" y=\"" << plot_h + 20 - h << "\" width=\"" << bar
            << "\" height=\"" << h << "\" fill=\"steelblue\"><title>" << b.label << ": "
            << b.count << "</title></rect>\n";
        svg << "<text transform=\"translate(" << x + bar / 2 + 3 << "," << plot_h + 26
            << ") rotate(90)\">" << b.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

Json transitions_to_json(const TransitionMatrix& matrix) {
    Json counts = Json::array();
    for (const auto& row : matrix.counts) {
        counts.push_back(row);
    }
    return Json{{"labels", matrix.labels}, {"total", matrix.total()}, {"counts", counts}};
}

std::string transitions_to_csv(const TransitionMatrix& matrix) {
    std::vector<std::string> header{"from\\to"};
    header.insert(header.end(), matrix.labels.begin(), matrix.labels.end());
    std::string out = csv_join(header) + "\n";
    for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
        std::vector<std::string> row{matrix.labels[i]};
        for (const auto v : matrix.counts[i]) {
            row.push_back(std::to_string(v));
        }
        out += csv_join(row) + "\n";
    }
    return out;
}

std::string transitions_to_svg(const TransitionMatrix& matrix) {
    const std::size_t cell = 36;
    const std::size_t left = 220;
    const std::size_t top = 220;
    const std::size_t n = matrix.labels.size();
    std::size_t peak = 1;
    for (const auto& row : matrix.counts) {
        for (const auto v : row) {
            peak = std::max(peak, v);
        }
    }
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + n * cell + 20
        << "\" height=\"" << top + n * cell + 20
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = xml_escape(matrix.labels[i]);
        svg << "<text x=\"" << left - 6 << "\" y=\"" << top + i * cell + cell / 2 + 3
            << "\" text-anchor=\"end\">" << label << "</text>\n";
        svg << "<text transform=\"translate(" << left + i * cell + cell / 2 << "," << top - 6
            << ") rotate(-90)\">" << label << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto v = matrix.counts[i][j];
            const int shade = 255 - static_cast<int>(v * 200 / peak);
            svg << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade
                << "," << shade << "," << 255 << ")\" stroke=\"white\"/>\n";
            svg << "<text x=\"" << left + j * cell + cell / 2 << "\" y=\""
                << top + i * cell + cell / 2 + 3 << "\" text-anchor=\"middle\">" << v
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace tleval
