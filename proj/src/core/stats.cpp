#include "res/core/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace res {

MeanStddev summary_stats(std::span<const std::uint64_t> values) {
    if (values.empty()) throw std::invalid_argument("summary_stats: no values to report");
    double sum = 0.0;
    for (auto v : values) sum += static_cast<double>(v);
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() == 1) return {mean, 0.0};
    double sq = 0.0;
    for (auto v : values) {
        const double d = static_cast<double>(v) - mean;
        sq += d * d;
    }
    return {mean, std::sqrt(sq / (n - 1.0))};
}

}  // namespace res
