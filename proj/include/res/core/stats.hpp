#pragma once

#include <cstdint>
#include <span>

namespace res {

struct MeanStddev {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1); zero for a single value
};

// Throws std::invalid_argument on an empty input.
MeanStddev summary_stats(std::span<const std::uint64_t> values);

}  // namespace res
