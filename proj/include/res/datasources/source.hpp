#pragma once

#include "res/core/time.hpp"
#include "res/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace res::datasources {

inline constexpr int kMaxYearSpan = 50;
inline constexpr int kMaxFacetLimit = 20;

struct YearCount {
    int year = 0;
    std::uint64_t count = 0;

    friend bool operator==(const YearCount&, const YearCount&) = default;
};

struct FacetBucket {
    std::string label;
    std::uint64_t count = 0;

    friend bool operator==(const FacetBucket&, const FacetBucket&) = default;
};

// Work done on behalf of the Executor: requests issued and records touched.
struct SourceStats {
    std::uint64_t requests = 0;
    std::uint64_t records_scanned = 0;
};

/// Orders buckets by descending count, then ascending label (byte order).
void sort_buckets(std::vector<FacetBucket>& buckets);

/// Aggregation-only view of a corpus. No operation returns record-level
/// content; everything is a count or a group label. Implementations are safe
/// for concurrent reads. Failures surface as res::Error(SourceError);
/// precondition violations as std::invalid_argument.
class DataSource {
public:
    virtual ~DataSource() = default;

    virtual std::string source_name() const = 0;

    virtual std::uint64_t count_total(std::string_view subject,
                                      const std::optional<YearRange>& range) const = 0;

    // One entry per year, ascending. Requires from <= until and a span of at
    // most 50 years.
    virtual std::vector<YearCount> yearly_counts(std::string_view subject, int from_year,
                                                 int until_year) const = 0;

    // Top `limit` (1..20) buckets in sort_buckets order, zero buckets omitted.
    virtual std::vector<FacetBucket> facet_counts(std::string_view subject, RankDimension dimension,
                                                  int limit,
                                                  const std::optional<YearRange>& range = std::nullopt) const = 0;

    virtual std::uint64_t dataset_size_estimate() const = 0;

    // Timestamp stamped on summaries built from this source.
    virtual Timestamp snapshot_time() const = 0;

    virtual SourceStats stats() const = 0;
};

void check_year_span(int from_year, int until_year);
void check_facet_limit(int limit);

}  // namespace res::datasources
