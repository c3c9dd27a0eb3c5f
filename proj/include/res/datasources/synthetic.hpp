#pragma once

#include "res/core/json.hpp"
#include "res/datasources/source.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace res::datasources {

inline constexpr int kSyntheticFirstYear = 1990;
inline constexpr int kSyntheticLastYear = 2029;
inline constexpr std::uint64_t kMaxSyntheticRecords = 10'000'000;

// Fixed timestamp for summaries over synthetic data, so that runs are pure
// functions of (query, seed, n).
inline constexpr Timestamp kSyntheticSnapshot{std::chrono::seconds{1773446400}};  // 2026-03-14T00:00:00Z

namespace vocab {
std::span<const std::string_view> keywords();    // 40 single lowercase words
std::span<const std::string_view> venues();      // 25
std::span<const std::string_view> publishers();  // 10
std::span<const std::string_view> work_types();  // 3
std::string_view label(RankDimension dimension, std::uint8_t id);
}  // namespace vocab

/// A generated corpus record. Fields are indices into the vocabularies.
struct SyntheticRecord {
    std::int16_t year = 0;
    std::uint8_t keyword_count = 0;
    std::array<std::uint8_t, 4> keyword_ids{};
    std::uint8_t venue = 0;
    std::uint8_t publisher = 0;
    std::uint8_t work_type = 0;

    std::span<const std::uint8_t> keywords() const { return {keyword_ids.data(), keyword_count}; }
    friend bool operator==(const SyntheticRecord&, const SyntheticRecord&) = default;
};

/// Deterministic in (seed, n) on every platform: draws come from
/// std::mt19937_64 (fully specified by the standard) mapped to ranges by
/// rejection sampling, never through std:: distributions. Per record, in
/// order: year (weight 20 + (year - 1990) over 1990..2029), keyword count
/// 1..4, distinct keyword ids, venue, publisher, work type (weights 7:2:1).
std::vector<SyntheticRecord> generate_synthetic(std::uint64_t seed, std::uint64_t n);

/// Debug dump format: one JSON object per line with the labelled fields.
Json record_to_json(const SyntheticRecord& record);
void write_jsonl(std::ostream& out, std::span<const SyntheticRecord> records);

/// Lowercase word tokens of a subject; a record matches a subject when any
/// token equals one of its keywords.
std::vector<std::string> subject_tokens(std::string_view subject);

/// In-memory source over generated records. Every operation is an exact
/// full scan, so records_scanned grows linearly with n.
class SyntheticSource final : public DataSource {
public:
    explicit SyntheticSource(std::vector<SyntheticRecord> records, Timestamp snapshot = kSyntheticSnapshot);
    SyntheticSource(std::uint64_t seed, std::uint64_t n);

    std::string source_name() const override { return "synthetic"; }
    std::uint64_t count_total(std::string_view subject, const std::optional<YearRange>& range) const override;
    std::vector<YearCount> yearly_counts(std::string_view subject, int from_year, int until_year) const override;
    std::vector<FacetBucket> facet_counts(std::string_view subject, RankDimension dimension, int limit,
                                          const std::optional<YearRange>& range = std::nullopt) const override;
    std::uint64_t dataset_size_estimate() const override { return records_.size(); }
    Timestamp snapshot_time() const override { return snapshot_; }
    SourceStats stats() const override;

    std::span<const SyntheticRecord> records() const { return records_; }

private:
    std::uint64_t subject_mask(std::string_view subject) const;
    void note_scan() const;

    std::vector<SyntheticRecord> records_;
    std::vector<std::uint64_t> masks_;
    Timestamp snapshot_;
    mutable std::atomic<std::uint64_t> requests_{0};
    mutable std::atomic<std::uint64_t> scanned_{0};
};

}  // namespace res::datasources
