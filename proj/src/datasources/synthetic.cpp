#include "res/datasources/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <ostream>
#include <random>
#include <stdexcept>

namespace res::datasources {

namespace vocab {

namespace {

constexpr std::array<std::string_view, 40> kKeywords = {
    "quantum",      "computing",     "crispr",       "gene",           "therapy",
    "machine",      "learning",      "deep",         "graphene",       "cybersecurity",
    "medical",      "neural",        "network",      "climate",        "cancer",
    "genomics",     "robotics",      "blockchain",   "vaccine",        "battery",
    "solar",        "photonics",     "microbiome",   "immunology",     "epidemiology",
    "nanotechnology", "superconductivity", "astrophysics", "neuroscience", "proteomics",
    "catalysis",    "semiconductor", "encryption",   "privacy",        "language",
    "vision",       "reinforcement", "diabetes",     "alzheimer",      "covid",
};

constexpr std::array<std::string_view, 25> kVenues = {
    "Annals of Applied Computing",       "Journal of Molecular Medicine Reports",
    "Physical Review Letters B",         "Frontiers in Quantum Systems",
    "Materials 360",                     "Journal of Gene Therapy Research",
    "Computational Intelligence Review", "Nano Letters Quarterly",
    "Security and Privacy Transactions", "Clinical Oncology Journal",
    "Journal of Climate Dynamics",       "Neural Computation Letters",
    "Bioinformatics Advances",           "Energy Storage Materials Today",
    "Robotics and Autonomous Systems X", "Immunology Perspectives",
    "Astrophysical Journal Notes",       "Public Health Epidemiology",
    "Catalysis Science Review",          "Photonics Research Letters",
    "Semiconductor Devices Journal",     "Language Technology Review",
    "Vision and Perception Studies",     "Microbiome Insights",
    "Diabetes and Metabolism Reports",
};

constexpr std::array<std::string_view, 10> kPublishers = {
    "Northbridge Press",     "Meridian Academic",  "Harbor Science",   "Atlas Scholarly",
    "Crescent University Press", "Pinnacle Publishing", "Lumen Research Group", "Orbis Editions",
    "Keystone Journals",     "Vertex Media",
};

constexpr std::array<std::string_view, 3> kWorkTypes = {"journal-article", "proceedings-article", "book-chapter"};

}  // namespace

std::span<const std::string_view> keywords() { return kKeywords; }
std::span<const std::string_view> venues() { return kVenues; }
std::span<const std::string_view> publishers() { return kPublishers; }
std::span<const std::string_view> work_types() { return kWorkTypes; }

std::string_view label(RankDimension dimension, std::uint8_t id) {
    switch (dimension) {
        case RankDimension::Venue: return kVenues.at(id);
        case RankDimension::Publisher: return kPublishers.at(id);
        case RankDimension::WorkType: return kWorkTypes.at(id);
    }
    return {};
}

}  // namespace vocab

namespace {

// Uniform in [0, bound) without modulo bias.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

constexpr int kYearCount = kSyntheticLastYear - kSyntheticFirstYear + 1;

int draw_year(std::mt19937_64& rng) {
    constexpr std::uint64_t total = 20 * kYearCount + kYearCount * (kYearCount - 1) / 2;
    std::uint64_t x = draw(rng, total);
    for (int i = 0; i < kYearCount; ++i) {
        const std::uint64_t w = 20 + static_cast<std::uint64_t>(i);
        if (x < w) return kSyntheticFirstYear + i;
        x -= w;
    }
    return kSyntheticLastYear;
}

std::uint8_t field_id(RankDimension dimension, const SyntheticRecord& r) {
    switch (dimension) {
        case RankDimension::Venue: return r.venue;
        case RankDimension::Publisher: return r.publisher;
        case RankDimension::WorkType: return r.work_type;
    }
    return 0;
}

std::size_t vocabulary_size(RankDimension dimension) {
    switch (dimension) {
        case RankDimension::Venue: return vocab::venues().size();
        case RankDimension::Publisher: return vocab::publishers().size();
        case RankDimension::WorkType: return vocab::work_types().size();
    }
    return 0;
}

}  // namespace

std::vector<SyntheticRecord> generate_synthetic(std::uint64_t seed, std::uint64_t n) {
    if (n > kMaxSyntheticRecords) throw std::invalid_argument("synthetic corpus limited to 10^7 records");
    std::mt19937_64 rng(seed);
    std::vector<SyntheticRecord> out;
    out.reserve(n);
    const auto kw = vocab::keywords().size();
    for (std::uint64_t i = 0; i < n; ++i) {
        SyntheticRecord r;
        r.year = static_cast<std::int16_t>(draw_year(rng));
        r.keyword_count = static_cast<std::uint8_t>(1 + draw(rng, 4));
        for (std::uint8_t k = 0; k < r.keyword_count;) {
            const auto id = static_cast<std::uint8_t>(draw(rng, kw));
            if (std::find(r.keyword_ids.begin(), r.keyword_ids.begin() + k, id) != r.keyword_ids.begin() + k) {
                continue;
            }
            r.keyword_ids[k++] = id;
        }
        r.venue = static_cast<std::uint8_t>(draw(rng, vocab::venues().size()));
        r.publisher = static_cast<std::uint8_t>(draw(rng, vocab::publishers().size()));
        const auto t = draw(rng, 10);
        r.work_type = static_cast<std::uint8_t>(t < 7 ? 0 : (t < 9 ? 1 : 2));
        out.push_back(r);
    }
    return out;
}

Json record_to_json(const SyntheticRecord& record) {
    Json keywords = Json::array();
    for (auto id : record.keywords()) keywords.push_back(std::string(vocab::keywords()[id]));
    return Json{{"year", record.year},
                {"keywords", std::move(keywords)},
                {"venue", std::string(vocab::venues()[record.venue])},
                {"publisher", std::string(vocab::publishers()[record.publisher])},
                {"work_type", std::string(vocab::work_types()[record.work_type])}};
}

void write_jsonl(std::ostream& out, std::span<const SyntheticRecord> records) {
    for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<std::string> subject_tokens(std::string_view subject) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : subject) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) != 0 || c >= 0x80) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

void sort_buckets(std::vector<FacetBucket>& buckets) {
    std::sort(buckets.begin(), buckets.end(), [](const FacetBucket& a, const FacetBucket& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.label < b.label;
    });
}

void check_year_span(int from_year, int until_year) {
    if (from_year > until_year) throw std::invalid_argument("from_year is after until_year");
    if (until_year - from_year + 1 > kMaxYearSpan) throw std::invalid_argument("year span exceeds 50 years");
}

void check_facet_limit(int limit) {
    if (limit < 1 || limit > kMaxFacetLimit) throw std::invalid_argument("facet limit must be within 1..20");
}

SyntheticSource::SyntheticSource(std::vector<SyntheticRecord> records, Timestamp snapshot)
    : records_(std::move(records)), snapshot_(snapshot) {
    masks_.reserve(records_.size());
    for (const auto& r : records_) {
        std::uint64_t m = 0;
        for (auto id : r.keywords()) m |= std::uint64_t{1} << id;
        masks_.push_back(m);
    }
}

SyntheticSource::SyntheticSource(std::uint64_t seed, std::uint64_t n)
    : SyntheticSource(generate_synthetic(seed, n)) {}

std::uint64_t SyntheticSource::subject_mask(std::string_view subject) const {
    std::uint64_t m = 0;
    const auto kw = vocab::keywords();
    for (const auto& token : subject_tokens(subject)) {
        const auto it = std::find(kw.begin(), kw.end(), token);
        if (it != kw.end()) m |= std::uint64_t{1} << (it - kw.begin());
    }
    return m;
}

void SyntheticSource::note_scan() const {
    requests_.fetch_add(1, std::memory_order_relaxed);
    scanned_.fetch_add(records_.size(), std::memory_order_relaxed);
}

SourceStats SyntheticSource::stats() const {
    return {requests_.load(std::memory_order_relaxed), scanned_.load(std::memory_order_relaxed)};
}

std::uint64_t SyntheticSource::count_total(std::string_view subject, const std::optional<YearRange>& range) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    note_scan();
    const auto mask = subject_mask(subject);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if ((masks_[i] & mask) == 0) continue;
        if (range && !range->contains(records_[i].year)) continue;
        ++count;
    }
    return count;
}

std::vector<YearCount> SyntheticSource::yearly_counts(std::string_view subject, int from_year, int until_year) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    check_year_span(from_year, until_year);
    note_scan();
    const auto mask = subject_mask(subject);
    std::vector<YearCount> out;
    for (int y = from_year; y <= until_year; ++y) out.push_back({y, 0});
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const int y = records_[i].year;
        if ((masks_[i] & mask) == 0 || y < from_year || y > until_year) continue;
        ++out[static_cast<std::size_t>(y - from_year)].count;
    }
    return out;
}

std::vector<FacetBucket> SyntheticSource::facet_counts(std::string_view subject, RankDimension dimension, int limit,
                                                       const std::optional<YearRange>& range) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    check_facet_limit(limit);
    note_scan();
    const auto mask = subject_mask(subject);
    std::vector<std::uint64_t> counts(vocabulary_size(dimension), 0);
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if ((masks_[i] & mask) == 0) continue;
        if (range && !range->contains(records_[i].year)) continue;
        ++counts[field_id(dimension, records_[i])];
    }
    std::vector<FacetBucket> buckets;
    for (std::size_t id = 0; id < counts.size(); ++id) {
        if (counts[id] > 0) {
            buckets.push_back({std::string(vocab::label(dimension, static_cast<std::uint8_t>(id))), counts[id]});
        }
    }
    sort_buckets(buckets);
    if (buckets.size() > static_cast<std::size_t>(limit)) buckets.resize(static_cast<std::size_t>(limit));
    return buckets;
}

}  // namespace res::datasources
