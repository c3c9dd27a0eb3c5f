#pragma once

#include "res/datasources/source.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace res::datasources {

inline constexpr std::string_view kCrossrefBaseUrl = "https://api.crossref.org";

std::string_view crossref_facet_field(RankDimension dimension);

struct WorksFacet {
    std::string field;
    std::string limit;  // a number, or "*"
};

/// Parameters of a count-only works query. There is deliberately no rows
/// parameter: every request is rows=0.
struct WorksRequest {
    std::string subject;  // empty for an unrestricted query
    std::optional<YearRange> range;
    std::optional<WorksFacet> facet;
};

/// Pure function of its arguments:
///   {base}/works?query.bibliographic=<form-encoded subject>&rows=0
///     [&filter=from-pub-date:YYYY-01-01,until-pub-date:YYYY-12-31]
///     [&facet=<field>:<limit>]&mailto=<contact>
std::string build_works_request(const WorksRequest& request, std::string_view mailto,
                                std::string_view base_url = kCrossrefBaseUrl);

struct WorksResponse {
    std::uint64_t total = 0;
    std::map<std::string, std::vector<FacetBucket>> facets;  // buckets in sort_buckets order
};

/// Reads message.total-results and message.facets.<field>.values only;
/// message.items is never touched. Throws res::Error(SourceError).
WorksResponse parse_works_response(std::string_view body);

struct HttpResponse {
    int status = 0;  // 0 for a transport failure
    std::string body;
    std::optional<std::chrono::seconds> retry_after;
};

using HttpGet = std::function<HttpResponse(const std::string& url)>;

HttpGet make_http_get(std::chrono::milliseconds timeout, std::string user_agent);

struct CrossrefConfig {
    std::string mailto = "res-scholarsearch@example.org";
    std::string base_url = std::string(kCrossrefBaseUrl);
    std::chrono::milliseconds timeout{20000};
    std::chrono::seconds cache_ttl{3600};
    std::chrono::milliseconds min_spacing{100};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    bool use_year_facet = false;
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

/// Live Crossref adapter. All traffic is count-only (rows=0) and passes
/// through a limiter allowing two requests in flight with at least
/// min_spacing between starts. 429/503 honour Retry-After; transport errors
/// and 5xx back off exponentially. Successful bodies are cached per URL for
/// cache_ttl.
class CrossrefSource final : public DataSource {
public:
    explicit CrossrefSource(CrossrefConfig config, HttpGet transport = {});

    std::string source_name() const override { return "crossref"; }
    std::uint64_t count_total(std::string_view subject, const std::optional<YearRange>& range) const override;
    std::vector<YearCount> yearly_counts(std::string_view subject, int from_year, int until_year) const override;
    std::vector<FacetBucket> facet_counts(std::string_view subject, RankDimension dimension, int limit,
                                          const std::optional<YearRange>& range = std::nullopt) const override;
    std::uint64_t dataset_size_estimate() const override;
    Timestamp snapshot_time() const override { return now_utc(); }
    SourceStats stats() const override;

    // URLs that went over the wire, in issue order (cache hits excluded).
    std::vector<std::string> request_log() const;

private:
    WorksResponse fetch(const WorksRequest& request) const;
    std::string get_with_retries(const std::string& url) const;

    CrossrefConfig config_;
    HttpGet transport_;

    mutable std::counting_semaphore<2> in_flight_{2};
    mutable std::mutex spacing_mutex_;
    mutable std::chrono::steady_clock::time_point last_start_{};

    mutable std::mutex state_mutex_;
    struct CacheEntry {
        std::string body;
        std::chrono::steady_clock::time_point fetched;
    };
    mutable std::map<std::string, CacheEntry> cache_;
    mutable std::vector<std::string> log_;
    mutable std::optional<std::uint64_t> size_estimate_;
    mutable std::uint64_t lookups_ = 0;
};

}  // namespace res::datasources
