#include "res/datasources/crossref.hpp"

#include "res/core/errors.hpp"
#include "res/core/json.hpp"

#include <cstdio>
#include <thread>

namespace res::datasources {

namespace {

std::string form_encode(std::string_view text, std::string_view keep = "") {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
            c == '.' || c == '~' || keep.find(ch) != std::string_view::npos) {
            out += ch;
        } else if (c == ' ') {
            out += '+';
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string year_filter(const YearRange& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "from-pub-date:%04d-01-01,until-pub-date:%04d-12-31", r.from_year, r.until_year);
    return buf;
}

}  // namespace

std::string_view crossref_facet_field(RankDimension dimension) {
    switch (dimension) {
        case RankDimension::Venue: return "container-title";
        case RankDimension::Publisher: return "publisher-name";
        case RankDimension::WorkType: return "type-name";
    }
    return "container-title";
}

std::string build_works_request(const WorksRequest& request, std::string_view mailto, std::string_view base_url) {
    std::string url(base_url);
    url += "/works?";
    if (!request.subject.empty()) {
        url += "query.bibliographic=" + form_encode(request.subject) + "&";
    }
    url += "rows=0";
    if (request.range) url += "&filter=" + year_filter(*request.range);
    if (request.facet) url += "&facet=" + form_encode(request.facet->field) + ":" + form_encode(request.facet->limit, "*");
    url += "&mailto=" + form_encode(mailto, "@+");
    return url;
}

WorksResponse parse_works_response(std::string_view body) {
    const auto doc = Json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::SourceError, "Crossref response is not JSON");
    if (!doc.contains("message") || !doc["message"].is_object()) {
        fail(ErrorKind::SourceError, "Crossref response has no message object");
    }
    const auto& message = doc["message"];
    if (!message.contains("total-results") || !message["total-results"].is_number_integer() ||
        message["total-results"].get<std::int64_t>() < 0) {
        fail(ErrorKind::SourceError, "Crossref response has no total-results");
    }
    WorksResponse out;
    out.total = message["total-results"].get<std::uint64_t>();
    if (message.contains("facets") && message["facets"].is_object()) {
        for (const auto& [field, facet] : message["facets"].items()) {
            if (!facet.is_object() || !facet.contains("values") || !facet["values"].is_object()) continue;
            auto& buckets = out.facets[field];
            for (const auto& [label, count] : facet["values"].items()) {
                if (count.is_number_integer() && count.get<std::int64_t>() >= 0) {
                    buckets.push_back({label, count.get<std::uint64_t>()});
                }
            }
            sort_buckets(buckets);
        }
    }
    return out;
}

CrossrefSource::CrossrefSource(CrossrefConfig config, HttpGet transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (!transport_) transport_ = make_http_get(config_.timeout, "res-scholarsearch/1.0 (mailto:" + config_.mailto + ")");
    if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string CrossrefSource::get_with_retries(const std::string& url) const {
    {
        std::lock_guard lock(state_mutex_);
        auto it = cache_.find(url);
        if (it != cache_.end() && std::chrono::steady_clock::now() - it->second.fetched < config_.cache_ttl) {
            return it->second.body;
        }
    }

    std::string last_error;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        HttpResponse response;
        {
            in_flight_.acquire();
            {
                std::lock_guard lock(spacing_mutex_);
                const auto now = std::chrono::steady_clock::now();
                const auto earliest = last_start_ + config_.min_spacing;
                if (last_start_.time_since_epoch().count() != 0 && now < earliest) {
                    config_.sleep(std::chrono::duration_cast<std::chrono::milliseconds>(earliest - now));
                }
                last_start_ = std::chrono::steady_clock::now();
            }
            {
                std::lock_guard lock(state_mutex_);
                log_.push_back(url);
            }
            try {
                response = transport_(url);
            } catch (const std::exception& e) {
                response = HttpResponse{0, e.what(), std::nullopt};
            }
            in_flight_.release();
        }

        if (response.status == 200) {
            std::lock_guard lock(state_mutex_);
            cache_[url] = CacheEntry{response.body, std::chrono::steady_clock::now()};
            return response.body;
        }
        last_error = response.status == 0 ? "transport error" : "HTTP " + std::to_string(response.status);
        if (attempt == config_.max_retries) break;
        if (response.status == 429 || response.status == 503) {
            config_.sleep(response.retry_after ? std::chrono::duration_cast<std::chrono::milliseconds>(*response.retry_after)
                                               : backoff);
        } else if (response.status == 0 || response.status >= 500) {
            config_.sleep(backoff);
        } else {
            break;
        }
        backoff *= 2;
    }
    fail(ErrorKind::SourceError, "Crossref request failed (" + last_error + "): " + url);
}

WorksResponse CrossrefSource::fetch(const WorksRequest& request) const {
    {
        std::lock_guard lock(state_mutex_);
        ++lookups_;
    }
    return parse_works_response(get_with_retries(build_works_request(request, config_.mailto, config_.base_url)));
}

std::uint64_t CrossrefSource::count_total(std::string_view subject, const std::optional<YearRange>& range) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    return fetch({std::string(subject), range, std::nullopt}).total;
}

std::vector<YearCount> CrossrefSource::yearly_counts(std::string_view subject, int from_year, int until_year) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    check_year_span(from_year, until_year);
    std::vector<YearCount> out;
    if (config_.use_year_facet) {
        const auto response =
            fetch({std::string(subject), YearRange{from_year, until_year}, WorksFacet{"published", "*"}});
        std::map<int, std::uint64_t> by_year;
        if (auto it = response.facets.find("published"); it != response.facets.end()) {
            for (const auto& b : it->second) {
                try {
                    by_year[std::stoi(b.label)] += b.count;
                } catch (const std::exception&) {
                    // non-year label
                }
            }
        }
        for (int y = from_year; y <= until_year; ++y) out.push_back({y, by_year.count(y) ? by_year[y] : 0});
        return out;
    }
    for (int y = from_year; y <= until_year; ++y) {
        out.push_back({y, count_total(subject, YearRange{y, y})});
    }
    return out;
}

std::vector<FacetBucket> CrossrefSource::facet_counts(std::string_view subject, RankDimension dimension, int limit,
                                                      const std::optional<YearRange>& range) const {
    if (subject.empty()) throw std::invalid_argument("subject is empty");
    check_facet_limit(limit);
    const std::string field(crossref_facet_field(dimension));
    const auto response = fetch({std::string(subject), range, WorksFacet{field, std::to_string(limit)}});
    std::vector<FacetBucket> buckets;
    if (auto it = response.facets.find(field); it != response.facets.end()) buckets = it->second;
    std::erase_if(buckets, [](const FacetBucket& b) { return b.count == 0; });
    if (buckets.size() > static_cast<std::size_t>(limit)) buckets.resize(static_cast<std::size_t>(limit));
    return buckets;
}

std::uint64_t CrossrefSource::dataset_size_estimate() const {
    {
        std::lock_guard lock(state_mutex_);
        if (size_estimate_) return *size_estimate_;
    }
    const auto total = fetch({}).total;
    std::lock_guard lock(state_mutex_);
    size_estimate_ = total;
    return total;
}

SourceStats CrossrefSource::stats() const {
    std::lock_guard lock(state_mutex_);
    return {lookups_, 0};
}

std::vector<std::string> CrossrefSource::request_log() const {
    std::lock_guard lock(state_mutex_);
    return log_;
}

}  // namespace res::datasources
