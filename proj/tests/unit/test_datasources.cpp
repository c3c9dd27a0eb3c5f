#include "res/core/errors.hpp"
#include "res/datasources/crossref.hpp"
#include "res/datasources/oracle.hpp"
#include "res/datasources/synthetic.hpp"

#include "../support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace res;
using namespace res::datasources;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(RES_TEST_FIXTURES) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Straight string-level matcher, independent of the source's bitmasks.
bool matches(const SyntheticRecord& r, const std::string& subject) {
    const auto tokens = subject_tokens(subject);
    for (auto id : r.keywords()) {
        for (const auto& t : tokens) {
            if (t == vocab::keywords()[id]) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("vocabularies have the documented sizes") {
    CHECK(vocab::keywords().size() == 40);
    CHECK(vocab::venues().size() == 25);
    CHECK(vocab::publishers().size() == 10);
    CHECK(vocab::work_types().size() == 3);
    std::set<std::string_view> distinct(vocab::keywords().begin(), vocab::keywords().end());
    CHECK(distinct.size() == 40);
}

TEST_CASE("generator is deterministic in (seed, n)") {
    CHECK(generate_synthetic(42, 0).empty());
    const auto a = generate_synthetic(42, 1000);
    CHECK(a == generate_synthetic(42, 1000));
    CHECK(a != generate_synthetic(43, 1000));
    // Prefix-stable: the first records do not depend on n.
    const auto b = generate_synthetic(42, 10);
    CHECK(std::equal(b.begin(), b.end(), a.begin()));
    for (const auto& r : a) {
        CHECK(r.year >= kSyntheticFirstYear);
        CHECK(r.year <= kSyntheticLastYear);
        CHECK(r.keyword_count >= 1);
        CHECK(r.keyword_count <= 4);
        std::set<int> ids(r.keywords().begin(), r.keywords().end());
        CHECK(ids.size() == r.keyword_count);
    }
    CHECK_THROWS_AS(generate_synthetic(1, kMaxSyntheticRecords + 1), std::invalid_argument);
}

TEST_CASE("debug dump is one JSON line per record") {
    const auto r = generate_synthetic(42, 3);
    std::ostringstream dump;
    write_jsonl(dump, r);
    const auto text = dump.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("\"year\":") != std::string::npos);
    const auto again = generate_synthetic(42, 3);
    std::ostringstream dump2;
    write_jsonl(dump2, again);
    CHECK(dump2.str() == text);
}

TEST_CASE("later years are more frequent") {
    const auto rs = generate_synthetic(7, 200'000);
    std::uint64_t early = 0, late = 0;
    for (const auto& r : rs) {
        if (r.year < 2000) ++early;
        if (r.year >= 2020) ++late;
    }
    CHECK(late > early);
}

TEST_CASE("synthetic source counts equal direct scans") {
    const SyntheticSource empty(std::vector<SyntheticRecord>{});
    CHECK(empty.count_total("graphene", std::nullopt) == 0);
    CHECK(empty.dataset_size_estimate() == 0);
    for (const auto& yc : empty.yearly_counts("graphene", 2000, 2004)) CHECK(yc.count == 0);

    const SyntheticSource src(42, 1000);
    CHECK(src.dataset_size_estimate() == 1000);
    CHECK(src.snapshot_time() == kSyntheticSnapshot);
    for (const auto& subject : {"graphene", "gene therapy", "QUANTUM", "unknownword", "machine-learning"}) {
        std::uint64_t expected = 0;
        for (const auto& r : src.records()) expected += matches(r, subject) ? 1 : 0;
        CHECK(src.count_total(subject, std::nullopt) == expected);
    }
}

TEST_CASE("yearly counts sum to the range total") {
    const SyntheticSource src(42, 10'000);
    const auto years = src.yearly_counts("quantum computing", 2015, 2024);
    REQUIRE(years.size() == 10);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
        CHECK(years[i].year == 2015 + static_cast<int>(i));
        sum += years[i].count;
    }
    CHECK(sum == src.count_total("quantum computing", YearRange{2015, 2024}));
    CHECK_THROWS_AS(src.yearly_counts("x", 1950, 2000), std::invalid_argument);
    CHECK_THROWS_AS(src.yearly_counts("x", 2001, 2000), std::invalid_argument);
    CHECK_NOTHROW(src.yearly_counts("x", 1951, 2000));
}

TEST_CASE("facet counts equal a group-by in bucket order") {
    const SyntheticSource src(7, 5'000);
    const auto buckets = src.facet_counts("deep learning", RankDimension::Venue, 10);
    std::map<std::string, std::uint64_t> groups;
    for (const auto& r : src.records()) {
        if (matches(r, "deep learning")) groups[std::string(vocab::venues()[r.venue])]++;
    }
    std::vector<FacetBucket> expected;
    for (const auto& [label, count] : groups) expected.push_back({label, count});
    std::stable_sort(expected.begin(), expected.end(),
                     [](const FacetBucket& a, const FacetBucket& b) { return a.count > b.count; });
    expected.resize(10);
    CHECK(buckets == expected);

    CHECK_THROWS_AS(src.facet_counts("x", RankDimension::Venue, 0), std::invalid_argument);
    CHECK_THROWS_AS(src.facet_counts("x", RankDimension::Venue, 21), std::invalid_argument);
    CHECK(src.facet_counts("unknownword", RankDimension::Venue, 5).empty());
}

TEST_CASE("single shared venue gives one bucket") {
    std::vector<SyntheticRecord> rs(5);
    for (auto& r : rs) {
        r.year = 2020;
        r.keyword_count = 1;
        r.keyword_ids[0] = 0;
        r.venue = 3;
    }
    const SyntheticSource src(rs);
    const std::string subject(vocab::keywords()[0]);
    const auto b = src.facet_counts(subject, RankDimension::Venue, 20);
    REQUIRE(b.size() == 1);
    CHECK(b[0].count == 5);
    CHECK(b[0].label == vocab::venues()[3]);
}

TEST_CASE("sort_buckets orders by count desc then label") {
    std::mt19937_64 rng(3);
    std::vector<FacetBucket> b = {{"b", 2}, {"a", 2}, {"c", 9}, {"A", 2}, {"z", 0}};
    for (int i = 0; i < 20; ++i) {
        std::shuffle(b.begin(), b.end(), rng);
        sort_buckets(b);
        CHECK(b == std::vector<FacetBucket>{{"c", 9}, {"A", 2}, {"a", 2}, {"b", 2}, {"z", 0}});
    }
}

TEST_CASE("source stats grow with n") {
    const SyntheticSource small(1, 100);
    const SyntheticSource big(1, 10'000);
    small.count_total("graphene", std::nullopt);
    big.count_total("graphene", std::nullopt);
    CHECK(small.stats().requests == 1);
    CHECK(big.stats().requests == 1);
    CHECK(small.stats().records_scanned == 100);
    CHECK(big.stats().records_scanned == 10'000);
}

TEST_CASE("oracle: hand-computed cases") {
    SyntheticRecord r;
    r.year = 2020;
    r.keyword_count = 1;
    const auto kws = vocab::keywords();
    r.keyword_ids[0] = static_cast<std::uint8_t>(std::find(kws.begin(), kws.end(), "graphene") - kws.begin());
    const std::vector<SyntheticRecord> one{r};

    QueryPlan trend;
    trend.intent = Intent::Trend;
    trend.subjects = {"graphene"};
    trend.time_range = YearRange{2019, 2021};
    const auto s = brute_force_aggregate(one, trend);
    REQUIRE(s.series.size() == 1);
    CHECK(s.series[0].points == std::vector<DataPoint>{{"2019", 0}, {"2020", 1}, {"2021", 0}});
    CHECK(s.totals.at("graphene") == 1);

    QueryPlan cmp;
    cmp.intent = Intent::Comparison;
    cmp.subjects = {"nothing here", "nor here"};
    const auto c = brute_force_aggregate(generate_synthetic(42, 500), cmp);
    CHECK(c.totals.at("nothing here") == 0);
    CHECK(c.totals.at("nor here") == 0);
    CHECK(c.series.empty());
}

TEST_CASE("works request goldens") {
    const std::string mail = "ops@example.org";
    CHECK(build_works_request({"graphene", std::nullopt, std::nullopt}, mail) ==
          "https://api.crossref.org/works?query.bibliographic=graphene&rows=0&mailto=ops@example.org");
    CHECK(build_works_request({"gene therapy", YearRange{2020, 2020}, std::nullopt}, mail) ==
          "https://api.crossref.org/works?query.bibliographic=gene+therapy&rows=0"
          "&filter=from-pub-date:2020-01-01,until-pub-date:2020-12-31&mailto=ops@example.org");
    CHECK(build_works_request({"graphene", std::nullopt, WorksFacet{"container-title", "10"}}, mail) ==
          "https://api.crossref.org/works?query.bibliographic=graphene&rows=0&facet=container-title:10"
          "&mailto=ops@example.org");
    CHECK(build_works_request({"C++ & Rust/Go", std::nullopt, std::nullopt}, mail) ==
          "https://api.crossref.org/works?query.bibliographic=C%2B%2B+%26+Rust%2FGo&rows=0&mailto=ops@example.org");
    CHECK(build_works_request({}, mail) == "https://api.crossref.org/works?rows=0&mailto=ops@example.org");
    CHECK(crossref_facet_field(RankDimension::Venue) == "container-title");
    CHECK(crossref_facet_field(RankDimension::Publisher) == "publisher-name");
    CHECK(crossref_facet_field(RankDimension::WorkType) == "type-name");
}

TEST_CASE("works response parsing") {
    CHECK(parse_works_response(read_fixture("crossref_cybersecurity_total.json")).total == 42453);
    const auto zero = parse_works_response(R"({"message":{"total-results":0}})");
    CHECK(zero.total == 0);
    CHECK(zero.facets.empty());

    const auto f = parse_works_response(R"({"message":{"total-results":8,"facets":{"container-title":{"values":{"J1":5,"J2":3}}}}})");
    CHECK(f.facets.at("container-title") == std::vector<FacetBucket>{{"J1", 5}, {"J2", 3}});

    const auto fixture = parse_works_response(read_fixture("crossref_container_facet.json"));
    CHECK(fixture.facets.at("container-title") ==
          std::vector<FacetBucket>{{"J1", 5}, {"J0", 3}, {"J2", 3}, {"Empty", 0}});

    const auto expect_source_error = [](std::string_view body) {
        try {
            parse_works_response(body);
            FAIL("accepted " << body);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SourceError);
        }
    };
    expect_source_error("<html>");
    expect_source_error(R"({"message":{}})");
    expect_source_error(R"({"status":"ok"})");
}

namespace {

struct FakeCrossref {
    std::vector<std::string> urls;
    std::vector<HttpResponse> scripted;  // consumed first, then `fallback`
    std::function<HttpResponse(const std::string&)> fallback = [](const std::string&) {
        return HttpResponse{200, R"({"message":{"total-results":42453}})", std::nullopt};
    };
    std::vector<std::chrono::milliseconds> sleeps;

    HttpGet transport() {
        return [this](const std::string& url) {
            urls.push_back(url);
            if (!scripted.empty()) {
                auto r = scripted.front();
                scripted.erase(scripted.begin());
                return r;
            }
            return fallback(url);
        };
    }
    CrossrefConfig config() {
        CrossrefConfig c;
        c.mailto = "ops@example.org";
        c.sleep = [this](std::chrono::milliseconds d) { sleeps.push_back(d); };
        return c;
    }
};

bool has_rows_zero_only(const std::string& url) {
    std::size_t n = 0;
    for (auto at = url.find("rows="); at != std::string::npos; at = url.find("rows=", at + 1)) ++n;
    return n == 1 && (url.find("&rows=0&") != std::string::npos || url.find("?rows=0&") != std::string::npos);
}

}  // namespace

TEST_CASE("crossref adapter: counts, cache and request log") {
    FakeCrossref fake;
    CrossrefSource src(fake.config(), fake.transport());
    CHECK(src.count_total("cybersecurity", std::nullopt) == 42453);
    CHECK(src.count_total("cybersecurity", std::nullopt) == 42453);
    CHECK(fake.urls.size() == 1);  // second lookup served from cache
    CHECK(src.request_log().size() == 1);
    CHECK(src.stats().requests == 2);

    CHECK(src.yearly_counts("graphene", 2018, 2020).size() == 3);
    CHECK(src.dataset_size_estimate() == 42453);
    CHECK(src.dataset_size_estimate() == 42453);
    for (const auto& url : src.request_log()) {
        CHECK(has_rows_zero_only(url));
        CHECK(url.find("mailto=ops@example.org") != std::string::npos);
    }
    CHECK(src.request_log().size() == 5);
    CHECK_THROWS_AS(src.count_total("", std::nullopt), std::invalid_argument);
}

TEST_CASE("crossref adapter: retry policy") {
    FakeCrossref fake;
    fake.scripted = {HttpResponse{429, "", std::chrono::seconds{2}}, HttpResponse{503, "", std::nullopt},
                     HttpResponse{0, "reset", std::nullopt}};
    CrossrefSource src(fake.config(), fake.transport());
    CHECK(src.count_total("x", std::nullopt) == 42453);
    CHECK(fake.urls.size() == 4);
    // Retry-After honoured, then exponential backoff (500 ms doubling).
    std::vector<std::chrono::milliseconds> backoffs;
    for (auto d : fake.sleeps) {
        if (d >= std::chrono::milliseconds(200)) backoffs.push_back(d);
    }
    CHECK(backoffs == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(2000),
                                                             std::chrono::milliseconds(1000),
                                                             std::chrono::milliseconds(2000)});

    FakeCrossref broken;
    broken.fallback = [](const std::string&) { return HttpResponse{500, "", std::nullopt}; };
    CrossrefSource failing(broken.config(), broken.transport());
    try {
        failing.count_total("x", std::nullopt);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SourceError);
    }
    CHECK(broken.urls.size() == 4);

    FakeCrossref bad_request;
    bad_request.fallback = [](const std::string&) { return HttpResponse{400, "", std::nullopt}; };
    CrossrefSource no_retry(bad_request.config(), bad_request.transport());
    CHECK_THROWS_AS(no_retry.count_total("x", std::nullopt), Error);
    CHECK(bad_request.urls.size() == 1);
}

TEST_CASE("crossref adapter: spacing between request starts") {
    FakeCrossref fake;
    auto cfg = fake.config();
    cfg.min_spacing = std::chrono::milliseconds(100);
    CrossrefSource src(cfg, fake.transport());
    src.count_total("a", std::nullopt);
    src.count_total("b", std::nullopt);
    src.count_total("c", std::nullopt);
    // Back-to-back requests must wait out the remaining spacing.
    REQUIRE(fake.sleeps.size() == 2);
    for (auto d : fake.sleeps) {
        CHECK(d > std::chrono::milliseconds(0));
        CHECK(d <= std::chrono::milliseconds(100));
    }
}

TEST_CASE("crossref adapter: facets and the year-facet path") {
    FakeCrossref fake;
    fake.fallback = [&](const std::string& url) {
        if (url.find("facet=container-title") != std::string::npos) {
            return HttpResponse{200, read_fixture("crossref_container_facet.json"), std::nullopt};
        }
        if (url.find("facet=published") != std::string::npos) {
            return HttpResponse{200, read_fixture("crossref_year_facet.json"), std::nullopt};
        }
        return HttpResponse{200, R"({"message":{"total-results":1}})", std::nullopt};
    };
    CrossrefSource src(fake.config(), fake.transport());
    const auto buckets = src.facet_counts("x", RankDimension::Venue, 2, YearRange{2010, 2020});
    CHECK(buckets == std::vector<FacetBucket>{{"J1", 5}, {"J0", 3}});
    CHECK(fake.urls.back().find("facet=container-title:2") != std::string::npos);
    CHECK(fake.urls.back().find("filter=from-pub-date:2010-01-01,until-pub-date:2020-12-31") != std::string::npos);

    auto cfg = fake.config();
    cfg.use_year_facet = true;
    CrossrefSource faceted(cfg, fake.transport());
    const auto years = faceted.yearly_counts("x", 2019, 2021);
    CHECK(years == std::vector<YearCount>{{2019, 7}, {2020, 0}, {2021, 2}});
    CHECK(faceted.request_log().size() == 1);
    CHECK(faceted.request_log()[0].find("facet=published:*") != std::string::npos);
}
