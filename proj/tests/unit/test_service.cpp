#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/pipeline/pipeline.hpp"
#include "res/service/run_store.hpp"
#include "res/service/server.hpp"

#include <httplib.h>
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace res;
using namespace res::service;
using namespace std::chrono_literals;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("res-svc-" + name + "-" + pipeline::new_run_id());
    std::filesystem::remove_all(dir);
    return dir;
}

// A service on an ephemeral port, served from a background thread.
struct RunningService {
    std::unique_ptr<Service> service;
    std::thread thread;
    std::unique_ptr<httplib::Client> client;

    explicit RunningService(const std::filesystem::path& store_dir, ServiceHooks hooks = {}) {
        ServiceConfig config;
        config.port = 0;
        config.store_dir = store_dir;
        config.data_dir = RES_TEST_DATA_DIR;
        config.default_n = 2'000;
        service = std::make_unique<Service>(config, std::move(hooks));
        REQUIRE(service->bind());
        thread = std::thread([this] { service->serve(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", service->port());
        client->set_read_timeout(10s);
    }
    ~RunningService() {
        service->stop();
        thread.join();
    }

    Json get_json(const std::string& path, int expect_status = 200) {
        auto res = client->Get(path);
        REQUIRE(res);
        CHECK(res->status == expect_status);
        return Json::parse(res->body);
    }
    httplib::Result post(const std::string& path, const Json& body) {
        return client->Post(path, body.dump(), "application/json");
    }
    std::string submit(const std::string& question) {
        auto res = post("/api/query", Json{{"question", question}});
        REQUIRE(res);
        REQUIRE(res->status == 202);
        return Json::parse(res->body).at("run_id").get<std::string>();
    }
    Json wait_finished(const std::string& run_id) {
        for (int i = 0; i < 200; ++i) {
            auto run = get_json("/api/runs/" + run_id);
            if (run.at("status") != "running") return run;
            std::this_thread::sleep_for(25ms);
        }
        FAIL("run did not finish: " << run_id);
        return {};
    }
    // Event names and ids from one full SSE stream.
    std::vector<std::pair<std::string, std::string>> stream(const std::string& run_id,
                                                            std::optional<std::string> last_event_id = {}) {
        httplib::Headers headers;
        if (last_event_id) headers.emplace("Last-Event-ID", *last_event_id);
        std::string body;
        auto res = client->Get("/api/runs/" + run_id + "/events", headers, [&](const char* data, std::size_t n) {
            body.append(data, n);
            return true;
        });
        REQUIRE(res);
        CHECK(res->status == 200);
        std::vector<std::pair<std::string, std::string>> out;
        std::istringstream in(body);
        std::string line, id;
        while (std::getline(in, line)) {
            if (line.rfind("id: ", 0) == 0) id = line.substr(4);
            if (line.rfind("event: ", 0) == 0) out.emplace_back(line.substr(7), id);
        }
        return out;
    }
};

void collect_keys(const Json& j, std::set<std::string>& keys) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            keys.insert(to_lower_ascii(k));
            collect_keys(v, keys);
        }
    } else if (j.is_array()) {
        for (const auto& v : j) collect_keys(v, keys);
    }
}

const std::vector<std::string> kSuccessEvents = {"reasoner_started",      "reasoner_completed", "executor_started",
                                                 "executor_completed",    "synthesizer_started",
                                                 "synthesizer_completed", "run_completed"};

}  // namespace

TEST_CASE("run store: persistence, paging and torn lines") {
    const auto dir = fresh_dir("store");
    {
        RunStore store(dir);
        CHECK(store.size() == 0);
        CHECK(store.list(20, 0).runs.empty());
        for (int i = 0; i < 3; ++i) {
            const auto id = "r" + std::to_string(i);
            store.record_started(id, "q" + std::to_string(i), now_utc());
            store.append_event(LayerEvent{id, LayerEventKind::ReasonerStarted, Json::object(), now_utc()});
            RunRecord r;
            r.run_id = id;
            r.query = "q" + std::to_string(i);
            r.status = RunStatus::Failed;
            r.failure_reason = "plan_invalid";
            r.started_at = r.finished_at = now_utc();
            store.record_finished(r);
        }
        store.record_started("live", "in flight", now_utc());
        CHECK(store.get("live")->at("status") == "running");
    }
    // Simulate a torn final write.
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::ofstream(entry.path(), std::ios::app) << "{\"kind\":\"run\",\"rec";
    }
    RunStore reopened(dir);
    CHECK(reopened.size() == 4);
    const auto page = reopened.list(2, 0);
    CHECK(page.total == 4);
    REQUIRE(page.runs.size() == 2);
    CHECK(page.runs[0].at("run_id") == "live");
    CHECK(page.runs[1].at("run_id") == "r2");
    CHECK(reopened.list(2, 2).runs.at(1).at("run_id") == "r0");
    CHECK(reopened.list(5, 10).runs.empty());
    CHECK(reopened.events("r1").size() == 1);
    CHECK(reopened.get("r1")->at("failure_reason") == "plan_invalid");
    CHECK_FALSE(reopened.get("missing").has_value());
    CHECK(reopened.wait_events("r1", 1, 10ms).empty());
    reopened.close();
    CHECK(reopened.wait_events("live", 0, 5s).empty());
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: query lifecycle over HTTP") {
    const auto dir = fresh_dir("lifecycle");
    RunningService svc(dir);
    CHECK(svc.get_json("/api/health").at("status") == "ok");
    CHECK(svc.get_json("/api/runs").at("runs").empty());

    const auto id = svc.submit("How has quantum computing grown from 2015 to 2024?");
    const auto run = svc.wait_finished(id);
    CHECK(run.at("status") == "completed");
    CHECK(run.at("ledger").at("executor").at("input_tokens") == 0);
    CHECK(run.at("ledger").at("executor").at("output_tokens") == 0);
    CHECK(run.at("chart").at("chart_type") == "line");
    CHECK(run.at("summary").at("metadata").at("dataset_size_estimate") == 2'000);

    const auto events = svc.stream(id);
    std::vector<std::string> names;
    for (const auto& [name, event_id] : events) names.push_back(name);
    CHECK(names == kSuccessEvents);
    CHECK(events.front().second == "0");

    // Reconnect after the third event: only the rest is replayed.
    const auto resumed = svc.stream(id, "2");
    REQUIRE(resumed.size() == 4);
    CHECK(resumed.front().first == "executor_completed");
    CHECK(resumed.front().second == "3");

    // Only aggregates leave the service: no record-level fields anywhere.
    std::set<std::string> keys;
    collect_keys(run, keys);
    for (const auto* forbidden : {"title", "author", "authors", "abstract", "doi", "url", "items"}) {
        CHECK_MESSAGE(keys.count(forbidden) == 0, forbidden);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: failed run, listing and errors") {
    const auto dir = fresh_dir("errors");
    RunningService svc(dir);
    const auto bad = svc.submit("???");
    const auto run = svc.wait_finished(bad);
    CHECK(run.at("status") == "failed");
    CHECK(run.at("failure_reason") == "plan_invalid");
    std::vector<std::string> names;
    for (const auto& [name, id] : svc.stream(bad)) names.push_back(name);
    CHECK(names == std::vector<std::string>{"reasoner_started", "run_failed"});

    svc.wait_finished(svc.submit("How many papers on graphene?"));
    svc.wait_finished(svc.submit("Compare CRISPR vs gene therapy"));
    const auto page = svc.get_json("/api/runs?limit=2");
    CHECK(page.at("total") == 3);
    CHECK(page.at("limit") == 2);
    REQUIRE(page.at("runs").size() == 2);
    CHECK(page.at("runs")[0].at("query") == "Compare CRISPR vs gene therapy");
    CHECK(page.at("runs")[1].at("ledger_total").get<std::uint64_t>() > 0);

    CHECK(svc.get_json("/api/runs/nope", 404).contains("error"));
    CHECK(svc.client->Get("/api/runs/nope/events")->status == 404);
    CHECK(svc.client->Get("/api/bench/nope")->status == 404);
    CHECK(svc.post("/api/query", Json{{"question", ""}})->status == 400);
    CHECK(svc.post("/api/query", Json{{"question", "x"}, {"source", "elsewhere"}})->status == 400);
    CHECK(svc.post("/api/query", Json{{"question", "x"}, {"n", 0}})->status == 400);
    CHECK(svc.client->Post("/api/query", "not json", "application/json")->status == 400);
    CHECK(svc.post("/api/bench", Json{{"suite", "../etc/passwd"}})->status == 400);
    CHECK(svc.post("/api/bench", Json{{"runs", 0}})->status == 400);
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: source failures surface as failed runs") {
    const auto dir = fresh_dir("hooks");
    struct DownSource final : datasources::DataSource {
        std::string source_name() const override { return "down"; }
        std::uint64_t count_total(std::string_view, const std::optional<YearRange>&) const override {
            fail(ErrorKind::SourceError, "down");
        }
        std::vector<datasources::YearCount> yearly_counts(std::string_view, int, int) const override {
            fail(ErrorKind::SourceError, "down");
        }
        std::vector<datasources::FacetBucket> facet_counts(std::string_view, RankDimension, int,
                                                           const std::optional<YearRange>&) const override {
            fail(ErrorKind::SourceError, "down");
        }
        std::uint64_t dataset_size_estimate() const override { fail(ErrorKind::SourceError, "down"); }
        Timestamp snapshot_time() const override { return now_utc(); }
        datasources::SourceStats stats() const override { return {}; }
    };
    ServiceHooks hooks;
    hooks.make_source = [](const RunOptions&) { return std::make_shared<DownSource>(); };
    RunningService svc(dir, hooks);
    const auto run = svc.wait_finished(svc.submit("How many papers on graphene?"));
    CHECK(run.at("failure_reason") == "source_error");
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: runs survive a restart") {
    const auto dir = fresh_dir("restart");
    std::string id;
    {
        RunningService svc(dir);
        id = svc.submit("Top 5 publishers for machine learning");
        svc.wait_finished(id);
    }
    RunningService again(dir);
    const auto run = again.get_json("/api/runs/" + id);
    CHECK(run.at("status") == "completed");
    CHECK(again.stream(id).size() == kSuccessEvents.size());
    CHECK(again.get_json("/api/runs").at("total") == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: benchmark job") {
    const auto dir = fresh_dir("bench");
    RunningService svc(dir);
    auto res = svc.post("/api/bench", Json{{"runs", 1}, {"n", 500}});
    REQUIRE(res);
    REQUIRE(res->status == 202);
    const auto bench_id = Json::parse(res->body).at("bench_id").get<std::string>();
    Json job;
    for (int i = 0; i < 400; ++i) {
        job = svc.get_json("/api/bench/" + bench_id);
        if (job.at("status") != "running") break;
        std::this_thread::sleep_for(25ms);
    }
    CHECK(job.at("status") == "completed");
    CHECK(job.at("done") == job.at("total"));
    CHECK(job.at("report").at("runs").size() == 20);
    std::filesystem::remove_all(dir);
}
