#include "res/service/server.hpp"

#include "res/bench/bench.hpp"
#include "res/datasources/crossref.hpp"
#include "res/datasources/synthetic.hpp"
#include "res/llm/live_provider.hpp"
#include "res/llm/mock_provider.hpp"
#include "res/pipeline/pipeline.hpp"

#include <httplib.h>

#include <atomic>
#include <deque>
#include <iostream>
#include <list>
#include <thread>

namespace res::service {

namespace {

constexpr std::size_t kMaxCachedSources = 4;
constexpr std::size_t kDefaultPageSize = 20;
constexpr std::size_t kMaxPageSize = 100;
constexpr auto kStreamPoll = std::chrono::milliseconds(500);

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, Json{{"error", message}});
}

class BadRequest : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t read_count(const Json& body, const char* key, std::uint64_t fallback) {
    if (!body.contains(key)) return fallback;
    const auto& v = body.at(key);
    if (!v.is_number_unsigned()) throw BadRequest(std::string(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string read_string(const Json& body, const char* key, std::string fallback) {
    if (!body.contains(key)) return fallback;
    const auto& v = body.at(key);
    if (!v.is_string()) throw BadRequest(std::string(key) + " must be a string");
    return v.get<std::string>();
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json body;
    try {
        body = Json::parse(req.body);
    } catch (const Json::exception&) {
        throw BadRequest("request body is not valid JSON");
    }
    if (!body.is_object()) throw BadRequest("request body must be a JSON object");
    return body;
}

std::string sse_frame(const LayerEvent& event, std::size_t index) {
    return "id: " + std::to_string(index) + "\nevent: " + std::string(to_string(event.event)) +
           "\ndata: " + Json(event).dump() + "\n\n";
}

struct BenchJob {
    std::string status = "running";
    std::size_t done = 0;
    std::size_t total = 0;
    std::optional<Json> report;
    std::optional<std::string> error;
};

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    ServiceHooks hooks;
    RunStore store;
    httplib::Server server;
    std::atomic<bool> stopping{false};
    std::atomic<bool> stopped{false};
    int bound_port = -1;

    std::mutex workers_mutex;
    struct Worker {
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> finished;
    };
    std::list<Worker> workers;

    std::mutex sources_mutex;
    std::deque<std::pair<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const datasources::DataSource>>>
        synthetic_cache;
    std::shared_ptr<const datasources::DataSource> crossref;

    std::mutex providers_mutex;
    std::shared_ptr<llm::LlmProvider> mock;
    std::shared_ptr<llm::LlmProvider> live;

    std::mutex bench_mutex;
    std::map<std::string, BenchJob> benches;

    Impl(ServiceConfig c, ServiceHooks h) : config(std::move(c)), hooks(std::move(h)), store(config.store_dir) {}

    std::shared_ptr<const datasources::DataSource> source_for(const RunOptions& options) {
        if (hooks.make_source) return hooks.make_source(options);
        std::lock_guard lock(sources_mutex);
        if (options.source == "crossref") {
            if (!crossref) {
                datasources::CrossrefConfig cfg;
                cfg.mailto = config.crossref_mailto;
                crossref = std::make_shared<datasources::CrossrefSource>(cfg);
            }
            return crossref;
        }
        const auto key = std::pair{options.seed, options.n};
        for (const auto& [k, src] : synthetic_cache) {
            if (k == key) return src;
        }
        auto src = std::make_shared<datasources::SyntheticSource>(options.seed, options.n);
        synthetic_cache.emplace_back(key, src);
        if (synthetic_cache.size() > kMaxCachedSources) synthetic_cache.pop_front();
        return src;
    }

    std::shared_ptr<llm::LlmProvider> provider_for(const RunOptions& options) {
        if (hooks.make_provider) return hooks.make_provider(options);
        std::lock_guard lock(providers_mutex);
        if (options.provider == "live") {
            if (!live) {
                auto cfg = config.provider;
                cfg.kind = llm::ProviderKind::Live;
                live = std::make_shared<llm::LiveProvider>(cfg);
            }
            return live;
        }
        if (!mock) {
            std::vector<llm::Fixture> fixtures;
            if (config.fixtures) fixtures = llm::load_fixtures(*config.fixtures);
            mock = pipeline::make_mock_provider(std::move(fixtures));
        }
        return mock;
    }

    RunOptions read_options(const Json& body) const {
        RunOptions options;
        options.source = read_string(body, "source", "local");
        options.provider = read_string(body, "provider",
                                       config.provider.kind == llm::ProviderKind::Live ? "live" : "mock");
        options.seed = read_count(body, "seed", config.default_seed);
        options.n = read_count(body, "n", config.default_n);
        if (options.source != "local" && options.source != "crossref") {
            throw BadRequest("unknown source: " + options.source);
        }
        if (options.provider != "mock" && options.provider != "live") {
            throw BadRequest("unknown provider: " + options.provider);
        }
        if (options.n == 0 || options.n > datasources::kMaxSyntheticRecords) {
            throw BadRequest("n must lie in 1..10000000");
        }
        return options;
    }

    void spawn(std::function<void()> work) {
        std::lock_guard lock(workers_mutex);
        if (stopping.load()) throw std::runtime_error("service is shutting down");
        for (auto it = workers.begin(); it != workers.end();) {
            if (it->finished->load()) {
                it->thread.join();
                it = workers.erase(it);
            } else {
                ++it;
            }
        }
        auto finished = std::make_shared<std::atomic<bool>>(false);
        workers.push_back(Worker{std::thread([work = std::move(work), finished] {
                                     work();
                                     finished->store(true);
                                 }),
                                 finished});
    }

    void execute_run(const std::string& run_id, const UserQuery& query,
                     std::shared_ptr<const datasources::DataSource> source,
                     std::shared_ptr<llm::LlmProvider> provider) {
        try {
            std::optional<LayerEvent> terminal;
            pipeline::PipelineOptions options;
            options.run_id = run_id;
            options.on_event = [&](const LayerEvent& event) {
                // The terminal event is published after the record, so a client
                // that saw it always finds the finished run.
                if (is_terminal(event.event)) {
                    terminal = event;
                } else {
                    store.append_event(event);
                }
            };
            const auto record = pipeline::run_pipeline(query, *source, *provider, options);
            store.record_finished(record);
            if (terminal) store.append_event(*terminal);
        } catch (const std::exception& e) {
            std::cerr << "run " << run_id << ": " << e.what() << '\n';
        }
    }

    void handle_query(const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (!body.contains("question") || !body.at("question").is_string()) {
            throw BadRequest("question must be a string");
        }
        std::optional<UserQuery> query;
        try {
            query = UserQuery::make(body.at("question").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw BadRequest(e.what());
        }
        const auto options = read_options(body);

        std::shared_ptr<llm::LlmProvider> provider;
        std::shared_ptr<const datasources::DataSource> source;
        try {
            provider = provider_for(options);
            source = source_for(options);
        } catch (const std::exception& e) {
            throw BadRequest(e.what());
        }

        const auto run_id = pipeline::new_run_id();
        store.record_started(run_id, query->text(), now_utc());
        spawn([this, run_id, q = *query, source, provider] { execute_run(run_id, q, source, provider); });
        send_json(res, 202, Json{{"run_id", run_id}});
    }

    void handle_list(const httplib::Request& req, httplib::Response& res) {
        const auto read = [&](const char* key, std::size_t fallback) -> std::size_t {
            if (!req.has_param(key)) return fallback;
            const auto text = req.get_param_value(key);
            std::size_t pos = 0;
            unsigned long long value = 0;
            try {
                value = std::stoull(text, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos == 0 || pos != text.size() || text.front() == '-') {
                throw BadRequest(std::string(key) + " must be a non-negative integer");
            }
            return static_cast<std::size_t>(value);
        };
        const auto limit = std::min(read("limit", kDefaultPageSize), kMaxPageSize);
        const auto offset = read("offset", 0);
        auto page = store.list(limit, offset);
        send_json(res, 200,
                  Json{{"runs", std::move(page.runs)}, {"total", page.total}, {"limit", limit}, {"offset", offset}});
    }

    void handle_get(const std::string& id, httplib::Response& res) {
        auto run = store.get(id);
        if (!run) return send_error(res, 404, "unknown run " + id);
        if (run->contains("narrative")) {
            const auto& narrative = run->at("narrative");
            (*run)["chart"] = narrative.is_object() ? narrative.value("chart", Json(nullptr)) : Json(nullptr);
        }
        send_json(res, 200, *run);
    }

    void handle_events(const httplib::Request& req, const std::string& id, httplib::Response& res) {
        if (!store.contains(id)) return send_error(res, 404, "unknown run " + id);
        std::size_t next = 0;
        if (req.has_header("Last-Event-ID")) {
            try {
                next = std::stoull(req.get_header_value("Last-Event-ID")) + 1;
            } catch (const std::exception&) {
                next = 0;
            }
        }
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream", [this, id, next](std::size_t, httplib::DataSink& sink) mutable {
                const auto events = store.wait_events(id, next, kStreamPoll);
                for (const auto& event : events) {
                    const auto frame = sse_frame(event, next++);
                    if (!sink.write(frame.data(), frame.size())) return false;
                    if (is_terminal(event.event)) {
                        sink.done();
                        return true;
                    }
                }
                if (stopping.load()) {
                    sink.done();
                    return true;
                }
                if (events.empty()) {
                    // Keep-alive comment; also detects closed clients.
                    static constexpr std::string_view ping = ": ping\n\n";
                    if (!sink.write(ping.data(), ping.size())) return false;
                }
                return true;
            });
    }

    void handle_bench_start(const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto suite_name = read_string(body, "suite", "benchmark_suite.json");
        const auto mode = read_string(body, "mode", "mock");
        const auto runs = read_count(body, "runs", 5);
        const auto seed = read_count(body, "seed", config.default_seed);
        const auto n = read_count(body, "n", config.default_n);
        if (suite_name.empty() || suite_name.find('/') != std::string::npos ||
            suite_name.find("..") != std::string::npos) {
            throw BadRequest("suite must be a file name inside the data directory");
        }
        if (mode != "mock" && mode != "live") throw BadRequest("mode must be mock or live");
        if (runs < 1 || runs > 100) throw BadRequest("runs must lie in 1..100");
        if (n == 0 || n > datasources::kMaxSyntheticRecords) throw BadRequest("n must lie in 1..10000000");

        std::vector<bench::SuiteQuery> suite;
        try {
            suite = bench::load_suite(config.data_dir / suite_name);
        } catch (const std::exception& e) {
            throw BadRequest(e.what());
        }

        RunOptions options;
        options.source = mode == "live" ? "crossref" : "local";
        options.provider = mode;
        options.seed = seed;
        options.n = n;
        std::shared_ptr<llm::LlmProvider> provider;
        std::shared_ptr<const datasources::DataSource> source;
        try {
            provider = provider_for(options);
            source = source_for(options);
        } catch (const std::exception& e) {
            throw BadRequest(e.what());
        }

        const auto bench_id = pipeline::new_run_id();
        {
            std::lock_guard lock(bench_mutex);
            benches[bench_id] = BenchJob{};
        }
        spawn([this, bench_id, suite = std::move(suite), runs, seed, provider, source] {
            try {
                const datasources::SyntheticSource pool(seed, 2'000);
                bench::BenchmarkOptions bopts;
                bopts.runs_per_query = static_cast<int>(runs);
                bopts.progress = [&](std::size_t done, std::size_t total) {
                    std::lock_guard lock(bench_mutex);
                    benches[bench_id].done = done;
                    benches[bench_id].total = total;
                };
                const auto report = bench::run_benchmark(suite, bopts, *source, *provider, pool.records(), *provider);
                std::lock_guard lock(bench_mutex);
                benches[bench_id].report = Json(report);
                benches[bench_id].status = "completed";
            } catch (const std::exception& e) {
                std::lock_guard lock(bench_mutex);
                benches[bench_id].error = e.what();
                benches[bench_id].status = "failed";
            }
        });
        send_json(res, 202, Json{{"bench_id", bench_id}});
    }

    void handle_bench_get(const std::string& id, httplib::Response& res) {
        std::lock_guard lock(bench_mutex);
        const auto it = benches.find(id);
        if (it == benches.end()) return send_error(res, 404, "unknown benchmark " + id);
        const auto& job = it->second;
        send_json(res, 200,
                  Json{{"bench_id", id},
                       {"status", job.status},
                       {"done", job.done},
                       {"total", job.total},
                       {"report", job.report ? *job.report : Json(nullptr)},
                       {"error", job.error ? Json(*job.error) : Json(nullptr)}});
    }

    template <typename Handler>
    auto guarded(Handler handler) {
        return [this, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                handler(req, res);
            } catch (const BadRequest& e) {
                send_error(res, 400, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            }
        };
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, Json{{"status", "ok"}});
        });
        server.Post("/api/query", guarded([this](const auto& req, auto& res) { handle_query(req, res); }));
        server.Get("/api/runs", guarded([this](const auto& req, auto& res) { handle_list(req, res); }));
        server.Get(R"(/api/runs/([A-Za-z0-9_-]+))",
                   guarded([this](const auto& req, auto& res) { handle_get(req.matches[1], res); }));
        server.Get(R"(/api/runs/([A-Za-z0-9_-]+)/events)",
                   guarded([this](const auto& req, auto& res) { handle_events(req, req.matches[1], res); }));
        server.Post("/api/bench", guarded([this](const auto& req, auto& res) { handle_bench_start(req, res); }));
        server.Get(R"(/api/bench/([A-Za-z0-9_-]+))",
                   guarded([this](const auto& req, auto& res) { handle_bench_get(req.matches[1], res); }));
        server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
            res.status = 204;
        });
        if (config.static_dir && std::filesystem::is_directory(*config.static_dir)) {
            server.set_mount_point("/", config.static_dir->string());
        }
    }

    void shutdown() {
        if (stopped.exchange(true)) return;
        stopping = true;
        store.close();
        server.stop();
        std::list<Worker> pending;
        {
            std::lock_guard lock(workers_mutex);
            pending.swap(workers);
        }
        for (auto& w : pending) w.thread.join();
    }
};

Service::Service(ServiceConfig config, ServiceHooks hooks)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(hooks))) {
    impl_->routes();
}

Service::~Service() { stop(); }

bool Service::bind() {
    if (impl_->config.port < 0 || impl_->config.port > 65535) return false;
    if (impl_->config.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(impl_->config.host);
        return impl_->bound_port > 0;
    }
    if (!impl_->server.bind_to_port(impl_->config.host, impl_->config.port)) return false;
    impl_->bound_port = impl_->config.port;
    return true;
}

int Service::port() const { return impl_->bound_port; }

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->shutdown(); }

RunStore& Service::store() { return impl_->store; }

}  // namespace res::service
