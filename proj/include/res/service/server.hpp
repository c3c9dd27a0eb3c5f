#pragma once

#include "res/datasources/source.hpp"
#include "res/llm/provider.hpp"
#include "res/service/run_store.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace res::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path store_dir = "res-store";
    std::filesystem::path data_dir;     // benchmark suites are resolved here
    std::optional<std::filesystem::path> static_dir;  // built web UI, mounted at /
    std::optional<std::filesystem::path> fixtures;    // mock provider fixture file
    llm::ProviderConfig provider;       // kind = default provider for runs
    std::string crossref_mailto = "res-scholarsearch@example.org";
    std::uint64_t default_seed = 42;
    std::uint64_t default_n = 10'000;
};

/// Options of one submitted run, as accepted by POST /api/query.
struct RunOptions {
    std::string source = "local";  // local | crossref
    std::string provider = "mock"; // mock | live
    std::uint64_t seed = 42;
    std::uint64_t n = 10'000;
};

/// Overridable construction of run dependencies; tests inject fakes here.
struct ServiceHooks {
    std::function<std::shared_ptr<const datasources::DataSource>(const RunOptions&)> make_source;
    std::function<std::shared_ptr<llm::LlmProvider>(const RunOptions&)> make_provider;
};

/// HTTP+JSON API over the pipeline:
///   POST /api/query              {"question", "source"?, "provider"?, "seed"?, "n"?} -> 202 {"run_id"}
///   GET  /api/runs?limit&offset  newest first
///   GET  /api/runs/{id}          RunRecord, or status "running"
///   GET  /api/runs/{id}/events   text/event-stream: stored events replayed,
///                                then live ones; closes after the terminal event
///   POST /api/bench              {"suite"?, "mode"?, "runs"?, "seed"?, "n"?} -> 202 {"bench_id"}
///   GET  /api/bench/{id}         progress and, when done, the report
///   GET  /api/health             {"status":"ok"}
/// Every run executes on its own worker thread.
class Service {
public:
    explicit Service(ServiceConfig config, ServiceHooks hooks = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns false
    /// when the address cannot be bound.
    bool bind();
    int port() const;

    /// Serves until stop(). Requires a successful bind().
    void serve();

    /// Stops accepting requests, ends event streams and waits for in-flight
    /// runs and benchmarks to finish.
    void stop();

    RunStore& store();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace res::service
