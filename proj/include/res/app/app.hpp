#pragma once

#include "res/pipeline/pipeline.hpp"
#include "res/service/server.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace res::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Configuration keys, read from the environment first and then from an
/// optional KEY=VALUE file:
///   RES_HOST, RES_PORT, RES_STORE_DIR, RES_STATIC_DIR, RES_DATA_DIR,
///   RES_PROVIDER (mock|live), RES_MODEL, RES_API_KEY_VAR, RES_ENDPOINT,
///   RES_CROSSREF_MAILTO, RES_FIXTURES
using Lookup = std::function<std::optional<std::string>(std::string_view key)>;

Lookup env_lookup();
Lookup layered_lookup(Lookup first, std::map<std::string, std::string> fallback);

// Blank lines and lines starting with '#' are ignored. Throws
// std::invalid_argument on a malformed line or an unreadable file.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

std::filesystem::path default_data_dir();

// Throws std::invalid_argument on malformed values.
service::ServiceConfig service_config(const Lookup& lookup);

/// Settings shared by the commands that build providers and sources.
struct Backend {
    std::string source = "local";   // local | crossref
    std::string provider = "mock";  // mock | live
    std::uint64_t seed = 42;
    std::uint64_t n = 10'000;
    std::optional<std::filesystem::path> fixtures;
    llm::ProviderConfig provider_config;
    std::string crossref_mailto = "res-scholarsearch@example.org";
};

struct AskOptions {
    std::string question;
    Backend backend;
    bool show_layers = false;
    bool json = false;
};

/// Default output is the narrative; --show-layers adds plan, summary and
/// ledger; --json prints the RunRecord. 0 on success, 1 when the run
/// failed, 2 on invalid input or configuration.
int cmd_ask(const AskOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
    std::filesystem::path suite;
    int runs = 5;
    std::string mode = "mock";  // mock | live
    std::filesystem::path out_dir = "bench-out";
    std::uint64_t seed = 42;
    std::uint64_t n = 10'000;
    std::size_t naive_records = 50;
    Backend backend;  // provider settings for live mode
};

/// Writes bench_report.json, invariance_report.json and the figure CSVs
/// into out_dir. 1 when a completed run shows executor tokens or every run
/// failed; 2 on usage errors.
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    std::vector<std::uint64_t> sizes{100, 1'000, 10'000, 100'000, 1'000'000};
    std::uint64_t seed = 42;
    std::string query = "How has quantum computing grown from 2015 to 2024?";
    std::optional<std::filesystem::path> out_dir;
    pipeline::ExecuteFn execute;  // replaced only by negative-control tests
};

/// Prints n, res_tokens, naive_model_tokens, executor_requests and
/// records_scanned per size, then the flatness ratio. 0 iff the ratio is
/// within tolerance.
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

// "100,1000,1e4" style lists. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_sizes(std::string_view text);

struct ServeOptions {
    service::ServiceConfig config;
    // Polled while serving; set to request shutdown without a signal.
    const std::atomic<bool>* stop = nullptr;
    std::function<void(int port)> on_ready;
};

/// Serves until SIGINT/SIGTERM (or *stop). 0 after a clean shutdown, 2 when
/// the port is invalid or cannot be bound.
int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);

}  // namespace res::app
