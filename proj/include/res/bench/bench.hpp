#pragma once

#include "res/core/json.hpp"
#include "res/core/types.hpp"
#include "res/datasources/source.hpp"
#include "res/datasources/synthetic.hpp"
#include "res/llm/provider.hpp"
#include "res/pipeline/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace res::bench {

/// Linear cost of stuffing n records into the context:
/// cost(n) = n * mean_record_tokens + prompt_overhead.
struct NaiveCostModel {
    double mean_record_tokens = 1.0;
    std::uint64_t prompt_overhead = 0;
};

double naive_cost(std::uint64_t n, const NaiveCostModel& model);

/// mean_record_tokens = (observed_mean - prompt_overhead) / records.
NaiveCostModel calibrate_naive_model(double observed_mean, std::uint64_t prompt_overhead = 200,
                                     std::uint64_t records = 50);

/// Calibrated on a 50-record naive mean of 5,934 tokens with a 200-token
/// prompt overhead, i.e. 114.68 tokens per record.
NaiveCostModel reference_naive_model();

struct Savings {
    double fraction = 0.0;
    bool flagged = false;  // res_mean > naive_mean: negative savings
};

// Throws std::invalid_argument when naive_mean <= 0.
Savings compute_savings(double res_mean, double naive_mean);

const std::string& naive_system_prompt();

/// Single-prompt baseline: the question plus every record (JSON lines) in
/// one completion call. Returns the measured usage.
TokenUsage run_naive_baseline(const UserQuery& query, std::span<const datasources::SyntheticRecord> records,
                              llm::LlmProvider& provider);

/// Up to `count` records matching the question's rule-based subject, filled
/// up from the start of the pool when too few match.
std::vector<datasources::SyntheticRecord> select_naive_records(std::span<const datasources::SyntheticRecord> pool,
                                                               const std::string& question, std::size_t count);

struct SuiteQuery {
    std::string id;
    Intent intent = Intent::Statistics;
    std::string text;
};

// JSON list of {"id", "intent", "text"}.
std::vector<SuiteQuery> parse_suite(std::string_view json_text);
std::vector<SuiteQuery> load_suite(const std::filesystem::path& path);

struct BenchRun {
    std::string query_id;
    std::string query;
    Intent intent = Intent::Statistics;
    int repetition = 0;
    RunStatus status = RunStatus::Failed;
    std::optional<std::string> failure_reason;
    RunLedger ledger;
    std::uint64_t ledger_total = 0;
};

struct QueryNaive {
    std::string query_id;
    std::string query;
    std::optional<std::uint64_t> naive_tokens;  // empty when the naive call failed
};

struct BenchmarkReport {
    std::vector<BenchRun> runs;
    std::vector<QueryNaive> naive;
    double res_mean = 0.0;
    double res_stddev = 0.0;
    double naive_mean = 0.0;
    double savings_fraction = 0.0;
    bool savings_flagged = false;
    std::uint64_t failed_count = 0;
    std::vector<std::string> flagged_queries;  // every run of the query failed
    NaiveCostModel calibrated_model;           // from the measured naive mean
};

struct BenchmarkOptions {
    int runs_per_query = 5;
    std::size_t naive_records = 50;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Executes every suite query runs_per_query times through the pipeline,
/// then one naive baseline call per query. Statistics cover completed runs
/// only; failures are counted, never dropped silently. naive_provider may be
/// the same object as provider.
BenchmarkReport run_benchmark(std::span<const SuiteQuery> suite, const BenchmarkOptions& options,
                              const datasources::DataSource& source, llm::LlmProvider& provider,
                              std::span<const datasources::SyntheticRecord> naive_pool,
                              llm::LlmProvider& naive_provider);

struct InvarianceEntry {
    std::uint64_t n = 0;
    std::uint64_t res_tokens = 0;
    double res_tokens_stddev = 0.0;
    std::uint64_t summary_tokens = 0;
    std::uint64_t executor_requests = 0;
    std::uint64_t records_scanned = 0;
    double naive_model_tokens = 0.0;
};

struct InvarianceReport {
    std::string query;
    std::uint64_t seed = 0;
    NaiveCostModel model;
    std::vector<InvarianceEntry> entries;  // ascending n
    double flatness_ratio = 1.0;           // max / min res_tokens
};

struct InvarianceOptions {
    std::string query = "How has quantum computing grown from 2015 to 2024?";
    std::uint64_t seed = 42;
    NaiveCostModel model = reference_naive_model();
    int repeats = 1;
    pipeline::ExecuteFn execute;  // executor::execute when empty
};

inline constexpr double kFlatnessTolerance = 1.05;
inline constexpr std::uint64_t kMaxDeskScaleSize = 1'000'000;

/// For each n builds SyntheticSource(seed, n) and runs the full pipeline
/// with the deterministic mock provider. Sizes must ascend and stay within
/// desk scale (10^6). Throws std::runtime_error if a run fails.
InvarianceReport verify_invariance(std::span<const std::uint64_t> sizes, const InvarianceOptions& options);

void to_json(Json& j, const BenchmarkReport& report);
void to_json(Json& j, const InvarianceReport& report);

/// Writes fig2_invariance.csv, fig3_scaling.csv, fig4_per_query.csv,
/// fig5_histogram.csv and fig6_layers.csv into dir. Missing reports give
/// header-only files. fig3 also carries model projections for
/// projection_sizes, using the mean measured RES tokens (measured = 0).
void export_figure_data(const std::filesystem::path& dir, const BenchmarkReport* bench,
                        const InvarianceReport* invariance,
                        std::span<const std::uint64_t> projection_sizes = {});

}  // namespace res::bench
