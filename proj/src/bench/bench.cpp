#include "res/bench/bench.hpp"

#include "res/core/errors.hpp"
#include "res/core/stats.hpp"
#include "res/core/tokens.hpp"
#include "res/executor/executor.hpp"
#include "res/reasoner/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace res::bench {

double naive_cost(std::uint64_t n, const NaiveCostModel& model) {
    return static_cast<double>(n) * model.mean_record_tokens + static_cast<double>(model.prompt_overhead);
}

NaiveCostModel calibrate_naive_model(double observed_mean, std::uint64_t prompt_overhead, std::uint64_t records) {
    if (records == 0) throw std::invalid_argument("calibration needs at least one record");
    const double d = (observed_mean - static_cast<double>(prompt_overhead)) / static_cast<double>(records);
    if (!(d > 0.0)) throw std::invalid_argument("calibrated tokens per record must be positive");
    return NaiveCostModel{d, prompt_overhead};
}

NaiveCostModel reference_naive_model() { return calibrate_naive_model(5934.0, 200, 50); }

Savings compute_savings(double res_mean, double naive_mean) {
    if (!(naive_mean > 0.0)) throw std::invalid_argument("naive mean must be positive");
    return Savings{(naive_mean - res_mean) / naive_mean, res_mean > naive_mean};
}

const std::string& naive_system_prompt() {
    static const std::string prompt =
        "You are a research assistant. Below is a question followed by bibliographic records, one JSON "
        "object per line. Answer the question using only these records. Report counts, trends and "
        "notable venues where relevant, and keep the answer under 200 words.";
    return prompt;
}

TokenUsage run_naive_baseline(const UserQuery& query, std::span<const datasources::SyntheticRecord> records,
                              llm::LlmProvider& provider) {
    if (records.empty()) throw std::invalid_argument("naive baseline needs at least one record");
    std::ostringstream user;
    user << "Question: " << query.text() << "\n\nRecords:\n";
    datasources::write_jsonl(user, records);
    try {
        return provider.complete(llm::PromptSpec{naive_system_prompt(), user.str()}).usage;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ProviderError, e.what());
    }
}

std::vector<datasources::SyntheticRecord> select_naive_records(std::span<const datasources::SyntheticRecord> pool,
                                                               const std::string& question, std::size_t count) {
    std::vector<std::string> tokens;
    try {
        const auto plan = reasoner::rule_based_parse(UserQuery::make(question));
        tokens = datasources::subject_tokens(plan.subjects.front());
    } catch (const std::exception&) {
        // No subject: plain prefix of the pool.
    }

    std::vector<datasources::SyntheticRecord> out;
    std::vector<bool> taken(pool.size(), false);
    for (std::size_t i = 0; i < pool.size() && out.size() < count && !tokens.empty(); ++i) {
        for (auto id : pool[i].keywords()) {
            const auto word = datasources::vocab::keywords()[id];
            if (std::find(tokens.begin(), tokens.end(), word) != tokens.end()) {
                out.push_back(pool[i]);
                taken[i] = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < pool.size() && out.size() < count; ++i) {
        if (!taken[i]) out.push_back(pool[i]);
    }
    return out;
}

std::vector<SuiteQuery> parse_suite(std::string_view json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("suite is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw std::invalid_argument("suite must be a JSON list");
    std::vector<SuiteQuery> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("id") || !item.contains("intent") || !item.contains("text") ||
            !item["id"].is_string() || !item["intent"].is_string() || !item["text"].is_string()) {
            throw std::invalid_argument("suite entries need string id, intent and text");
        }
        const auto intent = intent_from_string(item["intent"].get<std::string>());
        if (!intent) throw std::invalid_argument("unknown intent in suite: " + item["intent"].get<std::string>());
        out.push_back(SuiteQuery{item["id"].get<std::string>(), *intent, item["text"].get<std::string>()});
    }
    return out;
}

std::vector<SuiteQuery> load_suite(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open suite file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_suite(text.str());
}

BenchmarkReport run_benchmark(std::span<const SuiteQuery> suite, const BenchmarkOptions& options,
                              const datasources::DataSource& source, llm::LlmProvider& provider,
                              std::span<const datasources::SyntheticRecord> naive_pool,
                              llm::LlmProvider& naive_provider) {
    if (options.runs_per_query < 1) throw std::invalid_argument("runs_per_query must be at least 1");
    if (options.naive_records < 1) throw std::invalid_argument("naive_records must be at least 1");

    std::vector<SuiteQuery> ordered(suite.begin(), suite.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SuiteQuery& a, const SuiteQuery& b) { return a.id < b.id; });

    BenchmarkReport report;
    const std::size_t total = ordered.size() * static_cast<std::size_t>(options.runs_per_query + 1);
    std::size_t done = 0;
    const auto tick = [&] {
        ++done;
        if (options.progress) options.progress(done, total);
    };

    for (const auto& q : ordered) {
        int completed = 0;
        for (int rep = 0; rep < options.runs_per_query; ++rep) {
            BenchRun run{q.id, q.text, q.intent, rep, RunStatus::Failed, std::nullopt, {}, 0};
            try {
                const auto record = pipeline::run_pipeline(UserQuery::make(q.text), source, provider);
                run.status = record.status;
                run.failure_reason = record.failure_reason;
                run.ledger = record.ledger;
            } catch (const std::invalid_argument&) {
                run.failure_reason = "plan_invalid";
            }
            run.ledger_total = ledger_total(run.ledger);
            if (run.status == RunStatus::Completed) ++completed;
            report.runs.push_back(std::move(run));
            tick();
        }
        if (completed == 0) report.flagged_queries.push_back(q.id);

        QueryNaive naive{q.id, q.text, std::nullopt};
        if (!naive_pool.empty()) {
            try {
                const auto records = select_naive_records(naive_pool, q.text, options.naive_records);
                naive.naive_tokens = run_naive_baseline(UserQuery::make(q.text), records, naive_provider).total();
            } catch (const std::exception&) {
                // Recorded as a missing measurement.
            }
        }
        report.naive.push_back(std::move(naive));
        tick();
    }

    std::vector<std::uint64_t> totals;
    for (const auto& run : report.runs) {
        if (run.status == RunStatus::Completed) {
            totals.push_back(run.ledger_total);
        } else {
            ++report.failed_count;
        }
    }
    if (!totals.empty()) {
        const auto s = summary_stats(totals);
        report.res_mean = s.mean;
        report.res_stddev = s.stddev;
    }

    std::vector<std::uint64_t> naive_totals;
    for (const auto& n : report.naive) {
        if (n.naive_tokens) naive_totals.push_back(*n.naive_tokens);
    }
    if (!naive_totals.empty()) {
        report.naive_mean = summary_stats(naive_totals).mean;
        const auto savings = compute_savings(report.res_mean, report.naive_mean);
        report.savings_fraction = savings.fraction;
        report.savings_flagged = savings.flagged;
        try {
            report.calibrated_model = calibrate_naive_model(report.naive_mean, 200, options.naive_records);
        } catch (const std::invalid_argument&) {
            report.calibrated_model = NaiveCostModel{report.naive_mean / static_cast<double>(options.naive_records), 0};
        }
    }
    return report;
}

InvarianceReport verify_invariance(std::span<const std::uint64_t> sizes, const InvarianceOptions& options) {
    if (sizes.empty()) throw std::invalid_argument("at least one dataset size is required");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0 || sizes[i] > kMaxDeskScaleSize) {
            throw std::invalid_argument("dataset sizes must lie in 1..1000000");
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw std::invalid_argument("dataset sizes must ascend");
    }
    if (options.repeats < 1) throw std::invalid_argument("repeats must be at least 1");

    InvarianceReport report;
    report.query = options.query;
    report.seed = options.seed;
    report.model = options.model;
    const auto query = UserQuery::make(options.query);

    for (const auto n : sizes) {
        const datasources::SyntheticSource source(options.seed, n);
        auto provider = pipeline::make_mock_provider();
        pipeline::PipelineOptions popts;
        popts.execute = options.execute;

        std::vector<std::uint64_t> totals;
        InvarianceEntry entry;
        entry.n = n;
        for (int rep = 0; rep < options.repeats; ++rep) {
            const auto record = pipeline::run_pipeline(query, source, *provider, popts);
            if (record.status != RunStatus::Completed) {
                throw std::runtime_error("invariance run failed at n=" + std::to_string(n) + ": " +
                                         record.failure_reason.value_or("unknown"));
            }
            totals.push_back(ledger_total(record.ledger));
            entry.summary_tokens = estimate_tokens(serialize_canonical(*record.summary));
        }
        const auto s = summary_stats(totals);
        entry.res_tokens = static_cast<std::uint64_t>(std::llround(s.mean));
        entry.res_tokens_stddev = s.stddev;
        const auto stats = source.stats();
        entry.executor_requests = stats.requests / static_cast<std::uint64_t>(options.repeats);
        entry.records_scanned = stats.records_scanned / static_cast<std::uint64_t>(options.repeats);
        entry.naive_model_tokens = naive_cost(n, options.model);
        report.entries.push_back(entry);
    }

    const auto [lo, hi] = std::minmax_element(report.entries.begin(), report.entries.end(),
                                              [](const InvarianceEntry& a, const InvarianceEntry& b) {
                                                  return a.res_tokens < b.res_tokens;
                                              });
    report.flatness_ratio =
        lo->res_tokens == 0 ? 1.0 : static_cast<double>(hi->res_tokens) / static_cast<double>(lo->res_tokens);
    return report;
}

namespace {

Json model_json(const NaiveCostModel& m) {
    return Json{{"mean_record_tokens", m.mean_record_tokens}, {"prompt_overhead", m.prompt_overhead}};
}

}  // namespace

void to_json(Json& j, const BenchmarkReport& report) {
    Json runs = Json::array();
    for (const auto& r : report.runs) {
        runs.push_back(Json{{"query_id", r.query_id},
                            {"query", r.query},
                            {"intent", std::string(to_string(r.intent))},
                            {"repetition", r.repetition},
                            {"status", std::string(to_string(r.status))},
                            {"failure_reason", r.failure_reason ? Json(*r.failure_reason) : Json(nullptr)},
                            {"ledger", r.ledger},
                            {"ledger_total", r.ledger_total}});
    }
    Json naive = Json::array();
    for (const auto& n : report.naive) {
        naive.push_back(Json{{"query_id", n.query_id},
                             {"query", n.query},
                             {"naive_tokens", n.naive_tokens ? Json(*n.naive_tokens) : Json(nullptr)}});
    }
    j = Json{{"runs", std::move(runs)},
             {"naive", std::move(naive)},
             {"res_mean", report.res_mean},
             {"res_stddev", report.res_stddev},
             {"naive_mean", report.naive_mean},
             {"savings_fraction", report.savings_fraction},
             {"savings_flagged", report.savings_flagged},
             {"failed_count", report.failed_count},
             {"flagged_queries", report.flagged_queries},
             {"calibrated_model", model_json(report.calibrated_model)}};
}

void to_json(Json& j, const InvarianceReport& report) {
    Json entries = Json::array();
    for (const auto& e : report.entries) {
        entries.push_back(Json{{"n", e.n},
                               {"res_tokens", e.res_tokens},
                               {"res_tokens_stddev", e.res_tokens_stddev},
                               {"summary_tokens", e.summary_tokens},
                               {"executor_requests", e.executor_requests},
                               {"records_scanned", e.records_scanned},
                               {"naive_model_tokens", e.naive_model_tokens}});
    }
    j = Json{{"query", report.query},
             {"seed", report.seed},
             {"model", model_json(report.model)},
             {"entries", std::move(entries)},
             {"flatness_ratio", report.flatness_ratio}};
}

}  // namespace res::bench
