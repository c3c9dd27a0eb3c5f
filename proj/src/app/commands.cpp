#include "res/app/app.hpp"

#include "res/bench/bench.hpp"
#include "res/core/tokens.hpp"
#include "res/datasources/crossref.hpp"
#include "res/datasources/synthetic.hpp"
#include "res/llm/live_provider.hpp"
#include "res/llm/mock_provider.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include <pthread.h>

namespace res::app {

namespace {

constexpr std::uint64_t kProjectionSizes[] = {42'453, 16'273'710};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::unique_ptr<llm::LlmProvider> make_provider(const Backend& backend) {
    if (backend.provider == "mock") {
        std::vector<llm::Fixture> fixtures;
        if (backend.fixtures) {
            try {
                fixtures = llm::load_fixtures(*backend.fixtures);
            } catch (const std::exception& e) {
                throw UsageError(std::string("cannot load fixtures: ") + e.what());
            }
        }
        return pipeline::make_mock_provider(std::move(fixtures));
    }
    if (backend.provider == "live") {
        auto cfg = backend.provider_config;
        cfg.kind = llm::ProviderKind::Live;
        try {
            return std::make_unique<llm::LiveProvider>(cfg);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("live provider is not configured: ") + e.what());
        }
    }
    throw UsageError("unknown provider: " + backend.provider + " (expected mock or live)");
}

std::unique_ptr<datasources::DataSource> make_source(const Backend& backend) {
    if (backend.source == "local") {
        if (backend.n == 0 || backend.n > datasources::kMaxSyntheticRecords) {
            throw UsageError("--n must lie in 1..10000000");
        }
        return std::make_unique<datasources::SyntheticSource>(backend.seed, backend.n);
    }
    if (backend.source == "crossref") {
        datasources::CrossrefConfig cfg;
        cfg.mailto = backend.crossref_mailto;
        return std::make_unique<datasources::CrossrefSource>(cfg);
    }
    throw UsageError("unknown source: " + backend.source + " (expected local or crossref)");
}

void print_ledger(std::ostream& out, const RunLedger& ledger) {
    const auto row = [&](const char* name, const TokenUsage& u) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-12s in %7llu  out %7llu\n", name,
                      static_cast<unsigned long long>(u.input_tokens), static_cast<unsigned long long>(u.output_tokens));
        out << buf;
    };
    row("reasoner", ledger.reasoner);
    row("executor", ledger.executor);
    row("synthesizer", ledger.synthesizer);
    out << "  total        " << ledger_total(ledger) << '\n';
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << value.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int cmd_ask(const AskOptions& options, std::ostream& out, std::ostream& err) {
    std::optional<UserQuery> query;
    try {
        query = UserQuery::make(options.question);
    } catch (const std::invalid_argument& e) {
        err << "usage: ask QUESTION: " << e.what() << '\n';
        return kExitUsage;
    }

    std::unique_ptr<llm::LlmProvider> provider;
    std::unique_ptr<datasources::DataSource> source;
    try {
        provider = make_provider(options.backend);
        source = make_source(options.backend);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    const auto record = pipeline::run_pipeline(*query, *source, *provider);

    if (options.json) {
        out << Json(record).dump(2) << '\n';
    } else if (options.show_layers) {
        out << "== reasoner: plan ==\n" << (record.plan ? Json(*record.plan).dump(2) : "null") << '\n';
        if (record.summary) {
            out << "== executor: summary (" << estimate_tokens(serialize_canonical(*record.summary))
                << " tokens) ==\n"
                << Json(*record.summary).dump(2) << '\n';
        }
        if (record.narrative) out << "== synthesizer: narrative ==\n" << record.narrative->text << '\n';
        out << "== ledger ==\n";
        print_ledger(out, record.ledger);
    } else if (record.narrative) {
        out << record.narrative->text << '\n';
    }

    if (record.status != RunStatus::Completed) {
        err << "run failed: " << record.failure_reason.value_or("unknown") << '\n';
        return kExitAssertion;
    }
    return kExitOk;
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    std::vector<bench::SuiteQuery> suite;
    if (!std::filesystem::is_regular_file(options.suite)) {
        err << "suite file not found: " << options.suite.string() << '\n';
        return kExitUsage;
    }
    try {
        suite = bench::load_suite(options.suite);
    } catch (const std::exception& e) {
        err << "invalid suite: " << e.what() << '\n';
        return kExitUsage;
    }
    if (options.runs < 1) {
        err << "--runs must be at least 1\n";
        return kExitUsage;
    }
    if (options.mode != "mock" && options.mode != "live") {
        err << "--mode must be mock or live\n";
        return kExitUsage;
    }

    Backend backend = options.backend;
    backend.seed = options.seed;
    backend.n = options.n;
    backend.provider = options.mode;
    backend.source = options.mode == "live" ? "crossref" : "local";

    std::unique_ptr<llm::LlmProvider> provider;
    std::unique_ptr<datasources::DataSource> source;
    try {
        provider = make_provider(backend);
        source = make_source(backend);
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    // Naive contexts are drawn from a synthetic pool in both modes.
    const datasources::SyntheticSource pool(options.seed, std::max<std::uint64_t>(options.naive_records * 40, 2'000));

    bench::BenchmarkOptions bopts;
    bopts.runs_per_query = options.runs;
    bopts.naive_records = options.naive_records;
    const auto report = bench::run_benchmark(suite, bopts, *source, *provider, pool.records(), *provider);

    const std::vector<std::uint64_t> sizes{100, 1'000, 10'000, 100'000, 1'000'000};
    bench::InvarianceOptions iopts;
    iopts.seed = options.seed;
    const auto invariance = bench::verify_invariance(sizes, iopts);

    try {
        std::filesystem::create_directories(options.out_dir);
        write_json_file(options.out_dir / "bench_report.json", Json(report));
        write_json_file(options.out_dir / "invariance_report.json", Json(invariance));
        bench::export_figure_data(options.out_dir, &report, &invariance, kProjectionSizes);
    } catch (const std::exception& e) {
        err << "cannot write results: " << e.what() << '\n';
        return kExitUsage;
    }

    char line[256];
    std::snprintf(line, sizeof line,
                  "runs %zu  completed %zu  failed %llu\nres mean %.1f  sd %.1f  naive mean %.1f  savings %.1f%%%s\n",
                  report.runs.size(), report.runs.size() - static_cast<std::size_t>(report.failed_count),
                  static_cast<unsigned long long>(report.failed_count), report.res_mean, report.res_stddev,
                  report.naive_mean, report.savings_fraction * 100.0, report.savings_flagged ? " (negative)" : "");
    out << line;
    for (const auto& id : report.flagged_queries) out << "flagged query (all runs failed): " << id << '\n';
    out << "results written to " << options.out_dir.string() << '\n';

    bool executor_clean = true;
    for (const auto& run : report.runs) {
        if (run.status == RunStatus::Completed && run.ledger.executor.total() != 0) executor_clean = false;
    }
    if (!executor_clean) {
        err << "executor reported model tokens\n";
        return kExitAssertion;
    }
    if (report.failed_count == report.runs.size()) {
        err << "every run failed\n";
        return kExitAssertion;
    }
    return kExitOk;
}

std::vector<std::uint64_t> parse_sizes(std::string_view text) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (item.empty()) throw std::invalid_argument("empty size in list");
        std::uint64_t value = 0;
        const auto e = item.find_first_of("eE");
        const auto digits = [&](const std::string& s) {
            if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 18) {
                throw std::invalid_argument("not a size: " + item);
            }
            return std::stoull(s);
        };
        if (e == std::string::npos) {
            value = digits(item);
        } else {
            value = digits(item.substr(0, e));
            const auto exp = digits(item.substr(e + 1));
            if (exp > 18) throw std::invalid_argument("size too large: " + item);
            for (std::uint64_t i = 0; i < exp; ++i) value *= 10;
        }
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    bench::InvarianceOptions iopts;
    iopts.query = options.query;
    iopts.seed = options.seed;
    iopts.execute = options.execute;

    bench::InvarianceReport report;
    try {
        report = bench::verify_invariance(options.sizes, iopts);
    } catch (const std::invalid_argument& e) {
        err << "invalid sizes: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "verification run failed: " << e.what() << '\n';
        return kExitAssertion;
    }

    char line[256];
    std::snprintf(line, sizeof line, "%10s %11s %20s %18s %16s\n", "n", "res_tokens", "naive_model_tokens",
                  "executor_requests", "records_scanned");
    out << line;
    for (const auto& e : report.entries) {
        std::snprintf(line, sizeof line, "%10llu %11llu %20.0f %18llu %16llu\n", static_cast<unsigned long long>(e.n),
                      static_cast<unsigned long long>(e.res_tokens), e.naive_model_tokens,
                      static_cast<unsigned long long>(e.executor_requests),
                      static_cast<unsigned long long>(e.records_scanned));
        out << line;
    }
    std::snprintf(line, sizeof line, "flatness_ratio %.4f (tolerance %.2f)\n", report.flatness_ratio,
                  bench::kFlatnessTolerance);
    out << line;

    if (options.out_dir) {
        try {
            std::filesystem::create_directories(*options.out_dir);
            write_json_file(*options.out_dir / "invariance_report.json", Json(report));
            bench::export_figure_data(*options.out_dir, nullptr, &report, kProjectionSizes);
        } catch (const std::exception& e) {
            err << "cannot write results: " << e.what() << '\n';
            return kExitUsage;
        }
    }

    if (report.flatness_ratio > bench::kFlatnessTolerance) {
        err << "token totals are not flat across dataset sizes\n";
        return kExitAssertion;
    }
    return kExitOk;
}

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err) {
    if (options.config.port < 0 || options.config.port > 65535) {
        err << "invalid port " << options.config.port << '\n';
        return kExitUsage;
    }

    // Signals are taken synchronously by this thread; the server threads
    // inherit the blocked mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);

    int code = kExitOk;
    try {
        service::Service svc(options.config);
        if (!svc.bind()) {
            err << "cannot listen on " << options.config.host << ':' << options.config.port << '\n';
            code = kExitUsage;
        } else {
            std::thread server([&] { svc.serve(); });
            out << "listening on http://" << options.config.host << ':' << svc.port() << std::endl;
            if (options.on_ready) options.on_ready(svc.port());

            const timespec tick{0, 200'000'000};
            while (!(options.stop && options.stop->load())) {
                const int sig = sigtimedwait(&signals, nullptr, &tick);
                if (sig == SIGINT || sig == SIGTERM) break;
            }
            svc.stop();
            server.join();
            out << "stopped; " << svc.store().size() << " runs in " << svc.store().directory().string() << std::endl;
        }
    } catch (const std::exception& e) {
        err << "service error: " << e.what() << '\n';
        code = kExitUsage;
    }

    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    return code;
}

}  // namespace res::app
