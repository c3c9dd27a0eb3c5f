// res: command-line front end for queries, benchmarks, invariance checks and
// the HTTP service. Defaults run fully offline (mock provider, local data).

#include "res/app/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

void add_backend_flags(CLI::App& cmd, res::app::Backend& backend) {
    cmd.add_option("--source", backend.source, "local or crossref")->capture_default_str();
    cmd.add_option("--provider", backend.provider, "mock or live")->capture_default_str();
    cmd.add_option("--seed", backend.seed, "synthetic corpus seed")->capture_default_str();
    cmd.add_option("--n", backend.n, "synthetic corpus size")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace res::app;

    CLI::App app{"Reasoner-Executor-Synthesizer scholarly search"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "KEY=VALUE file; environment variables take precedence");

    AskOptions ask;
    auto* ask_cmd = app.add_subcommand("ask", "answer one question");
    ask_cmd->add_option("question", ask.question, "natural-language question")->required();
    add_backend_flags(*ask_cmd, ask.backend);
    ask_cmd->add_flag("--show-layers", ask.show_layers, "print plan, summary and token ledger");
    ask_cmd->add_flag("--json", ask.json, "print the full run record as JSON");

    BenchOptions bench;
    bench.suite = default_data_dir() / "benchmark_suite.json";
    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark suite against the naive baseline");
    bench_cmd->add_option("--suite", bench.suite, "query suite JSON")->capture_default_str();
    bench_cmd->add_option("--runs", bench.runs, "runs per query")->capture_default_str();
    bench_cmd->add_option("--mode", bench.mode, "mock or live")->capture_default_str();
    bench_cmd->add_option("--out", bench.out_dir, "output directory")->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "synthetic corpus seed")->capture_default_str();
    bench_cmd->add_option("--n", bench.n, "synthetic corpus size")->capture_default_str();

    VerifyOptions verify;
    std::string sizes = "100,1000,10000,100000,1000000";
    std::string verify_out;
    auto* verify_cmd = app.add_subcommand("verify", "check that token cost is flat across dataset sizes");
    verify_cmd->add_option("--sizes", sizes, "comma-separated ascending sizes")->capture_default_str();
    verify_cmd->add_option("--seed", verify.seed, "synthetic corpus seed")->capture_default_str();
    verify_cmd->add_option("--query", verify.query, "fixed question")->capture_default_str();
    verify_cmd->add_option("--out", verify_out, "write report and figure CSVs here");

    std::optional<int> port;
    std::string store_dir;
    std::string static_dir;
    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
    serve_cmd->add_option("--port", port, "listen port (RES_PORT, default 8080)");
    std::string host;
    serve_cmd->add_option("--host", host, "listen address (RES_HOST)");
    serve_cmd->add_option("--store-dir", store_dir, "run store directory (RES_STORE_DIR)");
    serve_cmd->add_option("--static-dir", static_dir, "built web UI to serve at / (RES_STATIC_DIR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Lookup lookup = env_lookup();
    res::service::ServiceConfig config;
    try {
        if (!config_file.empty()) lookup = layered_lookup(lookup, load_config_file(config_file));
        config = service_config(lookup);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto apply_config = [&](Backend& backend) {
        backend.provider_config.model_id = config.provider.model_id;
        backend.provider_config.api_key_ref = config.provider.api_key_ref;
        backend.provider_config.endpoint = config.provider.endpoint;
        backend.crossref_mailto = config.crossref_mailto;
        backend.fixtures = config.fixtures;
    };

    if (*ask_cmd) {
        apply_config(ask.backend);
        return cmd_ask(ask, std::cout, std::cerr);
    }
    if (*bench_cmd) {
        apply_config(bench.backend);
        return cmd_bench(bench, std::cout, std::cerr);
    }
    if (*verify_cmd) {
        try {
            verify.sizes = parse_sizes(sizes);
        } catch (const std::exception& e) {
            std::cerr << "invalid --sizes: " << e.what() << '\n';
            return kExitUsage;
        }
        if (!verify_out.empty()) verify.out_dir = verify_out;
        return cmd_verify(verify, std::cout, std::cerr);
    }

    ServeOptions serve;
    serve.config = config;
    if (port) serve.config.port = *port;
    if (!host.empty()) serve.config.host = host;
    if (!store_dir.empty()) serve.config.store_dir = store_dir;
    if (!static_dir.empty()) serve.config.static_dir = static_dir;
    return cmd_serve(serve, std::cout, std::cerr);
}
