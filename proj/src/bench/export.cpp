#include "res/bench/bench.hpp"

#include "res/core/stats.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace res::bench {

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string num(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void export_figure_data(const std::filesystem::path& dir, const BenchmarkReport* bench,
                        const InvarianceReport* invariance, std::span<const std::uint64_t> projection_sizes) {
    std::filesystem::create_directories(dir);

    {
        const auto path = dir / "fig2_invariance.csv";
        auto out = open_csv(path, "n,res_tokens,stddev");
        if (invariance) {
            for (const auto& e : invariance->entries) {
                out << e.n << ',' << e.res_tokens << ',' << num(e.res_tokens_stddev) << '\n';
            }
        }
        finish(out, path);
    }

    {
        const auto path = dir / "fig3_scaling.csv";
        auto out = open_csv(path, "n,res_tokens,naive_model_tokens,measured");
        std::optional<NaiveCostModel> model;
        std::optional<double> res_level;
        if (invariance) {
            model = invariance->model;
            for (const auto& e : invariance->entries) {
                out << e.n << ',' << e.res_tokens << ',' << num(e.naive_model_tokens) << ",1\n";
            }
            if (!invariance->entries.empty()) {
                double sum = 0.0;
                for (const auto& e : invariance->entries) sum += static_cast<double>(e.res_tokens);
                res_level = sum / static_cast<double>(invariance->entries.size());
            }
        } else if (bench && bench->naive_mean > 0.0) {
            model = bench->calibrated_model;
            res_level = bench->res_mean;
        }
        if (model && res_level) {
            for (const auto n : projection_sizes) {
                out << n << ',' << num(*res_level) << ',' << num(naive_cost(n, *model)) << ",0\n";
            }
        }
        finish(out, path);
    }

    {
        const auto path = dir / "fig4_per_query.csv";
        auto out = open_csv(path, "query_id,query,res_mean_tokens,naive_tokens");
        if (bench) {
            std::map<std::string, std::vector<std::uint64_t>> per_query;
            for (const auto& r : bench->runs) {
                if (r.status == RunStatus::Completed) per_query[r.query_id].push_back(r.ledger_total);
            }
            for (const auto& n : bench->naive) {
                const auto it = per_query.find(n.query_id);
                out << csv_field(n.query_id) << ',' << csv_field(n.query) << ','
                    << (it == per_query.end() ? std::string() : num(summary_stats(it->second).mean)) << ','
                    << (n.naive_tokens ? std::to_string(*n.naive_tokens) : std::string()) << '\n';
            }
        }
        finish(out, path);
    }

    {
        const auto path = dir / "fig5_histogram.csv";
        auto out = open_csv(path, "query_id,repetition,ledger_total");
        if (bench) {
            for (const auto& r : bench->runs) {
                if (r.status != RunStatus::Completed) continue;
                out << csv_field(r.query_id) << ',' << r.repetition << ',' << r.ledger_total << '\n';
            }
        }
        finish(out, path);
    }

    {
        const auto path = dir / "fig6_layers.csv";
        auto out = open_csv(path, "layer,mean_tokens");
        if (bench) {
            std::vector<std::uint64_t> reasoner, executor, synthesizer;
            for (const auto& r : bench->runs) {
                if (r.status != RunStatus::Completed) continue;
                reasoner.push_back(r.ledger.reasoner.total());
                executor.push_back(r.ledger.executor.total());
                synthesizer.push_back(r.ledger.synthesizer.total());
            }
            if (!reasoner.empty()) {
                out << "reasoner," << num(summary_stats(reasoner).mean) << '\n';
                out << "executor," << num(summary_stats(executor).mean) << '\n';
                out << "synthesizer," << num(summary_stats(synthesizer).mean) << '\n';
            }
        }
        finish(out, path);
    }
}

}  // namespace res::bench
