#include "res/pipeline/pipeline.hpp"

#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/core/tokens.hpp"
#include "res/executor/executor.hpp"
#include "res/reasoner/reasoner.hpp"
#include "res/synthesizer/synthesizer.hpp"

#include <cstdio>
#include <random>

namespace res::pipeline {

namespace {

class Lifecycle {
public:
    Lifecycle(std::string run_id, const EventSink& sink) : run_id_(std::move(run_id)), sink_(sink) {}

    void emit(LayerEventKind kind, Json payload) const {
        if (!sink_) return;
        sink_(LayerEvent{run_id_, kind, std::move(payload), now_utc()});
    }

private:
    std::string run_id_;
    const EventSink& sink_;
};

}  // namespace

std::string new_run_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
}

RunRecord run_pipeline(const UserQuery& query, const datasources::DataSource& source, llm::LlmProvider& provider,
                       const PipelineOptions& options) {
    RunRecord record;
    record.run_id = options.run_id.empty() ? new_run_id() : options.run_id;
    record.query = query.text();
    record.started_at = now_utc();
    const Lifecycle events(record.run_id, options.on_event);

    const auto finish_failed = [&](ErrorKind kind, const std::string& detail) {
        record.status = RunStatus::Failed;
        record.failure_reason = std::string(to_string(kind));
        record.finished_at = now_utc();
        events.emit(LayerEventKind::RunFailed, Json{{"failure_reason", *record.failure_reason}, {"detail", detail}});
        return record;
    };

    // Layer 1
    events.emit(LayerEventKind::ReasonerStarted, Json{{"query", query.text()}});
    try {
        auto parsed = reasoner::parse_query(query, provider);
        record.plan = std::move(parsed.plan);
        record.ledger.reasoner = parsed.usage;
    } catch (const Error& e) {
        return finish_failed(e.kind(), e.what());
    } catch (const std::exception& e) {
        return finish_failed(ErrorKind::ProviderError, e.what());
    }
    events.emit(LayerEventKind::ReasonerCompleted, Json{{"plan", *record.plan}, {"usage", record.ledger.reasoner}});

    // Layer 2: no provider in reach.
    events.emit(LayerEventKind::ExecutorStarted, Json{{"plan", *record.plan}});
    try {
        record.summary = options.execute ? options.execute(*record.plan, source) : executor::execute(*record.plan, source);
    } catch (const std::exception& e) {
        return finish_failed(ErrorKind::SourceError, e.what());
    }
    const auto canonical = serialize_canonical(*record.summary);
    events.emit(LayerEventKind::ExecutorCompleted, Json{{"summary", *record.summary},
                                                        {"summary_tokens", estimate_tokens(canonical)},
                                                        {"usage", record.ledger.executor}});

    // Layer 3: sees the summary only.
    events.emit(LayerEventKind::SynthesizerStarted,
                Json{{"system_prompt_tokens", estimate_tokens(synthesizer::system_prompt())},
                     {"summary_tokens", estimate_tokens(canonical)}});
    try {
        auto synthesis = synthesizer::synthesize(*record.summary, provider);
        record.narrative = std::move(synthesis.narrative);
        record.ledger.synthesizer = synthesis.usage;
    } catch (const Error& e) {
        return finish_failed(e.kind() == ErrorKind::PlanInvalid ? ErrorKind::ProviderError : e.kind(), e.what());
    } catch (const std::exception& e) {
        return finish_failed(ErrorKind::ProviderError, e.what());
    }
    events.emit(LayerEventKind::SynthesizerCompleted,
                Json{{"narrative", *record.narrative}, {"usage", record.ledger.synthesizer}});

    record.status = RunStatus::Completed;
    record.finished_at = now_utc();
    events.emit(LayerEventKind::RunCompleted, Json{{"ledger", record.ledger}});
    return record;
}

std::string deterministic_fallback(const llm::PromptSpec& prompt) {
    if (prompt.system_prompt == reasoner::system_prompt()) {
        auto text = reasoner::query_from_prompt(prompt.user_content);
        if (!text) return "{}";
        try {
            return serialize_plan(reasoner::rule_based_parse(UserQuery::make(*text)));
        } catch (const std::exception&) {
            return "{}";
        }
    }
    if (prompt.system_prompt == synthesizer::system_prompt()) {
        try {
            return synthesizer::template_narrative(summary_from_json(Json::parse(prompt.user_content))).text;
        } catch (const std::exception&) {
            return "";
        }
    }
    return "Answer drafted from the supplied records.";
}

std::unique_ptr<llm::MockProvider> make_mock_provider(std::vector<llm::Fixture> fixtures) {
    return std::make_unique<llm::MockProvider>(std::move(fixtures), &deterministic_fallback);
}

}  // namespace res::pipeline
