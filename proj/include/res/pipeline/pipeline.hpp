#pragma once

#include "res/core/events.hpp"
#include "res/core/types.hpp"
#include "res/datasources/source.hpp"
#include "res/llm/mock_provider.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace res::pipeline {

using ExecuteFn = std::function<StatisticalSummary(const QueryPlan&, const datasources::DataSource&)>;

struct PipelineOptions {
    std::string run_id;   // generated when empty
    EventSink on_event;   // receives the lifecycle events in order
    ExecuteFn execute;    // executor::execute when empty
};

/// Reasoner -> Executor -> Synthesizer, strictly in sequence. The
/// Synthesizer is handed the StatisticalSummary and nothing else. Never
/// throws for layer failures: the record comes back with status failed and
/// failure_reason plan_invalid, source_error or provider_error.
RunRecord run_pipeline(const UserQuery& query, const datasources::DataSource& source, llm::LlmProvider& provider,
                       const PipelineOptions& options = {});

std::string new_run_id();

/// Deterministic answers for prompts no fixture matched: Reasoner prompts
/// get the rule-based plan (or "{}" when the grammar rejects the question),
/// Synthesizer prompts get the template narrative of the summary they carry,
/// anything else a fixed acknowledgement.
std::string deterministic_fallback(const llm::PromptSpec& prompt);

std::unique_ptr<llm::MockProvider> make_mock_provider(std::vector<llm::Fixture> fixtures = {});

}  // namespace res::pipeline
