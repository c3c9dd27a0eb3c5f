#pragma once

#include "res/core/types.hpp"
#include "res/llm/provider.hpp"

#include <cstdint>
#include <optional>
#include <string>

// Layer 3. Every entry point takes a StatisticalSummary and nothing else
// derived from the data.
namespace res::synthesizer {

/// Fixed system prompt of the Synthesizer (the constant prompt overhead of
/// the synthesis call).
const std::string& system_prompt();

/// line for trends, grouped_bar for comparisons with yearly series and bar
/// otherwise; no chart for an empty summary.
std::optional<ChartConfig> build_chart_config(const StatisticalSummary& summary);

/// Deterministic prose. Every number in the text is a value carried by the
/// summary, except labelled derived figures: percentage changes ("+50.0%")
/// and ratios ("3.0×"), both one decimal, rounded half away from zero.
Narrative template_narrative(const StatisticalSummary& summary);

// "+50.0%"; empty when first is zero.
std::string format_percent_change(std::uint64_t first, std::uint64_t last);
// "3.0×"; requires a non-zero denominator.
std::string format_ratio(std::uint64_t numerator, std::uint64_t denominator);

/// system prompt + canonical summary; nothing else.
llm::PromptSpec build_synthesizer_prompt(const StatisticalSummary& summary);

struct Synthesis {
    Narrative narrative;
    TokenUsage usage;
};

/// Sends build_synthesizer_prompt() to the provider. The provider writes the
/// prose; the chart always comes from build_chart_config(). An empty reply
/// is a provider error.
Synthesis synthesize(const StatisticalSummary& summary, llm::LlmProvider& provider);

}  // namespace res::synthesizer
