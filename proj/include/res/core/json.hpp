#pragma once

#include "res/core/types.hpp"

#include <json.hpp>

#include <string>

namespace res {

using Json = nlohmann::json;

void to_json(Json& j, const YearRange& r);
void to_json(Json& j, const QueryPlan& plan);
void to_json(Json& j, const DataPoint& p);
void to_json(Json& j, const Series& s);
void to_json(Json& j, const SummaryMetadata& m);
void to_json(Json& j, const StatisticalSummary& s);
void to_json(Json& j, const ChartConfig& c);
void to_json(Json& j, const Narrative& n);
void to_json(Json& j, const TokenUsage& u);
void to_json(Json& j, const RunLedger& l);
void to_json(Json& j, const RunRecord& r);

// Readers validate shape and throw std::invalid_argument on mismatch. Plan
// readers do not apply defaults or invariant checks; see the reasoner.
QueryPlan plan_from_json(const Json& j);
StatisticalSummary summary_from_json(const Json& j);
Narrative narrative_from_json(const Json& j);
TokenUsage usage_from_json(const Json& j);
RunLedger ledger_from_json(const Json& j);
RunRecord run_record_from_json(const Json& j);

/// Lexicographic keys, no insignificant whitespace, UTF-8. This byte string
/// is what the size contract measures and what the Synthesizer receives.
std::string serialize_canonical(const StatisticalSummary& summary);

std::string serialize_plan(const QueryPlan& plan);

}  // namespace res
