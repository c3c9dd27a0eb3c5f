#pragma once

#include "res/core/types.hpp"
#include "res/datasources/source.hpp"

// Layer 2. Deterministic code only: this module has no dependency on any
// language-model component.
namespace res::executor {

/// Runs the per-intent aggregation strategy against the source and returns a
/// summary that already satisfies the size contract.
///
///   Trend       one yearly series per subject over the plan range (latest
///               50 years when longer); totals are range counts
///   Comparison  totals per subject; yearly series as well when a range is set
///   Ranking     totals per subject; one series of the top_n facet buckets
///               of the first subject along rank_dimension
///   Statistics  totals per subject; one work-type facet series for the
///               first subject
///
/// Facet series with no buckets are omitted. Zero totals are kept.
StatisticalSummary execute(const QueryPlan& plan, const datasources::DataSource& source);

/// Caps the summary so that its canonical form estimates to at most
/// kSummaryTokenBudget tokens: at most 5 series and 5 totals, labels cut to
/// 80 characters, time series keep their most recent 50 points, bucket
/// series keep their top buckets (at most top_n for rankings). If still over
/// budget, points are dropped one at a time from the longest series (oldest
/// year or lowest bucket first), then empty series are dropped. Idempotent.
StatisticalSummary enforce_size_contract(StatisticalSummary summary);

}  // namespace res::executor
