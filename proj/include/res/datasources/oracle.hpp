#pragma once

#include "res/core/types.hpp"
#include "res/datasources/synthetic.hpp"

#include <span>

namespace res::datasources {

/// Reference aggregation over raw synthetic records by direct scans and
/// group-bys over labels, kept independent of the Executor and of
/// SyntheticSource. Output is the untruncated aggregate; compare it with
/// the Executor after applying the size contract.
StatisticalSummary brute_force_aggregate(std::span<const SyntheticRecord> records, const QueryPlan& plan);

}  // namespace res::datasources
