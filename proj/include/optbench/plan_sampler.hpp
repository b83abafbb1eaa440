#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "optbench/core.hpp"
#include "optbench/rng.hpp"

namespace optbench {

/// Parameters of the proportion-estimation sample size
///
///     n = Z^2 p (1 - p) / e^2
///
/// with the Cochran finite-population correction when the plan-space
/// size is known and small.
struct SamplingConfig {
    double confidence_z = 1.96;  // Z for 95%
    double precision = 0.05;     // e, the sampling error
    double prior = 0.5;          // p, worst case when unknown
    std::optional<std::int64_t> population;  // N
};

/// Empty = valid.
std::vector<std::string> validate_sampling_config(const SamplingConfig& c);

/// ceil(Z^2 p (1-p) / e^2), then n' = ceil(n / (1 + (n-1)/N)) when a
/// population size is given. Always >= 1. Throws std::invalid_argument
/// on an invalid config.
std::int64_t required_sample_size(const SamplingConfig& c);

struct PlanSample {
    std::vector<PhysicalPlan> plans;
    std::uint64_t seed = 0;
    SamplingConfig config;
};

/// Expands a join ordering into a random physical plan: cross join
/// where no predicate connects the two sides, otherwise a uniformly
/// random supported join algorithm; each leaf picks uniformly among
/// sequential scan and its applicable indexes (when the backend scans
/// indexes at all). Tree walk and stream consumption are preorder.
PhysicalPlan randomize_physical(const JoinTree& t, const JoinGraph& g,
                                const BackendCapabilities& caps, const Catalog& cat, Rng& rng);

/// required_sample_size(c) independent draws, with replacement over the
/// plan space. Duplicates are retained: the estimator is a binomial
/// proportion and deduplication would bias it.
PlanSample sample_plans(const JoinGraph& g, const SamplingConfig& c,
                        const BackendCapabilities& caps, const Catalog& cat, std::uint64_t seed);

}  // namespace optbench
