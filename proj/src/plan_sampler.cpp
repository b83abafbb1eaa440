#include "optbench/plan_sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "optbench/tree_sampler.hpp"

namespace optbench {

std::vector<std::string> validate_sampling_config(const SamplingConfig& c) {
    std::vector<std::string> out;
    if (!(c.precision > 0)) out.push_back("precision must be > 0");
    if (!(c.confidence_z > 0)) out.push_back("confidence_z must be > 0");
    if (!(c.prior > 0 && c.prior < 1)) out.push_back("prior must lie in (0, 1)");
    if (c.population && *c.population < 1) out.push_back("population must be >= 1");
    return out;
}

namespace {

// ceil that forgives values a hair above an integer (0.25/0.0025 style
// quotients are not exact in binary).
std::int64_t ceil_tolerant(double v) {
    double nearest = std::nearbyint(v);
    if (std::abs(v - nearest) < 1e-9) return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace

std::int64_t required_sample_size(const SamplingConfig& c) {
    auto violations = validate_sampling_config(c);
    if (!violations.empty()) throw std::invalid_argument("sampling config: " + violations.front());
    double raw = c.confidence_z * c.confidence_z * c.prior * (1.0 - c.prior) /
                 (c.precision * c.precision);
    std::int64_t n = std::max<std::int64_t>(1, ceil_tolerant(raw));
    if (c.population) {
        auto N = static_cast<double>(*c.population);
        double corrected = static_cast<double>(n) / (1.0 + static_cast<double>(n - 1) / N);
        n = std::max<std::int64_t>(1, ceil_tolerant(corrected));
    }
    return n;
}

PhysicalPlan randomize_physical(const JoinTree& t, const JoinGraph& g,
                                const BackendCapabilities& caps, const Catalog& cat, Rng& rng) {
    PhysicalPlan p = plan_skeleton(t, g);
    std::vector<std::string> algorithms(caps.join_algorithms.begin(), caps.join_algorithms.end());
    if (algorithms.empty()) throw std::invalid_argument("randomize_physical: no join algorithm");

    for (auto& n : p.nodes) {
        if (n.is_leaf()) {
            if (!caps.supports_index_scan) continue;
            auto indexes = applicable_indexes(g, cat, *g.find_ref(n.table));
            if (indexes.empty()) continue;
            // Slot 0 is the sequential scan.
            auto pick = rng.next_below(indexes.size() + 1);
            if (pick > 0) n.access.index = indexes[pick - 1].name;
        } else if (n.algorithm != kCrossJoin) {
            n.algorithm = algorithms[rng.next_below(algorithms.size())];
        }
    }
    return p;
}

PlanSample sample_plans(const JoinGraph& g, const SamplingConfig& c,
                        const BackendCapabilities& caps, const Catalog& cat, std::uint64_t seed) {
    std::int64_t count = required_sample_size(c);
    PlanSample sample;
    sample.seed = seed;
    sample.config = c;
    sample.plans.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    for (std::int64_t i = 0; i < count; ++i) {
        JoinTree ordering = sample_join_ordering(g, rng);
        sample.plans.push_back(randomize_physical(ordering, g, caps, cat, rng));
    }
    return sample;
}

}  // namespace optbench
