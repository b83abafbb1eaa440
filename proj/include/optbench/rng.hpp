#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace optbench {

/// Seeded random stream. Thin wrapper over mt19937_64 that remembers its
/// seed and provides distribution helpers with a fixed, portable mapping
/// from engine output to values (std:: distributions are implementation
/// defined, which would break cross-platform reproducibility of reports).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1): top 53 bits of the engine output.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling on a power-of-two
    /// mask, so every value is exactly equally likely.
    std::uint64_t next_below(std::uint64_t n);

    /// Fisher-Yates shuffle driven by next_below.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Deterministic per-task seed derivation (splitmix64 of base ^ index).
/// Used to give each query in a suite its own independent stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace optbench
