#pragma once

#include <cstdint>
#include <limits>

namespace nnad {

/**
 * Counter-based 64-bit generator: SplitMix64 output function applied to
 * `seed + counter * 0x9E3779B97F4A7C15` (Steele, Lea & Flood, 2014).
 *
 * The i-th output is a pure function of (seed, i), so streams are
 * reproducible on every platform and can be split by deriving new seeds.
 * Algorithm id recorded in outputs: "splitmix64-counter/1".
 */
class Rng {
public:
    using result_type = std::uint64_t;

    static constexpr const char* algorithm = "splitmix64-counter/1";

    explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return at(counter_++); }

    /// Output number `i` of this stream without advancing it.
    result_type at(std::uint64_t i) const noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;

    /// Independent stream for sub-task `index` (trial, replicate, ...).
    Rng split(std::uint64_t index) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace nnad
