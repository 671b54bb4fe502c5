#pragma once

#include <cstdint>
#include <random>

namespace snmf {

/// Seeded uniform sampler with a pinned algorithm ("mt19937_64-u53"):
/// mt19937_64 output mapped to [0, 1) through the top 53 bits. The mapping is
/// fixed here rather than delegated to std::uniform_real_distribution, whose
/// output is implementation-defined; runs must reproduce across platforms.
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1).
    double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double next(double lo, double hi) { return lo + next() * (hi - lo); }

    /// Uniform integer on [lo, hi], inclusive. For test-instance generation.
    std::uint64_t next_index(std::uint64_t lo, std::uint64_t hi) {
        return lo + gen_() % (hi - lo + 1);
    }

    static constexpr const char* algorithm_id() { return "mt19937_64-u53"; }

private:
    std::mt19937_64 gen_;
};

}  // namespace snmf
