#pragma once

#include <cstdint>
#include <random>

namespace masim {

// Portable seeded generator: MT19937-64 (bit-exact across standard libraries)
// with our own double conversion, since std:: distributions are
// implementation-defined. Independent streams are derived from one seed by
// mixing the stream index with SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(seed, stream)) {}

    // Uniform double in [0, 1) built from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return engine_(); }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

inline constexpr const char* kRngAlgorithm =
    "mt19937_64 seeded by splitmix64(seed + 0x9E3779B97F4A7C15*(stream+1)); "
    "uniform = (u64 >> 11) * 2^-53";

}  // namespace masim
