#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ajk {

/// Identifier recorded in reports so that a run can be replayed bit-for-bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-substreams/v1";

/// Seed of the named substream of a master seed (FNV-1a of the name mixed
/// through SplitMix64). Independent streams keep results unchanged when
/// work is split across threads.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

/// Reproducible generator. The conversions to uniform and normal variates
/// are implemented here rather than through <random> distributions, whose
/// output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound >= 1, without modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal (Marsaglia polar method).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ajk
