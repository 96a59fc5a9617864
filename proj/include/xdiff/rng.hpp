#pragma once
#include <cstdint>

namespace xdiff {

// Counter-based SplitMix64 stream. out(i) equals the i-th output of the
// sequential SplitMix64 generator seeded with `seed`, so any index can be
// drawn independently and streams can be split by deriving sub-seeds.
// Test vectors (seed 0): at(0)=0xE220A8397B1DCDAF, at(1)=0x6E789E6AA1B965F4,
// at(2)=0x06C45D188009454F.
struct CounterRng {
    std::uint64_t seed = 0;

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t at(std::uint64_t i) const { return mix(seed + (i + 1) * kGamma); }

    // Uniform double in [0,1) from the top 53 bits.
    double uniform(std::uint64_t i) const { return (at(i) >> 11) * 0x1.0p-53; }

    // Independent sub-stream; tag values identify the purpose.
    CounterRng split(std::uint64_t tag) const {
        return CounterRng{mix(seed ^ (tag * 0xD1B54A32D192ED03ULL) ^ kGamma)};
    }
};

}  // namespace xdiff
