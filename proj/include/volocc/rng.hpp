#pragma once

#include <cstdint>
#include <random>

namespace volocc {

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-replica seed: base seed and replica index mixed through SplitMix64 so
// streams do not depend on worker scheduling.
inline std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) {
    return splitmix64(base_seed ^ splitmix64(replica + 1));
}

inline std::mt19937_64 replica_engine(std::uint64_t base_seed, std::uint64_t replica) {
    return std::mt19937_64(replica_seed(base_seed, replica));
}

}  // namespace volocc
