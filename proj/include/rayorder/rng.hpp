#pragma once

#include <cstdint>

namespace rayorder {

// Counter-based RNG: every draw is a pure hash of (seed, stream ids, counter),
// so results do not depend on call order, thread count, or platform.

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t rng_key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    uint64_t k = mix64(seed);
    k = mix64(k ^ a);
    k = mix64(k ^ b);
    k = mix64(k ^ c);
    k = mix64(k ^ d);
    return k;
}

inline uint64_t rng_u64(uint64_t key, uint64_t counter) {
    return mix64(key + counter * 0x9e3779b97f4a7c15ull);
}

/// Uniform double in [0,1).
inline double rng_double(uint64_t key, uint64_t counter) {
    return double(rng_u64(key, counter) >> 11) * 0x1.0p-53;
}

inline float rng_float(uint64_t key, uint64_t counter) {
    return float(rng_double(key, counter));
}

/// Draw purposes for the render pipeline, used as rng stream ids.
enum RngStream : uint64_t {
    kStreamScene = 1,
    kStreamCameraJitter = 2,
    kStreamLightSample = 3,
    kStreamScatter = 4,
    kStreamWorkload = 5,
};

} // namespace rayorder
