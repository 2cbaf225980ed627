#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "rayorder/geom.hpp"

namespace rayorder {

struct OctaUV {
    float u = 0.0f, v = 0.0f;
};

namespace detail {
// sign with sign(0) = +1, also for negative zero
inline float sign_pos(float x) { return x >= 0.0f ? 1.0f : -1.0f; }
} // namespace detail

/// Octahedral map of a unit direction onto [0,1]^2. The lower hemisphere is
/// folded over the diagonals so the whole sphere is covered.
inline OctaUV octahedron_encode(const Vec3& d) {
    float l1 = std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
    if (l1 <= 0.0f || !std::isfinite(l1))
        throw std::invalid_argument("octahedron_encode: zero or non-finite direction");
    float px = d.x / l1, py = d.y / l1, pz = d.z / l1;
    float u = px, v = py;
    if (pz < 0.0f) {
        u = (1.0f - std::abs(py)) * detail::sign_pos(px);
        v = (1.0f - std::abs(px)) * detail::sign_pos(py);
    }
    return {u * 0.5f + 0.5f, v * 0.5f + 0.5f};
}

inline Vec3 octahedron_decode(const OctaUV& uv) {
    float fx = uv.u * 2.0f - 1.0f;
    float fy = uv.v * 2.0f - 1.0f;
    float fz = 1.0f - std::abs(fx) - std::abs(fy);
    if (fz < 0.0f) {
        float ax = std::abs(fx), ay = std::abs(fy);
        float ox = fx;
        fx = (1.0f - ay) * detail::sign_pos(ox);
        fy = (1.0f - ax) * detail::sign_pos(fy);
    }
    return normalize(Vec3{fx, fy, fz});
}

/// Per-axis quantization of a unit direction embedded in the [-1,1]^3 cube.
inline std::array<uint32_t, 3> cube_encode_direction(const Vec3& d, int bits_per_axis) {
    if (std::abs(length(d) - 1.0f) > 1e-6f)
        throw std::invalid_argument("cube_encode_direction: direction not unit length");
    return {quantize((double(d.x) + 1.0) * 0.5, bits_per_axis),
            quantize((double(d.y) + 1.0) * 0.5, bits_per_axis),
            quantize((double(d.z) + 1.0) * 0.5, bits_per_axis)};
}

} // namespace rayorder
