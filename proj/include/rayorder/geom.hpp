#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rayorder {

struct Vec3 {
    float x = 0.0f, y = 0.0f, z = 0.0f;

    Vec3() = default;
    Vec3(float x_, float y_, float z_) : x(x_), y(y_), z(z_) {}

    float operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(float s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(float s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline float dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline float length(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalize(const Vec3& v) {
    float len = length(v);
    return len > 0.0f ? v / len : v;
}

inline Vec3 min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

inline Vec3 max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

/// Ray provenance. Stored in ray dumps as a u32, so values are part of the
/// on-disk format and must not be reordered.
enum class RayKind : uint32_t { Secondary = 0, Shadow = 1, Primary = 2 };

struct Ray {
    Vec3 origin;
    Vec3 direction;                                      // unit length
    float tmax = std::numeric_limits<float>::infinity(); // > 0
    RayKind kind = RayKind::Secondary;
};

inline bool ray_valid(const Ray& r) {
    return std::abs(length(r.direction) - 1.0f) <= 1e-6f && r.tmax > 0.0f;
}

struct Aabb {
    Vec3 min{std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
             std::numeric_limits<float>::max()};
    Vec3 max{std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
             std::numeric_limits<float>::lowest()};

    void extend(const Vec3& p) { min = rayorder::min(min, p); max = rayorder::max(max, p); }
    void extend(const Aabb& b) { min = rayorder::min(min, b.min); max = rayorder::max(max, b.max); }
    Vec3 center() const { return (min + max) * 0.5f; }
    Vec3 diagonal() const { return max - min; }
    bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }

    float surface_area() const {
        Vec3 d = diagonal();
        return 2.0f * (d.x * d.y + d.y * d.z + d.z * d.x);
    }
};

/// Largest axis extent of a scene box.
inline double scene_extent(const Aabb& box) {
    if (!box.valid())
        throw std::invalid_argument("scene_extent: invalid box");
    Vec3 d = box.diagonal();
    double e = std::max({double(d.x), double(d.y), double(d.z)});
    if (e <= 0.0)
        throw std::invalid_argument("scene_extent: degenerate box");
    return e;
}

// Quantization box: scene box padded per side so that points exactly on the
// boundary land strictly inside. The pad factor is a power of two so that the
// canonical cases (cube center -> 0.5 per axis) stay exact in float/double
// arithmetic.
inline constexpr double kQuantizationPad = 0x1p-13;

inline Aabb expand_for_quantization(const Aabb& box) {
    double e = scene_extent(box);
    float pad = float(e * kQuantizationPad);
    Aabb out = box;
    out.min = out.min - Vec3{pad, pad, pad};
    out.max = out.max + Vec3{pad, pad, pad};
    return out;
}

/// Map a point into [0,1)^3 relative to `box`, clamping anything outside.
inline Vec3 normalize_point(const Vec3& p, const Aabb& box) {
    const float hi = std::nextafter(1.0f, 0.0f);
    Vec3 d = box.diagonal();
    auto norm = [&](float v, float lo, float ext) {
        float u = ext > 0.0f ? (v - lo) / ext : 0.0f;
        return std::clamp(u, 0.0f, hi);
    };
    return {norm(p.x, box.min.x, d.x), norm(p.y, box.min.y, d.y), norm(p.z, box.min.z, d.z)};
}

/// floor(u * 2^bits) clamped to [0, 2^bits - 1]. bits in 1..22 so that a
/// doubled-width axis still fits three-per-64-bit-key.
inline uint32_t quantize(double u, int bits) {
    if (bits < 1 || bits > 22)
        throw std::invalid_argument("quantize: bits out of range");
    double cells = double(uint32_t(1) << bits);
    double q = std::floor(u * cells);
    if (q < 0.0) return 0;
    uint32_t limit = (uint32_t(1) << bits) - 1;
    return q > double(limit) ? limit : uint32_t(q);
}

inline Vec3 clamp_point(const Vec3& p, const Aabb& box) {
    return rayorder::min(rayorder::max(p, box.min), box.max);
}

/// Slab test. Returns {tnear, tfar} of the intersection of the ray line with
/// the box for t in [0, tmax]; no hit when tnear > tfar.
inline std::pair<float, float> ray_box_range(const Ray& r, const Aabb& box) {
    float t0 = 0.0f, t1 = r.tmax;
    for (int a = 0; a < 3; ++a) {
        if (r.direction[a] == 0.0f) {
            if (r.origin[a] < box.min[a] || r.origin[a] > box.max[a])
                return {1.0f, 0.0f};
            continue;
        }
        float inv = 1.0f / r.direction[a];
        float near = (box.min[a] - r.origin[a]) * inv;
        float far = (box.max[a] - r.origin[a]) * inv;
        if (inv < 0.0f) std::swap(near, far);
        t0 = near > t0 ? near : t0;
        t1 = far < t1 ? far : t1;
    }
    return {t0, t1};
}

} // namespace rayorder
