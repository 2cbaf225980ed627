#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rayorder/geom.hpp"

namespace rayorder {

/// Sorting-key construction for ray batches. Keys are integers whose
/// most-significant bits carry the spatial information that matters most, so
/// an ascending sort groups rays that are likely to traverse the same part of
/// the acceleration structure.
///
/// 32-bit layouts, MSB (bit 31) first; o = origin, d = direction,
/// t = termination point, 0 = always-zero:
///   origin       o32                             origin 11/11/10
///   reis         o22 d10                         origin 8/7/7, octa u5 v5
///   costa        d8 o24                          octa u4 v4, origin 8/8/8
///   aila         o3 03 o3 03 o3 03 o3 d3 o3 d3 o2  origin 6/6/5, cube 2/2/2
///   aila_compact o12 d3 o3 d3 o3 d3 o3 d2        origin 7/7/7, cube 4/4/3
///   octahedron   o15 d2 o3 d2 o3 d2 o3 d2        origin 8/8/8, octa u4 v4
///   two_point    (o3 t3)x5 o2                    origin 6/6/5, termination 5/5/5
///
/// 64-bit mode doubles every per-component width and keeps the group order.
enum class KeyMethod {
    Unsorted,
    Origin,
    Reis,
    Costa,
    Aila,
    AilaCompact,
    Octahedron,
    TwoPointFixed,
    TwoPointAdaptive,
    TwoPointReal,
};

enum class KeyBits : int { k32 = 32, k64 = 64 };

/// Supplies termination points for the two-point methods. Implementations
/// live in the estimator module (fixed ratio, adaptive hash table, traced).
class TerminationEstimator {
  public:
    virtual ~TerminationEstimator() = default;
    virtual Vec3 termination(const Ray& ray) const = 0;
    /// True when termination() runs a full trace (so batch key computation
    /// should account for it as a separate pre-trace pass).
    virtual bool traced() const { return false; }
};

struct KeyContext {
    Aabb quant_box;   // scene box padded for quantization
    KeyBits key_bits = KeyBits::k32;
    const TerminationEstimator* estimator = nullptr;

    static KeyContext for_scene(const Aabb& scene_box, KeyBits bits = KeyBits::k32) {
        KeyContext ctx;
        ctx.quant_box = expand_for_quantization(scene_box);
        ctx.key_bits = bits;
        return ctx;
    }
};

uint64_t key_origin(const Ray& ray, const KeyContext& ctx);
uint64_t key_reis(const Ray& ray, const KeyContext& ctx);
uint64_t key_costa(const Ray& ray, const KeyContext& ctx);
uint64_t key_aila(const Ray& ray, const KeyContext& ctx);
uint64_t key_aila_compact(const Ray& ray, const KeyContext& ctx);
uint64_t key_octahedron(const Ray& ray, const KeyContext& ctx);

/// Shared layout of the two-point family; the termination point is clamped to
/// the quantization box before encoding.
uint64_t key_two_point(const Ray& ray, const Vec3& termination, const KeyContext& ctx);

struct KeyBatch {
    std::vector<uint64_t> keys;
    double elapsed_ms = 0.0;
};

/// Keys for a whole batch. Two-point methods read ctx.estimator unless
/// `terminations` supplies precomputed points. Unsorted yields the ray index,
/// i.e. sorting keeps the incoming order.
KeyBatch compute_keys(std::span<const Ray> rays, KeyMethod method, const KeyContext& ctx,
                      std::span<const Vec3> terminations = {});

const char* to_string(KeyMethod m);
std::optional<KeyMethod> parse_key_method(const std::string& name);
std::span<const KeyMethod> all_key_methods();

} // namespace rayorder
