#include "rayorder/keys.hpp"

#include <array>
#include <chrono>
#include <stdexcept>

#include "rayorder/interleave.hpp"
#include "rayorder/octahedral.hpp"
#include "rayorder/parallel.hpp"

namespace rayorder {

namespace {

bool wide(const KeyContext& ctx) { return ctx.key_bits == KeyBits::k64; }

// Quantized origin with per-axis widths (doubled in 64-bit mode by callers).
std::array<uint32_t, 3> quant_origin(const Ray& ray, const KeyContext& ctx, int bx, int by, int bz) {
    Vec3 n = normalize_point(ray.origin, ctx.quant_box);
    return {quantize(n.x, bx), quantize(n.y, by), quantize(n.z, bz)};
}

std::array<uint32_t, 2> quant_octa(const Ray& ray, int bits) {
    OctaUV uv = octahedron_encode(ray.direction);
    return {quantize(uv.u, bits), quantize(uv.v, bits)};
}

} // namespace

uint64_t key_origin(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 11 * s, 11 * s, 10 * s);
    BitComponent c[3] = {{o[0], uint32_t(11 * s)}, {o[1], uint32_t(11 * s)}, {o[2], uint32_t(10 * s)}};
    return interleave_round_robin(c).key;
}

uint64_t key_reis(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 8 * s, 7 * s, 7 * s);
    auto d = quant_octa(ray, 5 * s);
    BitComponent oc[3] = {{o[0], uint32_t(8 * s)}, {o[1], uint32_t(7 * s)}, {o[2], uint32_t(7 * s)}};
    BitComponent dc[2] = {{d[0], uint32_t(5 * s)}, {d[1], uint32_t(5 * s)}};
    uint64_t hi = interleave_round_robin(oc).key;
    InterleavedKey lo = interleave_round_robin(dc);
    return (hi << lo.width) | lo.key;
}

uint64_t key_costa(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto d = quant_octa(ray, 4 * s);
    auto o = quant_origin(ray, ctx, 8 * s, 8 * s, 8 * s);
    BitComponent dc[2] = {{d[0], uint32_t(4 * s)}, {d[1], uint32_t(4 * s)}};
    BitComponent oc[3] = {{o[0], uint32_t(8 * s)}, {o[1], uint32_t(8 * s)}, {o[2], uint32_t(8 * s)}};
    uint64_t hi = interleave_round_robin(dc).key;
    InterleavedKey lo = interleave_round_robin(oc);
    return (hi << lo.width) | lo.key;
}

uint64_t key_aila(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 6 * s, 6 * s, 5 * s);
    auto d = cube_encode_direction(ray.direction, 2 * s);
    // Direction values sit right-aligned in origin-width slots, so the first
    // three interleave rounds emit zero direction bits.
    BitComponent c[6] = {{o[0], uint32_t(6 * s)}, {o[1], uint32_t(6 * s)}, {o[2], uint32_t(5 * s)},
                         {d[0], uint32_t(5 * s)}, {d[1], uint32_t(5 * s)}, {d[2], uint32_t(5 * s)}};
    return interleave_round_robin(c).key;
}

uint64_t key_aila_compact(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 7 * s, 7 * s, 7 * s);
    auto d = cube_encode_direction(ray.direction, 4 * s);
    uint32_t dz = quantize((double(ray.direction.z) + 1.0) * 0.5, 3 * s);
    // Leading pure-origin block, then direction and origin groups alternate.
    uint32_t hi_bits = uint32_t(4 * s), lo_bits = uint32_t(3 * s);
    BitComponent top[3] = {{o[0] >> lo_bits, hi_bits}, {o[1] >> lo_bits, hi_bits}, {o[2] >> lo_bits, hi_bits}};
    uint64_t mask = (uint64_t(1) << lo_bits) - 1;
    BitComponent tail[6] = {{d[0], uint32_t(4 * s)},    {d[1], uint32_t(4 * s)},    {dz, uint32_t(3 * s)},
                            {o[0] & mask, lo_bits}, {o[1] & mask, lo_bits}, {o[2] & mask, lo_bits}};
    uint64_t hi = interleave_round_robin(top).key;
    InterleavedKey lo = interleave_round_robin(tail);
    return (hi << lo.width) | lo.key;
}

uint64_t key_octahedron(const Ray& ray, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 8 * s, 8 * s, 8 * s);
    auto d = quant_octa(ray, 4 * s);
    uint32_t hi_bits = uint32_t(5 * s), lo_bits = uint32_t(3 * s);
    BitComponent top[3] = {{o[0] >> lo_bits, hi_bits}, {o[1] >> lo_bits, hi_bits}, {o[2] >> lo_bits, hi_bits}};
    uint64_t mask = (uint64_t(1) << lo_bits) - 1;
    BitComponent tail[5] = {{d[0], uint32_t(4 * s)},    {d[1], uint32_t(4 * s)},
                            {o[0] & mask, lo_bits}, {o[1] & mask, lo_bits}, {o[2] & mask, lo_bits}};
    uint64_t hi = interleave_round_robin(top).key;
    InterleavedKey lo = interleave_round_robin(tail);
    return (hi << lo.width) | lo.key;
}

uint64_t key_two_point(const Ray& ray, const Vec3& termination, const KeyContext& ctx) {
    int s = wide(ctx) ? 2 : 1;
    auto o = quant_origin(ray, ctx, 6 * s, 6 * s, 5 * s);
    Vec3 tn = normalize_point(clamp_point(termination, ctx.quant_box), ctx.quant_box);
    uint32_t t[3] = {quantize(tn.x, 5 * s), quantize(tn.y, 5 * s), quantize(tn.z, 5 * s)};
    BitComponent c[6] = {{o[0], uint32_t(6 * s)}, {o[1], uint32_t(6 * s)}, {o[2], uint32_t(5 * s)},
                         {t[0], uint32_t(5 * s)}, {t[1], uint32_t(5 * s)}, {t[2], uint32_t(5 * s)}};
    return interleave_round_robin(c).key;
}

namespace {

bool is_two_point(KeyMethod m) {
    return m == KeyMethod::TwoPointFixed || m == KeyMethod::TwoPointAdaptive ||
           m == KeyMethod::TwoPointReal;
}

uint64_t key_for(const Ray& ray, KeyMethod method, const KeyContext& ctx, const Vec3* termination) {
    switch (method) {
        case KeyMethod::Origin: return key_origin(ray, ctx);
        case KeyMethod::Reis: return key_reis(ray, ctx);
        case KeyMethod::Costa: return key_costa(ray, ctx);
        case KeyMethod::Aila: return key_aila(ray, ctx);
        case KeyMethod::AilaCompact: return key_aila_compact(ray, ctx);
        case KeyMethod::Octahedron: return key_octahedron(ray, ctx);
        case KeyMethod::TwoPointFixed:
        case KeyMethod::TwoPointAdaptive:
        case KeyMethod::TwoPointReal:
            return key_two_point(ray, termination ? *termination : ctx.estimator->termination(ray), ctx);
        default: throw std::logic_error("key_for: bad method");
    }
}

} // namespace

KeyBatch compute_keys(std::span<const Ray> rays, KeyMethod method, const KeyContext& ctx,
                      std::span<const Vec3> terminations) {
    if (is_two_point(method) && terminations.empty() && ctx.estimator == nullptr)
        throw std::invalid_argument(std::string("compute_keys: ") + to_string(method) +
                                    " requires a termination estimator or precomputed points");
    if (!terminations.empty() && terminations.size() != rays.size())
        throw std::invalid_argument("compute_keys: termination count does not match ray count");

    auto t0 = std::chrono::steady_clock::now();
    KeyBatch out;
    out.keys.resize(rays.size());
    if (method == KeyMethod::Unsorted) {
        for (size_t i = 0; i < rays.size(); ++i) out.keys[i] = i;
    } else {
        const Vec3* term = terminations.empty() ? nullptr : terminations.data();
        parallel_for_chunks(rays.size(), [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i)
                out.keys[i] = key_for(rays[i], method, ctx, term ? term + i : nullptr);
        });
    }
    out.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

const char* to_string(KeyMethod m) {
    switch (m) {
        case KeyMethod::Unsorted: return "unsorted";
        case KeyMethod::Origin: return "origin";
        case KeyMethod::Reis: return "reis";
        case KeyMethod::Costa: return "costa";
        case KeyMethod::Aila: return "aila";
        case KeyMethod::AilaCompact: return "aila_compact";
        case KeyMethod::Octahedron: return "octahedron";
        case KeyMethod::TwoPointFixed: return "two_point_fixed";
        case KeyMethod::TwoPointAdaptive: return "two_point_adaptive";
        case KeyMethod::TwoPointReal: return "two_point_real";
    }
    return "?";
}

namespace {
constexpr KeyMethod kAllMethods[] = {
    KeyMethod::Unsorted,     KeyMethod::Origin,       KeyMethod::Reis,
    KeyMethod::Costa,        KeyMethod::Aila,         KeyMethod::AilaCompact,
    KeyMethod::Octahedron,   KeyMethod::TwoPointFixed, KeyMethod::TwoPointAdaptive,
    KeyMethod::TwoPointReal,
};
} // namespace

std::optional<KeyMethod> parse_key_method(const std::string& name) {
    for (KeyMethod m : kAllMethods)
        if (name == to_string(m)) return m;
    return std::nullopt;
}

std::span<const KeyMethod> all_key_methods() { return kAllMethods; }

} // namespace rayorder
