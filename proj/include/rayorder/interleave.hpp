#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rayorder {

/// One interleave slot: `value` occupies the low `bits` bits.
struct BitComponent {
    uint64_t value = 0;
    uint32_t bits = 0;
};

struct InterleavedKey {
    uint64_t key = 0;
    uint32_t width = 0;
};

/// MSB-first round-robin bit interleave. Round r emits the r-th most
/// significant bit of every component that still has bits left, in component
/// order; exhausted components are skipped. With equal per-component widths
/// this is the classical Morton code.
inline InterleavedKey interleave_round_robin(std::span<const BitComponent> comps) {
    uint32_t width = 0, max_bits = 0;
    for (const BitComponent& c : comps) {
        if (c.bits > 64)
            throw std::invalid_argument("interleave_round_robin: component wider than 64 bits");
        if (c.bits < 64 && c.value >> c.bits)
            throw std::invalid_argument("interleave_round_robin: value does not fit its slot");
        width += c.bits;
        max_bits = c.bits > max_bits ? c.bits : max_bits;
    }
    if (width > 64)
        throw std::invalid_argument("interleave_round_robin: total width exceeds 64 bits");

    uint64_t key = 0;
    for (uint32_t r = 0; r < max_bits; ++r)
        for (const BitComponent& c : comps)
            if (r < c.bits)
                key = (key << 1) | ((c.value >> (c.bits - 1 - r)) & 1u);
    return {key, width};
}

/// Inverse of interleave_round_robin for a key of exactly sum(bits) width.
inline std::vector<uint64_t> deinterleave(uint64_t key, std::span<const uint32_t> bits) {
    uint32_t width = 0, max_bits = 0;
    for (uint32_t b : bits) {
        width += b;
        max_bits = b > max_bits ? b : max_bits;
    }
    if (width > 64)
        throw std::invalid_argument("deinterleave: total width exceeds 64 bits");
    if (width < 64 && (key >> width))
        throw std::invalid_argument("deinterleave: key wider than shape");

    std::vector<uint64_t> values(bits.size(), 0);
    uint32_t pos = width;
    for (uint32_t r = 0; r < max_bits; ++r)
        for (size_t c = 0; c < bits.size(); ++c)
            if (r < bits[c]) {
                --pos;
                values[c] = (values[c] << 1) | ((key >> pos) & 1u);
            }
    return values;
}

} // namespace rayorder
