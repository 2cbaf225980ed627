#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rayorder/geom.hpp"
#include "rayorder/keys.hpp"

namespace rayorder {

struct KeyIndexPair {
    uint64_t key = 0;
    uint32_t index = 0;
    bool operator==(const KeyIndexPair&) const = default;
};

/// How a batch gets ordered before tracing. segment_size 0 sorts globally;
/// otherwise each block of segment_size rays is sorted independently
/// (cheaper, bounded working set).
struct SortPlan {
    uint32_t segment_size = 0; // 0, or a power of two >= 64 (1024/2048/4096 typical)
    KeyBits key_bits = KeyBits::k32;

    void validate() const {
        if (segment_size == 0) return;
        if (segment_size < 64 || (segment_size & (segment_size - 1)) != 0)
            throw std::invalid_argument("SortPlan: segment_size must be 0 or a power of two >= 64");
    }
};

/// Stable LSD radix sort by key, 8-bit digits: 4 passes for 32-bit keys,
/// 8 for 64-bit. Per-chunk histograms are merged in chunk order, so the
/// result is the unique stable order for any worker count.
void radix_sort_pairs(std::span<KeyIndexPair> pairs, KeyBits key_bits);

/// Sort each consecutive block of segment_size pairs independently
/// (the trailing partial block included). segment_size >= pairs.size() or 0
/// degenerates to a global sort; 1 is the identity.
void segmented_sort_pairs(std::span<KeyIndexPair> pairs, uint32_t segment_size, KeyBits key_bits);

/// Reorder `items` by `order` (out[i] = items[order[i]]) and return the
/// inverse permutation, which scatters results back to the original order.
/// Throws when `order` is not a permutation.
template <class T>
std::pair<std::vector<T>, std::vector<uint32_t>> gather_reorder(std::span<const T> items,
                                                                std::span<const uint32_t> order) {
    if (items.size() != order.size())
        throw std::invalid_argument("gather_reorder: size mismatch");
    std::vector<T> out(items.size());
    std::vector<uint32_t> inverse(items.size(), UINT32_MAX);
    for (size_t i = 0; i < order.size(); ++i) {
        uint32_t src = order[i];
        if (src >= items.size() || inverse[src] != UINT32_MAX)
            throw std::invalid_argument("gather_reorder: order is not a permutation");
        out[i] = items[src];
        inverse[src] = uint32_t(i);
    }
    return {std::move(out), std::move(inverse)};
}

/// Timed key -> sort -> gather pipeline output. accum_ms is filled by the
/// caller once post-trace table accumulation has run; pretrace_ms is nonzero
/// only for methods whose termination estimate itself traces.
struct ReorderReport {
    std::vector<uint32_t> order;     // position -> original index
    std::vector<uint32_t> inverse;   // original index -> position (empty in indirect mode)
    std::vector<Ray> reordered;      // empty in indirect mode
    double code_ms = 0.0;
    double sort_ms = 0.0;
    double reorder_ms = 0.0;
    double accum_ms = 0.0;
    double pretrace_ms = 0.0;
    double total_overhead_ms() const { return code_ms + sort_ms + reorder_ms + accum_ms; }
};

/// Unsorted bypasses every phase (identity order, zero timings).
ReorderReport reorder_pipeline(std::span<const Ray> rays, KeyMethod method, const KeyContext& ctx,
                               const SortPlan& plan, bool indirect = false);

} // namespace rayorder
