#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rayorder/geom.hpp"

namespace rayorder {

struct Triangle {
    Vec3 v0, v1, v2;

    Aabb bounds() const {
        Aabb b;
        b.extend(v0);
        b.extend(v1);
        b.extend(v2);
        return b;
    }
    Vec3 centroid() const { return (v0 + v1 + v2) / 3.0f; }
};

/// Internal nodes allocate their children adjacently and store one index
/// (right = left + 1), so siblings share a cache line when the node stride
/// allows it.
struct BvhNode {
    Aabb bounds;
    uint32_t left = 0;   // internal: left child index (right = left + 1); leaf: first triangle ref
    uint32_t count = 0;  // 0 for internal nodes, triangle count for leaves
    uint8_t axis = 0;    // split axis of internal nodes, for near-child-first ordering
    bool leaf() const { return count > 0; }
};

struct Bvh {
    std::vector<BvhNode> nodes;
    std::vector<uint32_t> tri_indices; // leaf ranges index into this
    std::vector<Triangle> triangles;
    Aabb bounds() const { return nodes.empty() ? Aabb{} : nodes[0].bounds; }
};

/// Deterministic top-down binned-SAH build (8 bins per axis, at most 4
/// triangles per leaf).
Bvh build_bvh(std::span<const Triangle> tris);

struct HitRecord {
    bool hit = false;
    float t = std::numeric_limits<float>::infinity();
    uint32_t triangle = UINT32_MAX;
};

struct RayCounters {
    uint32_t node_visits = 0;
    uint32_t triangle_tests = 0;
};

inline constexpr float kRayTmin = 1e-4f;

/// Nearest intersection with t in (kRayTmin, tmax].
HitRecord closest_hit(const Bvh& bvh, const Ray& ray, RayCounters* counters = nullptr,
                      std::vector<uint32_t>* node_trace = nullptr);

/// Any intersection with t in (kRayTmin, tmax); stops at the first one found.
HitRecord any_hit(const Bvh& bvh, const Ray& ray, RayCounters* counters = nullptr,
                  std::vector<uint32_t>* node_trace = nullptr);

/// SIMT-style utilization: rays run in groups of warp_size in lockstep, a
/// group retires after max(steps) iterations. Result is pooled over groups,
/// total steps / total lane-iterations; a trailing partial group uses its
/// actual size and all-zero groups are skipped.
double warp_efficiency(std::span<const uint32_t> step_counts, uint32_t warp_size);

struct CacheConfig {
    uint32_t capacity_bytes = 32 * 1024;
    uint32_t line_bytes = 128;
    uint32_t ways = 4;
    // One node record per line by default: the hit rate then measures node
    // reuse directly instead of incidental line sharing between unrelated
    // nodes, which is what separates coherent from incoherent warps.
    uint32_t node_stride = 128;
    double miss_penalty = 4.0;  // extra cost units per simulated cache miss
};

/// Set-associative LRU cache model over node fetch addresses
/// (node index * node_stride).
class CacheSim {
  public:
    explicit CacheSim(const CacheConfig& cfg = {});
    void access(uint32_t node_index);
    uint64_t hits() const { return hits_; }
    uint64_t accesses() const { return accesses_; }
    /// hits/accesses; an untouched cache reports 1.0.
    double hit_rate() const { return accesses_ == 0 ? 1.0 : double(hits_) / double(accesses_); }

  private:
    struct Way {
        uint64_t tag = UINT64_MAX;
        uint64_t stamp = 0;
    };
    CacheConfig cfg_;
    uint32_t sets_ = 0;
    uint64_t tick_ = 0;
    uint64_t hits_ = 0, accesses_ = 0;
    std::vector<Way> ways_;
};

/// Convenience wrapper: run one trace of node ids through a fresh cache.
double cache_simulate(std::span<const uint32_t> node_trace, const CacheConfig& cfg = {});

enum class TraceMode { Closest, Any };

struct TraceStats {
    uint64_t node_visits = 0;
    uint64_t triangle_tests = 0;
    uint64_t warp_slots = 0;      // lane-iterations under the lockstep model
    uint64_t cache_hits = 0;
    uint64_t cache_accesses = 0;
    double warp_eff = 1.0;
    double cache_hit_rate = 1.0;
    double wall_ms = 0.0;
    double sim_cost = 0.0;        // warp_slots + miss_penalty * cache misses
    std::vector<uint32_t> per_ray_node_visits;
    std::vector<uint32_t> per_ray_triangle_tests;
};

struct TraceBatchResult {
    std::vector<HitRecord> hits;
    TraceStats stats;
};

/// Trace a batch in its given order, warp by warp. The cache model replays
/// each warp's node fetches interleaved round-robin across its rays to mimic
/// lockstep execution; every warp starts from a cold cache and the counters
/// are pooled. All statistics except wall_ms are independent of thread count.
TraceBatchResult trace_batch(const Bvh& bvh, std::span<const Ray> rays, TraceMode mode,
                             uint32_t warp_size = 64, const CacheConfig& cache = {});

} // namespace rayorder
