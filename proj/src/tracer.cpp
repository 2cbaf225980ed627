#include "rayorder/tracer.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "rayorder/parallel.hpp"

namespace rayorder {

namespace {

constexpr int kSahBins = 8;
constexpr uint32_t kLeafMax = 4;
constexpr float kDetEps = 1e-7f;

struct BuildEntry {
    uint32_t node;
    uint32_t begin, end;
    uint32_t depth;
};

struct PrimInfo {
    Aabb bounds;
    Vec3 centroid;
};

} // namespace

Bvh build_bvh(std::span<const Triangle> tris) {
    if (tris.empty())
        throw std::invalid_argument("build_bvh: empty triangle list");

    Bvh bvh;
    bvh.triangles.assign(tris.begin(), tris.end());
    bvh.tri_indices.resize(tris.size());
    std::vector<PrimInfo> prims(tris.size());
    for (uint32_t i = 0; i < tris.size(); ++i) {
        bvh.tri_indices[i] = i;
        prims[i] = {tris[i].bounds(), tris[i].centroid()};
    }

    bvh.nodes.reserve(2 * tris.size());
    bvh.nodes.emplace_back();
    std::vector<BuildEntry> stack{{0, 0, uint32_t(tris.size()), 0}};

    while (!stack.empty()) {
        BuildEntry e = stack.back();
        stack.pop_back();
        uint32_t n = e.end - e.begin;

        Aabb bounds, cbounds;
        for (uint32_t i = e.begin; i < e.end; ++i) {
            bounds.extend(prims[bvh.tri_indices[i]].bounds);
            cbounds.extend(prims[bvh.tri_indices[i]].centroid);
        }
        bvh.nodes[e.node].bounds = bounds;

        if (n <= kLeafMax) {
            bvh.nodes[e.node].left = e.begin;
            bvh.nodes[e.node].count = n;
            continue;
        }

        // Binned SAH over all three axes of the centroid bounds.
        int best_axis = -1, best_bin = -1;
        float best_cost = float(n); // leaf cost baseline: one test per triangle
        Vec3 cdiag = cbounds.diagonal();
        for (int axis = 0; axis < 3; ++axis) {
            float extent = cdiag[axis];
            if (extent <= 0.0f) continue;
            Aabb bin_bounds[kSahBins];
            uint32_t bin_count[kSahBins] = {};
            float scale = float(kSahBins) / extent;
            for (uint32_t i = e.begin; i < e.end; ++i) {
                const PrimInfo& p = prims[bvh.tri_indices[i]];
                int b = std::min(kSahBins - 1, int((p.centroid[axis] - cbounds.min[axis]) * scale));
                bin_bounds[b].extend(p.bounds);
                ++bin_count[b];
            }
            Aabb right_acc[kSahBins];
            Aabb acc;
            for (int b = kSahBins - 1; b > 0; --b) {
                acc.extend(bin_bounds[b]);
                right_acc[b] = acc;
            }
            acc = Aabb{};
            uint32_t left_n = 0;
            for (int b = 0; b < kSahBins - 1; ++b) {
                acc.extend(bin_bounds[b]);
                left_n += bin_count[b];
                if (left_n == 0 || left_n == n) continue;
                float cost = (acc.surface_area() * float(left_n) +
                              right_acc[b + 1].surface_area() * float(n - left_n)) /
                             bounds.surface_area();
                if (cost < best_cost) {
                    best_cost = cost;
                    best_axis = axis;
                    best_bin = b;
                }
            }
        }

        uint32_t mid;
        int axis = best_axis;
        // Median splits beyond this depth keep the tree, and with it the
        // traversal stack, logarithmically bounded.
        if (e.depth >= 90) axis = -1;
        if (axis < 0) {
            // No useful SAH split; still split when over the leaf limit.
            Vec3 d = cdiag;
            axis = d.x >= d.y && d.x >= d.z ? 0 : (d.y >= d.z ? 1 : 2);
            mid = e.begin + n / 2;
            std::nth_element(bvh.tri_indices.begin() + e.begin, bvh.tri_indices.begin() + mid,
                             bvh.tri_indices.begin() + e.end, [&](uint32_t a, uint32_t b) {
                                 float ca = prims[a].centroid[axis], cb = prims[b].centroid[axis];
                                 return ca < cb || (ca == cb && a < b);
                             });
        } else {
            float scale = float(kSahBins) / cdiag[axis];
            auto it = std::partition(bvh.tri_indices.begin() + e.begin,
                                     bvh.tri_indices.begin() + e.end, [&](uint32_t idx) {
                                         int b = std::min(kSahBins - 1,
                                                          int((prims[idx].centroid[axis] -
                                                               cbounds.min[axis]) *
                                                              scale));
                                         return b <= best_bin;
                                     });
            mid = uint32_t(it - bvh.tri_indices.begin());
            if (mid == e.begin || mid == e.end) mid = e.begin + n / 2;
        }

        uint32_t left = uint32_t(bvh.nodes.size());
        bvh.nodes.emplace_back();
        bvh.nodes.emplace_back();
        bvh.nodes[e.node].left = left;
        bvh.nodes[e.node].count = 0;
        bvh.nodes[e.node].axis = uint8_t(axis);
        // Right first so the left child is processed next (depth-first order).
        stack.push_back({left + 1, mid, e.end, e.depth + 1});
        stack.push_back({left, e.begin, mid, e.depth + 1});
    }
    return bvh;
}

namespace {

// Moller-Trumbore with a determinant epsilon; no backface culling.
inline bool intersect_triangle(const Triangle& tri, const Ray& ray, float& t_out) {
    Vec3 e1 = tri.v1 - tri.v0;
    Vec3 e2 = tri.v2 - tri.v0;
    Vec3 p = cross(ray.direction, e2);
    float det = dot(e1, p);
    if (std::abs(det) < kDetEps) return false;
    float inv_det = 1.0f / det;
    Vec3 s = ray.origin - tri.v0;
    float u = dot(s, p) * inv_det;
    if (u < 0.0f || u > 1.0f) return false;
    Vec3 q = cross(s, e1);
    float v = dot(ray.direction, q) * inv_det;
    if (v < 0.0f || u + v > 1.0f) return false;
    t_out = dot(e2, q) * inv_det;
    return true;
}

HitRecord trace_one(const Bvh& bvh, const Ray& ray, TraceMode mode, RayCounters* counters,
                    std::vector<uint32_t>* node_trace) {
    HitRecord best;
    float tmax = ray.tmax;
    uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;

    while (sp > 0) {
        uint32_t ni = stack[--sp];
        const BvhNode& node = bvh.nodes[ni];
        if (counters) ++counters->node_visits;
        if (node_trace) node_trace->push_back(ni);

        auto [t0, t1] = ray_box_range(ray, node.bounds);
        if (t0 > t1 || t0 > tmax) continue;

        if (node.leaf()) {
            for (uint32_t i = 0; i < node.count; ++i) {
                uint32_t tri = bvh.tri_indices[node.left + i];
                if (counters) ++counters->triangle_tests;
                float t;
                if (!intersect_triangle(bvh.triangles[tri], ray, t)) continue;
                if (mode == TraceMode::Closest) {
                    if (t > kRayTmin && t <= tmax && t < best.t) {
                        best = {true, t, tri};
                        tmax = t;
                    }
                } else {
                    if (t > kRayTmin && t < ray.tmax) return {true, t, tri};
                }
            }
        } else {
            uint32_t near = node.left, far = node.left + 1;
            if (ray.direction[node.axis] < 0.0f) std::swap(near, far);
            stack[sp++] = far;
            stack[sp++] = near;
        }
    }
    return best;
}

} // namespace

HitRecord closest_hit(const Bvh& bvh, const Ray& ray, RayCounters* counters,
                      std::vector<uint32_t>* node_trace) {
    return trace_one(bvh, ray, TraceMode::Closest, counters, node_trace);
}

HitRecord any_hit(const Bvh& bvh, const Ray& ray, RayCounters* counters,
                  std::vector<uint32_t>* node_trace) {
    return trace_one(bvh, ray, TraceMode::Any, counters, node_trace);
}

double warp_efficiency(std::span<const uint32_t> step_counts, uint32_t warp_size) {
    if (step_counts.empty())
        throw std::invalid_argument("warp_efficiency: empty step counts");
    if (warp_size == 0)
        throw std::invalid_argument("warp_efficiency: zero warp size");
    uint64_t steps = 0, slots = 0;
    for (size_t begin = 0; begin < step_counts.size(); begin += warp_size) {
        size_t end = std::min(step_counts.size(), begin + warp_size);
        uint64_t group_sum = 0, group_max = 0;
        for (size_t i = begin; i < end; ++i) {
            group_sum += step_counts[i];
            group_max = std::max<uint64_t>(group_max, step_counts[i]);
        }
        if (group_max == 0) continue; // idle group carries no information
        steps += group_sum;
        slots += group_max * (end - begin);
    }
    return slots == 0 ? 1.0 : double(steps) / double(slots);
}

CacheSim::CacheSim(const CacheConfig& cfg) : cfg_(cfg) {
    if (cfg.line_bytes == 0 || cfg.ways == 0 || cfg.capacity_bytes < cfg.line_bytes * cfg.ways)
        throw std::invalid_argument("CacheSim: bad geometry");
    sets_ = cfg.capacity_bytes / cfg.line_bytes / cfg.ways;
    ways_.assign(size_t(sets_) * cfg.ways, Way{});
}

void CacheSim::access(uint32_t node_index) {
    uint64_t line = uint64_t(node_index) * cfg_.node_stride / cfg_.line_bytes;
    uint64_t set = line % sets_;
    uint64_t tag = line / sets_;
    Way* ways = &ways_[set * cfg_.ways];
    ++accesses_;
    ++tick_;
    Way* victim = &ways[0];
    for (uint32_t w = 0; w < cfg_.ways; ++w) {
        if (ways[w].tag == tag) {
            ways[w].stamp = tick_;
            ++hits_;
            return;
        }
        if (ways[w].stamp < victim->stamp) victim = &ways[w];
    }
    victim->tag = tag;
    victim->stamp = tick_;
}

double cache_simulate(std::span<const uint32_t> node_trace, const CacheConfig& cfg) {
    CacheSim sim(cfg);
    for (uint32_t n : node_trace) sim.access(n);
    return sim.hit_rate();
}

TraceBatchResult trace_batch(const Bvh& bvh, std::span<const Ray> rays, TraceMode mode,
                             uint32_t warp_size, const CacheConfig& cache) {
    if (warp_size != 32 && warp_size != 64)
        throw std::invalid_argument("trace_batch: warp size must be 32 or 64");

    auto t0 = std::chrono::steady_clock::now();
    TraceBatchResult out;
    out.hits.resize(rays.size());
    out.stats.per_ray_node_visits.assign(rays.size(), 0);
    out.stats.per_ray_triangle_tests.assign(rays.size(), 0);
    size_t n_warps = (rays.size() + warp_size - 1) / warp_size;

    struct WarpTotals {
        uint64_t visits = 0, tests = 0, slots = 0, cache_hits = 0, cache_accesses = 0;
    };
    std::vector<WarpTotals> totals(n_warps);

    parallel_for_chunks(n_warps, [&](size_t wbegin, size_t wend) {
        std::vector<std::vector<uint32_t>> traces(warp_size);
        std::vector<uint32_t> interleaved;
        for (size_t w = wbegin; w < wend; ++w) {
            size_t begin = w * warp_size;
            size_t end = std::min(rays.size(), begin + warp_size);
            uint32_t lanes = uint32_t(end - begin);
            uint32_t max_steps = 0;
            WarpTotals& tot = totals[w];
            for (uint32_t l = 0; l < lanes; ++l) {
                traces[l].clear();
                RayCounters rc;
                out.hits[begin + l] = trace_one(bvh, rays[begin + l], mode, &rc, &traces[l]);
                out.stats.per_ray_node_visits[begin + l] = rc.node_visits;
                out.stats.per_ray_triangle_tests[begin + l] = rc.triangle_tests;
                tot.visits += rc.node_visits;
                tot.tests += rc.triangle_tests;
                max_steps = std::max(max_steps, rc.node_visits);
            }
            tot.slots = uint64_t(max_steps) * lanes;

            interleaved.clear();
            for (uint32_t r = 0; r < max_steps; ++r)
                for (uint32_t l = 0; l < lanes; ++l)
                    if (r < traces[l].size()) interleaved.push_back(traces[l][r]);
            CacheSim sim(cache);
            for (uint32_t ni : interleaved) sim.access(ni);
            tot.cache_hits = sim.hits();
            tot.cache_accesses = sim.accesses();
        }
    });

    TraceStats& s = out.stats;
    for (const WarpTotals& tot : totals) {
        s.node_visits += tot.visits;
        s.triangle_tests += tot.tests;
        s.warp_slots += tot.slots;
        s.cache_hits += tot.cache_hits;
        s.cache_accesses += tot.cache_accesses;
    }
    s.warp_eff = s.warp_slots == 0 ? 1.0 : double(s.node_visits) / double(s.warp_slots);
    s.cache_hit_rate = s.cache_accesses == 0 ? 1.0 : double(s.cache_hits) / double(s.cache_accesses);
    s.sim_cost = double(s.warp_slots) + cache.miss_penalty * double(s.cache_accesses - s.cache_hits);
    s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace rayorder
