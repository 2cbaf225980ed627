#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rayorder/coherence.hpp"
#include "rayorder/estimator.hpp"
#include "rayorder/scene.hpp"
#include "rayorder/sort.hpp"
#include "rayorder/tracer.hpp"

namespace rayorder {

struct RenderConfig {
    int width = 256, height = 256;
    int spp = 8;
    int max_bounces = 8; // bounce 0 = camera rays; 0 traces camera rays only
    double light_ratio = 0.05;
    double light_emission = 200.0;
    double albedo = 0.7;
    uint64_t seed = 1;
    uint32_t warp_size = 64;
    EstimatorConfig estimator; // scene_extent is filled in per scene
    CacheConfig cache;
};

/// One wavefront trace pass as seen by a benchmark sink.
struct TracePassInfo {
    int bounce = 0;
    RayKind kind = RayKind::Primary;
    size_t rays = 0;
    std::span<const Ray> batch; // canonical (pre-sort) order
    const ReorderReport* reorder = nullptr;
    const TraceStats* stats = nullptr;
    const CoherenceReport* coherence = nullptr; // null when rays < subset
    double measure = 0.0; // capsule measure over the traced order; NaN when rays < subset
};
using PassSink = std::function<void(const TracePassInfo&)>;

struct Image {
    int width = 0, height = 0;
    std::vector<double> pixels; // scanline order, linear grayscale
};

/// Grayscale binary PPM (P6) with gamma 2.2.
void write_ppm(std::ostream& out, const Image& img);
void write_ppm(const std::string& path, const Image& img);

/// Wavefront renderer: per bounce one batch of view/bounce rays plus one
/// batch of two shadow rays per live hit, each batch run through the
/// reorder pipeline and traced in its sorted order. Trace results are
/// scattered back before shading, so radiance never depends on the ordering
/// method, the worker count, or segment sizes; everything that consumes
/// randomness is keyed by (pixel, sample, bounce, purpose).
Image path_trace_wavefront(const Scene& scene, const Bvh& bvh, const RenderConfig& cfg,
                           KeyMethod method, const SortPlan& plan, const PassSink& sink = {});

/// Termination point matching terminate_real, computed from an existing trace
/// result instead of a fresh trace.
Vec3 termination_from_hit(const Ray& ray, const HitRecord& hit, const Aabb& scene_box);

} // namespace rayorder
