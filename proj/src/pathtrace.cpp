#include "rayorder/pathtrace.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "rayorder/coherence.hpp"
#include "rayorder/rng.hpp"

namespace rayorder {

namespace {

struct Camera {
    Vec3 eye, forward, right, up;
    float tan_half_fov, aspect;

    static Camera for_scene(const Scene& scene, int width, int height) {
        Camera cam;
        Vec3 c = scene.bounds.center();
        float dz = scene.bounds.max.z - scene.bounds.min.z;
        cam.eye = {c.x, c.y, scene.bounds.min.z + 0.1f * dz};
        cam.forward = {0, 0, 1};
        cam.right = {1, 0, 0};
        cam.up = {0, 1, 0};
        cam.tan_half_fov = std::tan(35.0f * float(std::numbers::pi) / 180.0f);
        cam.aspect = float(width) / float(height);
        return cam;
    }

    Ray primary(int px, int py, int width, int height, float jx, float jy) const {
        float u = (float(px) + jx) / float(width) * 2.0f - 1.0f;
        float v = 1.0f - (float(py) + jy) / float(height) * 2.0f;
        Vec3 dir = forward + right * (u * tan_half_fov * aspect) + up * (v * tan_half_fov);
        return {eye, normalize(dir), std::numeric_limits<float>::infinity(), RayKind::Primary};
    }
};

Vec3 oriented_normal(const Triangle& tri, const Vec3& incoming) {
    Vec3 n = normalize(cross(tri.v1 - tri.v0, tri.v2 - tri.v0));
    return dot(n, incoming) > 0.0f ? -n : n;
}

// Deterministic tangent frame.
void basis(const Vec3& n, Vec3& t, Vec3& b) {
    t = std::abs(n.x) > 0.9f ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    t = normalize(t - n * dot(t, n));
    b = cross(n, t);
}

struct PassRunner {
    const Scene& scene;
    const Bvh& bvh;
    const RenderConfig& cfg;
    KeyMethod method;
    const SortPlan& plan;
    const PassSink& sink;
    const KeyContext& ctx;
    LengthHashTable* table; // non-null only for the adaptive method

    // Canonical-order hits and distances of the latest pass.
    std::vector<HitRecord> hits;
    std::vector<float> distances;

    void run(int bounce, RayKind kind, std::span<const Ray> batch) {
        ReorderReport rep = reorder_pipeline(batch, method, ctx, plan);
        TraceMode mode = kind == RayKind::Shadow ? TraceMode::Any : TraceMode::Closest;
        TraceBatchResult traced = trace_batch(bvh, rep.reordered, mode, cfg.warp_size, cfg.cache);

        double measure = std::numeric_limits<double>::quiet_NaN();
        CoherenceReport coherence;
        bool has_coherence = batch.size() >= 64;
        if (has_coherence) {
            std::vector<Vec3> terms(batch.size());
            for (size_t i = 0; i < batch.size(); ++i)
                terms[i] = termination_from_hit(rep.reordered[i], traced.hits[i], scene.bounds);
            coherence = mean_measure(rep.reordered, terms, 64);
            measure = coherence.mean_area;
        }

        hits.resize(batch.size());
        distances.resize(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) {
            const HitRecord& h = traced.hits[rep.inverse[i]];
            hits[i] = h;
            distances[i] = h.hit ? h.t : -1.0f;
        }

        if (table && (kind != RayKind::Shadow || cfg.estimator.accumulate_shadow)) {
            auto t0 = std::chrono::steady_clock::now();
            table_accumulate(*table, batch, distances, ctx);
            rep.accum_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        }

        if (sink) {
            TracePassInfo info;
            info.bounce = bounce;
            info.kind = kind;
            info.rays = batch.size();
            info.batch = batch;
            info.reorder = &rep;
            info.stats = &traced.stats;
            info.coherence = has_coherence ? &coherence : nullptr;
            info.measure = measure;
            sink(info);
        }
    }
};

} // namespace

Vec3 termination_from_hit(const Ray& ray, const HitRecord& hit, const Aabb& scene_box) {
    if (hit.hit) return ray.origin + ray.direction * hit.t;
    auto [t0, t1] = ray_box_range(ray, scene_box);
    if (t0 > t1) return clamp_point(ray.origin, scene_box);
    return ray.origin + ray.direction * t1;
}

Image path_trace_wavefront(const Scene& scene, const Bvh& bvh, const RenderConfig& cfg,
                           KeyMethod method, const SortPlan& plan, const PassSink& sink) {
    if (cfg.width < 1 || cfg.height < 1 || cfg.spp < 1 || cfg.max_bounces < 0)
        throw std::invalid_argument("path_trace_wavefront: bad render config");

    double extent = scene_extent(scene.bounds);
    EstimatorConfig ecfg = cfg.estimator;
    ecfg.scene_extent = extent;

    KeyContext ctx = KeyContext::for_scene(scene.bounds, plan.key_bits);
    LengthHashTable table;
    FixedEstimator fixed_est(ecfg);
    TracedEstimator traced_est(bvh, scene.bounds);
    AdaptiveEstimator adaptive_est(table, ctx);
    LengthHashTable* table_ptr = nullptr;
    switch (method) {
        case KeyMethod::TwoPointFixed: ctx.estimator = &fixed_est; break;
        case KeyMethod::TwoPointAdaptive:
            table.init(ecfg);
            table_ptr = &table;
            ctx.estimator = &adaptive_est;
            break;
        case KeyMethod::TwoPointReal: ctx.estimator = &traced_est; break;
        default: break;
    }

    PassRunner pass{scene, bvh, cfg, method, plan, sink, ctx, table_ptr};

    const size_t n_pixels = size_t(cfg.width) * size_t(cfg.height);
    const float hit_eps = float(1e-4 * extent);
    const double inv_pi = 1.0 / std::numbers::pi;

    Image img;
    img.width = cfg.width;
    img.height = cfg.height;
    img.pixels.assign(n_pixels, 0.0);

    Camera cam = Camera::for_scene(scene, cfg.width, cfg.height);

    // Live paths, canonical order: sample-major, then scanline.
    std::vector<Ray> rays;
    std::vector<uint32_t> path_uid; // sample * n_pixels + pixel
    std::vector<double> throughput;
    rays.reserve(n_pixels * cfg.spp);
    path_uid.reserve(n_pixels * cfg.spp);
    for (int s = 0; s < cfg.spp; ++s)
        for (int py = 0; py < cfg.height; ++py)
            for (int px = 0; px < cfg.width; ++px) {
                uint32_t pix = uint32_t(py) * cfg.width + px;
                uint32_t uid = uint32_t(s) * uint32_t(n_pixels) + pix;
                uint64_t k = rng_key(cfg.seed, kStreamCameraJitter, uid);
                rays.push_back(cam.primary(px, py, cfg.width, cfg.height, rng_float(k, 0),
                                           rng_float(k, 1)));
            }
    path_uid.resize(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) path_uid[i] = uint32_t(i);
    throughput.assign(rays.size(), 1.0);

    std::vector<Ray> shadow_rays;
    std::vector<uint32_t> shadow_pixel;
    std::vector<double> shadow_weight;

    for (int bounce = 0; bounce <= cfg.max_bounces && !rays.empty(); ++bounce) {
        RayKind kind = bounce == 0 ? RayKind::Primary : RayKind::Secondary;
        pass.run(bounce, kind, rays);
        if (cfg.max_bounces == 0) break; // visibility-only mode, no lighting

        // Next-event estimation: two light samples per live hit.
        shadow_rays.clear();
        shadow_pixel.clear();
        shadow_weight.clear();
        std::vector<Ray> next_rays;
        std::vector<uint32_t> next_uid;
        std::vector<double> next_throughput;

        for (size_t i = 0; i < rays.size(); ++i) {
            const HitRecord& h = pass.hits[i];
            if (!h.hit) continue;
            uint32_t uid = path_uid[i];
            uint32_t pix = uid % uint32_t(n_pixels);
            Vec3 x = rays[i].origin + rays[i].direction * h.t;
            Vec3 n = oriented_normal(bvh.triangles[h.triangle], rays[i].direction);
            Vec3 so = x + n * hit_eps;

            uint64_t lk = rng_key(cfg.seed, kStreamLightSample, uid, uint64_t(bounce));
            for (int j = 0; j < 2; ++j) {
                Vec3 y = scene.light.sample(rng_double(lk, 2 * j), rng_double(lk, 2 * j + 1));
                Vec3 wi = y - so;
                double d2 = double(dot(wi, wi));
                double d = std::sqrt(d2);
                double weight = 0.0;
                Vec3 dir{0, 1, 0};
                float stmax = hit_eps;
                if (d > 1e-12) {
                    dir = wi / float(d);
                    stmax = float(d) * (1.0f - 1e-3f);
                    double cos_s = double(dot(n, dir));
                    double cos_l = double(dot(scene.light.normal, -dir));
                    if (cos_s > 0.0 && cos_l > 0.0)
                        weight = throughput[i] * cfg.light_emission * cfg.albedo * inv_pi *
                                 cos_s * cos_l * scene.light.area / d2 * 0.5;
                }
                shadow_rays.push_back({so, dir, stmax, RayKind::Shadow});
                shadow_pixel.push_back(pix);
                shadow_weight.push_back(weight);
            }

            if (bounce < cfg.max_bounces) {
                uint64_t sk = rng_key(cfg.seed, kStreamScatter, uid, uint64_t(bounce));
                double u1 = rng_double(sk, 0), u2 = rng_double(sk, 1);
                double r = std::sqrt(u1), phi = 2.0 * std::numbers::pi * u2;
                Vec3 t, b;
                basis(n, t, b);
                Vec3 dir = normalize(t * float(r * std::cos(phi)) + b * float(r * std::sin(phi)) +
                                     n * float(std::sqrt(std::max(0.0, 1.0 - u1))));
                next_rays.push_back(
                    {so, dir, std::numeric_limits<float>::infinity(), RayKind::Secondary});
                next_uid.push_back(uid);
                next_throughput.push_back(throughput[i] * cfg.albedo);
            }
        }

        if (!shadow_rays.empty()) {
            pass.run(bounce, RayKind::Shadow, shadow_rays);
            for (size_t i = 0; i < shadow_rays.size(); ++i)
                if (!pass.hits[i].hit) img.pixels[shadow_pixel[i]] += shadow_weight[i];
        }

        rays = std::move(next_rays);
        path_uid = std::move(next_uid);
        throughput = std::move(next_throughput);
    }

    for (double& p : img.pixels) p /= double(cfg.spp);
    return img;
}

void write_ppm(std::ostream& out, const Image& img) {
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (double v : img.pixels) {
        double g = std::pow(std::clamp(v, 0.0, 1.0), 1.0 / 2.2);
        unsigned char byte = (unsigned char)std::lround(g * 255.0);
        unsigned char rgb[3] = {byte, byte, byte};
        out.write(reinterpret_cast<const char*>(rgb), 3);
    }
    if (!out) throw std::runtime_error("write_ppm: write failed");
}

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ppm: cannot open " + path);
    write_ppm(f, img);
}

} // namespace rayorder
