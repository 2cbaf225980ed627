// Command line front end: bench / render / keys / sortbench.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rayorder/bench.hpp"
#include "rayorder/io.hpp"
#include "rayorder/parallel.hpp"
#include "rayorder/rng.hpp"

using namespace rayorder;

namespace {

std::vector<KeyMethod> parse_methods(const std::string& list) {
    std::vector<KeyMethod> out;
    if (list == "all") {
        out.assign(all_key_methods().begin(), all_key_methods().end());
        return out;
    }
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto m = parse_key_method(item);
        if (!m) throw CLI::ValidationError("--methods", "unknown method '" + item + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw CLI::ValidationError("--methods", "empty method list");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CLI::RuntimeError("cannot open " + path, 1);
    return out;
}

struct CommonRender {
    std::vector<std::string> scenes;
    std::string methods = "all";
    int key_bits = 32;
    uint32_t segment = 0;
    int spp = 8;
    int bounces = 8;
    int width = 256;
    int height = 256;
    uint64_t seed = 1;
    uint32_t warp = 64;
    int threads = 0;
    double fixed_ratio = 0.25;

    void add_render_flags(CLI::App* cmd) {
        cmd->add_option("--spp", spp, "samples per pixel")->check(CLI::PositiveNumber);
        cmd->add_option("--bounces", bounces, "max bounce count")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--width", width)->check(CLI::PositiveNumber);
        cmd->add_option("--height", height)->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "render seed");
        cmd->add_option("--warp", warp, "warp size")->check(CLI::IsMember({32, 64}));
        cmd->add_option("--threads", threads, "worker threads, 0 = hardware")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--key-bits", key_bits, "key width")->check(CLI::IsMember({32, 64}));
        cmd->add_option("--segment", segment, "segmented sort block size, 0 = global")
            ->check(CLI::IsMember({0, 1024, 2048, 4096}));
        cmd->add_option("--fixed-ratio", fixed_ratio,
                        "fixed estimator ray length as a fraction of scene extent")
            ->check(CLI::PositiveNumber);
    }

    RenderConfig render_config() const {
        RenderConfig rc;
        rc.width = width;
        rc.height = height;
        rc.spp = spp;
        rc.max_bounces = bounces;
        rc.seed = seed;
        rc.warp_size = warp;
        rc.estimator.fixed_ratio = fixed_ratio;
        return rc;
    }

    SortPlan sort_plan() const {
        SortPlan plan;
        plan.segment_size = segment;
        plan.key_bits = key_bits == 64 ? KeyBits::k64 : KeyBits::k32;
        plan.validate();
        return plan;
    }
};

int run_bench(const CommonRender& c, const std::string& out_path,
              const std::string& corr_path, const std::string& capsule_prefix) {
    BenchConfig cfg;
    cfg.render = c.render_config();
    cfg.plan = c.sort_plan();
    cfg.methods = parse_methods(c.methods);
    cfg.scenes = c.scenes;
    cfg.capsule_csv_prefix = capsule_prefix;
    set_worker_threads(c.threads);

    BenchResult result = run_benchmark(cfg);
    if (out_path.empty()) {
        write_bench_csv(std::cout, result.rows);
    } else {
        auto out = open_out(out_path);
        write_bench_csv(out, result.rows);
    }
    if (!corr_path.empty()) {
        auto rows = correlate_report(result.rows);
        auto out = open_out(corr_path);
        write_correlation_csv(out, rows);
    }
    return 0;
}

int run_render(const CommonRender& c, const std::string& method_name,
               const std::string& out_path, const std::string& dump_prefix) {
    auto method = parse_key_method(method_name);
    if (!method) throw CLI::ValidationError("--method", "unknown method '" + method_name + "'");
    set_worker_threads(c.threads);

    Scene scene = make_scene(c.scenes.at(0), c.seed, 0.05);
    Bvh bvh = build_bvh(scene.triangles);
    RenderConfig rc = c.render_config();

    PassSink sink;
    if (!dump_prefix.empty()) {
        sink = [&](const TracePassInfo& info) {
            char name[64];
            std::snprintf(name, sizeof name, "_b%02d_%s.rays", info.bounce,
                          to_string(info.kind));
            write_ray_dump(dump_prefix + name, info.batch);
        };
    }

    Image img = path_trace_wavefront(scene, bvh, rc, *method, c.sort_plan(), sink);
    write_ppm(out_path, img);
    return 0;
}

int run_keys(const std::string& rays_path, const std::string& method_name, int key_bits,
             double fixed_ratio, const std::string& out_path) {
    auto method = parse_key_method(method_name);
    if (!method) throw CLI::ValidationError("--method", "unknown method '" + method_name + "'");
    if (*method == KeyMethod::TwoPointAdaptive || *method == KeyMethod::TwoPointReal)
        throw CLI::ValidationError("--method", "needs scene state; use the bench subcommand");

    std::vector<Ray> rays = read_ray_dump(rays_path);
    Aabb box;
    for (const Ray& r : rays) box.extend(r.origin);
    KeyContext ctx =
        KeyContext::for_scene(box, key_bits == 64 ? KeyBits::k64 : KeyBits::k32);
    EstimatorConfig ecfg;
    ecfg.fixed_ratio = fixed_ratio;
    ecfg.scene_extent = scene_extent(box);
    FixedEstimator fixed(ecfg);
    ctx.estimator = &fixed;

    KeyBatch batch = compute_keys(rays, *method, ctx);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    *out << "index,key\n";
    char line[48];
    for (size_t i = 0; i < batch.keys.size(); ++i) {
        if (key_bits == 64)
            std::snprintf(line, sizeof line, "%zu,%016" PRIx64 "\n", i, batch.keys[i]);
        else
            std::snprintf(line, sizeof line, "%zu,%08" PRIx64 "\n", i, batch.keys[i]);
        *out << line;
    }
    return 0;
}

int run_sortbench(uint64_t n, int key_bits, uint32_t segment, uint64_t seed, int threads) {
    set_worker_threads(threads);
    KeyBits bits = key_bits == 64 ? KeyBits::k64 : KeyBits::k32;
    uint64_t mask = key_bits == 64 ? ~uint64_t(0) : 0xFFFFFFFFu;

    std::vector<KeyIndexPair> pairs(n);
    std::vector<uint64_t> payload(n);
    for (uint64_t i = 0; i < n; ++i) {
        pairs[i] = {rng_u64(rng_key(seed, kStreamWorkload), i) & mask, uint32_t(i)};
        payload[i] = i;
    }
    std::vector<uint32_t> order(n);

    auto t0 = std::chrono::steady_clock::now();
    segmented_sort_pairs(pairs, segment, bits);
    auto t1 = std::chrono::steady_clock::now();
    for (uint64_t i = 0; i < n; ++i) order[i] = pairs[i].index;
    auto [reordered, inverse] = gather_reorder(std::span<const uint64_t>(payload), order);
    auto t2 = std::chrono::steady_clock::now();

    double sort_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    double reorder_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    double mkeys = sort_ms > 0.0 ? double(n) / 1e3 / sort_ms : 0.0;

    std::printf("n,key_bits,segment,sort_ms,reorder_ms,mkeys_per_s\n");
    std::printf("%" PRIu64 ",%d,%u,%.3f,%.3f,%.3f\n", n, key_bits, segment, sort_ms,
                reorder_ms, mkeys);
    // Keep the reorder from being optimized out.
    if (n && reordered[0] == ~uint64_t(0)) std::fputc(' ', stderr);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ray reordering toolkit"};
    app.require_subcommand(1);

    CommonRender c;

    auto* bench = app.add_subcommand("bench", "trace the method grid and emit benchmark CSV");
    std::string bench_out, corr_out, capsule_prefix;
    bench->add_option("--scene", c.scenes, "obj path or procedural:N (repeatable)")
        ->required();
    bench->add_option("--methods", c.methods, "comma list of key methods, or 'all'");
    bench->add_option("--out", bench_out, "benchmark CSV path (default stdout)");
    bench->add_option("--correlations", corr_out, "also write the correlation CSV here");
    bench->add_option("--capsule-csv", capsule_prefix,
                      "dump per-method capsule CSVs with this path prefix");
    c.add_render_flags(bench);

    auto* render = app.add_subcommand("render", "render one scene to a PPM image");
    std::string render_method = "unsorted", render_out = "out.ppm", dump_prefix;
    render->add_option("--scene", c.scenes, "obj path or procedural:N")
        ->required()
        ->expected(1);
    render->add_option("--method", render_method, "reordering method");
    render->add_option("--out", render_out, "output PPM path");
    render->add_option("--dump-rays", dump_prefix, "dump every trace batch with this prefix");
    c.add_render_flags(render);

    auto* keys = app.add_subcommand("keys", "compute sort keys for a ray dump");
    std::string keys_rays, keys_method = "origin", keys_out;
    int keys_bits = 32;
    double keys_ratio = 0.25;
    keys->add_option("--rays", keys_rays, "ray dump file")->required();
    keys->add_option("--method", keys_method, "key method");
    keys->add_option("--key-bits", keys_bits)->check(CLI::IsMember({32, 64}));
    keys->add_option("--fixed-ratio", keys_ratio)->check(CLI::PositiveNumber);
    keys->add_option("--out", keys_out, "CSV path (default stdout)");

    auto* sortbench = app.add_subcommand("sortbench", "time the pair sort on random keys");
    uint64_t sb_n = 1u << 20;
    int sb_bits = 32;
    uint32_t sb_segment = 0;
    uint64_t sb_seed = 1;
    int sb_threads = 0;
    sortbench->add_option("--n", sb_n, "pair count")->check(CLI::PositiveNumber);
    sortbench->add_option("--key-bits", sb_bits)->check(CLI::IsMember({32, 64}));
    sortbench->add_option("--segment", sb_segment, "0 = global");
    sortbench->add_option("--seed", sb_seed);
    sortbench->add_option("--threads", sb_threads)->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return run_bench(c, bench_out, corr_out, capsule_prefix);
        if (render->parsed()) return run_render(c, render_method, render_out, dump_prefix);
        if (keys->parsed())
            return run_keys(keys_rays, keys_method, keys_bits, keys_ratio, keys_out);
        if (sortbench->parsed())
            return run_sortbench(sb_n, sb_bits, sb_segment, sb_seed, sb_threads);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
