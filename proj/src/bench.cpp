#include "rayorder/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rayorder/coherence.hpp"

namespace rayorder {

const char* to_string(RayKind k) {
    switch (k) {
        case RayKind::Primary: return "primary";
        case RayKind::Secondary: return "secondary";
        case RayKind::Shadow: return "shadow";
    }
    return "?";
}

namespace {

/// File-name-safe variant of a scene spec ("procedural:500" etc).
std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fmt_ms(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fmt_metric(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct BaselineKey {
    std::string scene;
    int bounce;
    RayKind kind;
    bool operator<(const BaselineKey& o) const {
        return std::tie(scene, bounce, kind) < std::tie(o.scene, o.bounce, o.kind);
    }
};

} // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
    std::vector<KeyMethod> methods = cfg.methods;
    if (methods.empty())
        methods.assign(all_key_methods().begin(), all_key_methods().end());
    // Unsorted is the baseline and always runs first.
    std::erase(methods, KeyMethod::Unsorted);
    methods.insert(methods.begin(), KeyMethod::Unsorted);

    if (cfg.scenes.empty())
        throw std::invalid_argument("run_benchmark: no scenes");

    BenchResult result;
    std::map<BaselineKey, BenchRow> baselines;

    for (const std::string& scene_spec : cfg.scenes) {
        Scene scene = make_scene(scene_spec, cfg.render.seed, cfg.render.light_ratio);
        Bvh bvh = build_bvh(scene.triangles);

        for (KeyMethod method : methods) {
            std::vector<BenchRow> method_rows;
            CoherenceReport last_secondary_capsules;
            bool have_capsules = false;

            PassSink sink = [&](const TracePassInfo& info) {
                BenchRow row;
                row.scene = scene.name;
                row.method = method;
                row.bounce = info.bounce;
                row.kind = info.kind;
                row.rays = info.rays;
                row.code_ms = info.reorder->code_ms;
                row.sort_ms = info.reorder->sort_ms;
                row.reorder_ms = info.reorder->reorder_ms;
                row.accum_ms = info.reorder->accum_ms;
                row.pretrace_ms = info.reorder->pretrace_ms;
                row.trace_ms = info.stats->wall_ms;
                row.node_visits = info.stats->node_visits;
                row.triangle_tests = info.stats->triangle_tests;
                row.warp_efficiency = info.stats->warp_eff;
                row.cache_hit_rate = info.stats->cache_hit_rate;
                row.sim_cost = info.stats->sim_cost;
                row.measure = info.measure;
                method_rows.push_back(std::move(row));
                if (info.kind == RayKind::Secondary && info.coherence) {
                    last_secondary_capsules = *info.coherence;
                    have_capsules = true;
                }
            };

            Image img =
                path_trace_wavefront(scene, bvh, cfg.render, method, cfg.plan, sink);
            result.images[scene.name + "/" + to_string(method)] = std::move(img);

            for (BenchRow& row : method_rows) {
                BaselineKey key{row.scene, row.bounce, row.kind};
                if (method == KeyMethod::Unsorted) {
                    baselines[key] = row;
                } else {
                    auto it = baselines.find(key);
                    if (it != baselines.end()) {
                        const BenchRow& base = it->second;
                        if (std::isfinite(row.measure) && std::isfinite(base.measure) &&
                            base.measure != 0.0)
                            row.rel_measure = row.measure / base.measure;
                        if (base.sim_cost != 0.0) row.rel_sim_cost = row.sim_cost / base.sim_cost;
                        if (base.trace_ms != 0.0) row.rel_trace_ms = row.trace_ms / base.trace_ms;
                    }
                }
                result.rows.push_back(std::move(row));
            }

            if (!cfg.capsule_csv_prefix.empty() && have_capsules) {
                std::string path = cfg.capsule_csv_prefix + "_" + sanitize(scene.name) +
                                   "_" + to_string(method) + ".csv";
                std::ofstream out(path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open " + path);
                write_capsule_csv(out, last_secondary_capsules);
            }
        }
    }
    return result;
}

std::string bench_csv_header() {
    return "scene,method,bounce,kind,rays,code_ms,sort_ms,reorder_ms,accum_ms,"
           "total_overhead_ms,pretrace_ms,trace_ms,node_visits,triangle_tests,"
           "warp_efficiency,cache_hit_rate,sim_cost,measure_cps64,rel_measure,"
           "rel_sim_cost,rel_trace_ms";
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
    out << bench_csv_header() << "\n";
    for (const BenchRow& r : rows) {
        out << csv_escape(r.scene) << ',' << to_string(r.method) << ',' << r.bounce << ','
            << to_string(r.kind) << ',' << r.rays << ',' << fmt_ms(r.code_ms) << ','
            << fmt_ms(r.sort_ms) << ',' << fmt_ms(r.reorder_ms) << ',' << fmt_ms(r.accum_ms)
            << ',' << fmt_ms(r.total_overhead_ms()) << ',' << fmt_ms(r.pretrace_ms) << ','
            << fmt_ms(r.trace_ms) << ',' << r.node_visits << ',' << r.triangle_tests << ','
            << fmt_metric(r.warp_efficiency) << ',' << fmt_metric(r.cache_hit_rate) << ','
            << fmt_metric(r.sim_cost) << ',' << fmt_metric(r.measure) << ','
            << fmt_metric(r.rel_measure) << ',' << fmt_metric(r.rel_sim_cost) << ','
            << fmt_metric(r.rel_trace_ms) << "\n";
    }
}

std::vector<CorrelationRow> correlate_report(std::span<const BenchRow> rows) {
    struct Series {
        std::vector<double> m, cost, wall;
    };
    std::map<std::pair<std::string, RayKind>, Series> groups;
    for (const BenchRow& r : rows) {
        if (r.method == KeyMethod::Unsorted) continue;
        if (r.kind == RayKind::Primary) continue;
        if (!std::isfinite(r.measure)) continue;
        for (std::string scope : {std::string("overall"), r.scene}) {
            Series& s = groups[{scope, r.kind}];
            s.m.push_back(r.rel_measure);
            s.cost.push_back(r.rel_sim_cost);
            s.wall.push_back(r.rel_trace_ms);
        }
    }

    std::vector<CorrelationRow> out;
    for (auto& [key, s] : groups) {
        CorrelationRow row;
        row.scope = key.first;
        row.kind = key.second;
        row.points = s.m.size();
        // Degenerate series (too short, zero variance) report NaN so a
        // threshold check on the correlation can never pass by accident.
        auto safe = [](const std::vector<double>& a, const std::vector<double>& b) {
            try {
                return pearson(a, b);
            } catch (const std::invalid_argument&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        };
        row.r_sim_cost = safe(s.m, s.cost);
        row.r_trace_ms = safe(s.m, s.wall);
        out.push_back(std::move(row));
    }
    // "overall" scopes first, then scenes alphabetically.
    std::stable_sort(out.begin(), out.end(), [](const CorrelationRow& a, const CorrelationRow& b) {
        bool ao = a.scope == "overall", bo = b.scope == "overall";
        if (ao != bo) return ao;
        if (a.scope != b.scope) return a.scope < b.scope;
        return int(a.kind) < int(b.kind);
    });
    return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows) {
    out << "scope,kind,points,r_sim_cost,r_trace_ms\n";
    for (const CorrelationRow& r : rows)
        out << csv_escape(r.scope) << ',' << to_string(r.kind) << ',' << r.points << ','
            << fmt_metric(r.r_sim_cost) << ',' << fmt_metric(r.r_trace_ms) << "\n";
}

} // namespace rayorder
