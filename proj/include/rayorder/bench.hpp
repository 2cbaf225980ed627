#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rayorder/pathtrace.hpp"

namespace rayorder {

/// One trace pass of the benchmark grid.
struct BenchRow {
    std::string scene;
    KeyMethod method = KeyMethod::Unsorted;
    int bounce = 0;
    RayKind kind = RayKind::Primary;
    uint64_t rays = 0;

    double code_ms = 0, sort_ms = 0, reorder_ms = 0, accum_ms = 0;
    double pretrace_ms = 0;
    double trace_ms = 0;

    uint64_t node_visits = 0;
    uint64_t triangle_tests = 0;
    double warp_efficiency = 1.0;
    double cache_hit_rate = 1.0;
    double sim_cost = 0.0;
    double measure = 0.0; // mean capsule area over 64-ray subsets, NaN when undefined

    double rel_measure = 1.0; // vs the unsorted row of the same scene/bounce/kind
    double rel_sim_cost = 1.0;
    double rel_trace_ms = 1.0;

    double total_overhead_ms() const { return code_ms + sort_ms + reorder_ms + accum_ms; }
};

struct BenchConfig {
    RenderConfig render;
    SortPlan plan;
    std::vector<KeyMethod> methods; // empty selects all; unsorted is always included
    std::vector<std::string> scenes;
    std::string capsule_csv_prefix; // when set, dump per-method capsule stats
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::map<std::string, Image> images; // "<scene>/<method>"
};

/// Full grid: every scene x method x trace pass. Unsorted runs first per
/// scene and provides the relative baselines.
BenchResult run_benchmark(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
std::string bench_csv_header();

/// Correlation of relative capsule measure against relative trace cost over
/// all sorted rows, overall and per scene, split by ray kind. r_sim_cost uses
/// the deterministic simulated cost, r_trace_ms the measured wall time.
struct CorrelationRow {
    std::string scope; // "overall" or scene name
    RayKind kind = RayKind::Secondary;
    size_t points = 0;
    double r_sim_cost = 0.0;
    double r_trace_ms = 0.0;
};

std::vector<CorrelationRow> correlate_report(std::span<const BenchRow> rows);
void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows);

const char* to_string(RayKind k);

} // namespace rayorder
