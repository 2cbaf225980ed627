#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rayorder/geom.hpp"
#include "rayorder/keys.hpp"
#include "rayorder/tracer.hpp"

namespace rayorder {

struct EstimatorConfig {
    double fixed_ratio = 0.25; // fraction of the largest scene extent, sensible range 0.2..0.3
    double scene_extent = 0.0;
    bool accumulate_shadow = true; // shadow-ray lengths also feed the hash table

    void validate() const;
};

struct LengthCell {
    double sum_length = 0.0;
    uint32_t count = 0;
};

/// Ray-indexed average-length table: 2^20 cells addressed by the top 20 bits
/// of the compact origin+direction key, i.e. rays from the same coarse cell
/// share one running mean. Fresh cells hold a dummy entry of 0.25 * extent so
/// lookups never divide by zero and start at the fixed heuristic.
class LengthHashTable {
  public:
    static constexpr uint32_t kCellCount = 1u << 20;

    LengthHashTable(); // zeroed; call init() before use
    explicit LengthHashTable(const EstimatorConfig& cfg);

    void init(const EstimatorConfig& cfg);
    const LengthCell& cell(uint32_t index) const { return cells_[index]; }
    LengthCell& cell(uint32_t index) { return cells_[index]; }
    std::span<const LengthCell> cells() const { return cells_; }

  private:
    std::vector<LengthCell> cells_;
};

/// Table cell for a ray: top 20 bits of its 32-bit compact key. Independent
/// of ctx.key_bits.
uint32_t cell_index(const Ray& ray, const KeyContext& ctx);

/// origin + direction * (fixed_ratio * scene_extent)
Vec3 estimate_fixed(const Ray& ray, const EstimatorConfig& cfg);

/// origin + direction * cell mean length
Vec3 estimate_adaptive(const LengthHashTable& table, const Ray& ray, const KeyContext& ctx);

/// Add observed hit distances to the matching cells. Entries that are
/// non-finite or <= 0 are misses and leave the table untouched.
void table_accumulate(LengthHashTable& table, std::span<const Ray> rays,
                      std::span<const float> hit_distances, const KeyContext& ctx);

/// Traced termination: the hit point, or where the ray leaves the scene box
/// (capped at tmax) when it misses.
Vec3 terminate_real(const Ray& ray, const Bvh& bvh, const Aabb& scene_box);

// Table snapshot: "LHT1", u32 cell count, then per cell f32 sum + u32 count,
// all little-endian.
void save_table_snapshot(std::ostream& out, const LengthHashTable& table);
LengthHashTable load_table_snapshot(std::istream& in);
void save_table_snapshot(const std::string& path, const LengthHashTable& table);
LengthHashTable load_table_snapshot(const std::string& path);

enum class EstimatorKind { Fixed, Adaptive, Real };

struct TerminationEstimate {
    Vec3 point;
    EstimatorKind kind = EstimatorKind::Fixed;
};

class FixedEstimator final : public TerminationEstimator {
  public:
    explicit FixedEstimator(const EstimatorConfig& cfg) : cfg_(cfg) { cfg.validate(); }
    Vec3 termination(const Ray& ray) const override { return estimate_fixed(ray, cfg_); }

  private:
    EstimatorConfig cfg_;
};

class AdaptiveEstimator final : public TerminationEstimator {
  public:
    AdaptiveEstimator(const LengthHashTable& table, const KeyContext& ctx)
        : table_(&table), ctx_(ctx) {}
    Vec3 termination(const Ray& ray) const override {
        return estimate_adaptive(*table_, ray, ctx_);
    }

  private:
    const LengthHashTable* table_;
    KeyContext ctx_;
};

class TracedEstimator final : public TerminationEstimator {
  public:
    TracedEstimator(const Bvh& bvh, const Aabb& scene_box) : bvh_(&bvh), box_(scene_box) {}
    Vec3 termination(const Ray& ray) const override { return terminate_real(ray, *bvh_, box_); }
    bool traced() const override { return true; }

  private:
    const Bvh* bvh_;
    Aabb box_;
};

} // namespace rayorder
