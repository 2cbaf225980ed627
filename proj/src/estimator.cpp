#include "rayorder/estimator.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rayorder {

namespace {
// Dummy length of an untouched cell as a fraction of the largest extent.
constexpr double kDummyRatio = 0.25;
constexpr char kSnapshotMagic[4] = {'L', 'H', 'T', '1'};

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v), (unsigned char)(v >> 8), (unsigned char)(v >> 16),
                          (unsigned char)(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in) {
    uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}
} // namespace

void EstimatorConfig::validate() const {
    if (!(fixed_ratio > 0.0) || fixed_ratio > 1.0)
        throw std::invalid_argument("EstimatorConfig: fixed_ratio must be in (0, 1]");
    if (!(scene_extent > 0.0))
        throw std::invalid_argument("EstimatorConfig: scene_extent must be positive");
}

LengthHashTable::LengthHashTable() : cells_(kCellCount) {}

LengthHashTable::LengthHashTable(const EstimatorConfig& cfg) : cells_(kCellCount) { init(cfg); }

void LengthHashTable::init(const EstimatorConfig& cfg) {
    cfg.validate();
    LengthCell dummy{kDummyRatio * cfg.scene_extent, 1};
    cells_.assign(kCellCount, dummy);
}

uint32_t cell_index(const Ray& ray, const KeyContext& ctx) {
    KeyContext narrow = ctx;
    narrow.key_bits = KeyBits::k32;
    return uint32_t(key_aila_compact(ray, narrow) >> 12);
}

Vec3 estimate_fixed(const Ray& ray, const EstimatorConfig& cfg) {
    cfg.validate();
    float len = float(cfg.fixed_ratio * cfg.scene_extent);
    return ray.origin + ray.direction * len;
}

Vec3 estimate_adaptive(const LengthHashTable& table, const Ray& ray, const KeyContext& ctx) {
    const LengthCell& c = table.cell(cell_index(ray, ctx));
    float len = float(c.sum_length / double(c.count));
    return ray.origin + ray.direction * len;
}

void table_accumulate(LengthHashTable& table, std::span<const Ray> rays,
                      std::span<const float> hit_distances, const KeyContext& ctx) {
    if (rays.size() != hit_distances.size())
        throw std::invalid_argument("table_accumulate: ray/distance count mismatch");
    for (size_t i = 0; i < rays.size(); ++i) {
        float d = hit_distances[i];
        if (!std::isfinite(d) || d <= 0.0f) continue;
        LengthCell& c = table.cell(cell_index(rays[i], ctx));
        c.sum_length += double(d);
        c.count += 1;
    }
}

Vec3 terminate_real(const Ray& ray, const Bvh& bvh, const Aabb& scene_box) {
    HitRecord h = closest_hit(bvh, ray);
    if (h.hit) return ray.origin + ray.direction * h.t;
    auto [t0, t1] = ray_box_range(ray, scene_box);
    if (t0 > t1) return clamp_point(ray.origin, scene_box);
    return ray.origin + ray.direction * t1; // box exit, already capped at tmax
}

void save_table_snapshot(std::ostream& out, const LengthHashTable& table) {
    out.write(kSnapshotMagic, 4);
    put_u32(out, LengthHashTable::kCellCount);
    for (const LengthCell& c : table.cells()) {
        put_f32(out, float(c.sum_length));
        put_u32(out, c.count);
    }
    if (!out) throw std::runtime_error("save_table_snapshot: write failed");
}

LengthHashTable load_table_snapshot(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSnapshotMagic, 4) != 0)
        throw std::runtime_error("load_table_snapshot: bad magic");
    uint32_t n = get_u32(in);
    if (n != LengthHashTable::kCellCount)
        throw std::runtime_error("load_table_snapshot: unexpected cell count");
    LengthHashTable table;
    for (uint32_t i = 0; i < n; ++i) {
        float sum = get_f32(in);
        uint32_t count = get_u32(in);
        table.cell(i) = {double(sum), count};
    }
    if (!in) throw std::runtime_error("load_table_snapshot: truncated snapshot");
    return table;
}

void save_table_snapshot(const std::string& path, const LengthHashTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_table_snapshot: cannot open " + path);
    save_table_snapshot(f, table);
}

LengthHashTable load_table_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_table_snapshot: cannot open " + path);
    return load_table_snapshot(f);
}

} // namespace rayorder
