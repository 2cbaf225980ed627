#include "rayorder/io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rayorder {

namespace {
constexpr char kMagic[4] = {'R', 'A', 'Y', 'S'};

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

void write_ray_dump(std::ostream& out, std::span<const Ray> rays) {
    out.write(kMagic, 4);
    put_u32(out, uint32_t(rays.size()));
    for (const Ray& r : rays) {
        put_f32(out, r.origin.x);
        put_f32(out, r.origin.y);
        put_f32(out, r.origin.z);
        put_f32(out, r.direction.x);
        put_f32(out, r.direction.y);
        put_f32(out, r.direction.z);
        put_f32(out, r.tmax);
        put_u32(out, uint32_t(r.kind));
    }
    if (!out) throw std::runtime_error("write_ray_dump: write failed");
}

std::vector<Ray> read_ray_dump(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_ray_dump: bad magic");
    uint32_t n = get_u32(in);
    std::vector<Ray> rays(n);
    for (uint32_t i = 0; i < n; ++i) {
        Ray& r = rays[i];
        r.origin = {get_f32(in), get_f32(in), get_f32(in)};
        r.direction = {get_f32(in), get_f32(in), get_f32(in)};
        r.tmax = get_f32(in);
        uint32_t kind = get_u32(in);
        if (kind > 2) throw std::runtime_error("read_ray_dump: bad ray kind");
        r.kind = RayKind(kind);
    }
    if (!in) throw std::runtime_error("read_ray_dump: truncated dump");
    return rays;
}

void write_ray_dump(const std::string& path, std::span<const Ray> rays) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ray_dump: cannot open " + path);
    write_ray_dump(f, rays);
}

std::vector<Ray> read_ray_dump(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_ray_dump: cannot open " + path);
    return read_ray_dump(f);
}

} // namespace rayorder
