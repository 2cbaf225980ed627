#include "rayorder/scene.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rayorder/rng.hpp"

namespace rayorder {

namespace {

bool degenerate(const Triangle& t) {
    Vec3 c = cross(t.v1 - t.v0, t.v2 - t.v0);
    return dot(c, c) <= 0.0f;
}

[[noreturn]] void parse_fail(size_t line_no, const std::string& what) {
    throw std::runtime_error("load_obj: line " + std::to_string(line_no) + ": " + what);
}

void push_box(std::vector<Triangle>& tris, const Vec3& lo, const Vec3& hi) {
    Vec3 v[8] = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                 {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    const int faces[6][4] = {{0, 1, 2, 3}, {5, 4, 7, 6}, {4, 0, 3, 7},
                             {1, 5, 6, 2}, {4, 5, 1, 0}, {3, 2, 6, 7}};
    for (const int* f : faces) {
        tris.push_back({v[f[0]], v[f[1]], v[f[2]]});
        tris.push_back({v[f[0]], v[f[2]], v[f[3]]});
    }
}

void push_sphere(std::vector<Triangle>& tris, const Vec3& center, float radius) {
    constexpr int stacks = 6, slices = 8;
    auto point = [&](int st, int sl) {
        double theta = double(st) / stacks * 3.14159265358979323846;
        double phi = double(sl) / slices * 2.0 * 3.14159265358979323846;
        return center + Vec3{float(std::sin(theta) * std::cos(phi)),
                             float(std::cos(theta)),
                             float(std::sin(theta) * std::sin(phi))} *
                            radius;
    };
    for (int st = 0; st < stacks; ++st)
        for (int sl = 0; sl < slices; ++sl) {
            Vec3 a = point(st, sl), b = point(st + 1, sl);
            Vec3 c = point(st + 1, sl + 1), d = point(st, sl + 1);
            if (st != 0) tris.push_back({a, b, d});
            if (st != stacks - 1) tris.push_back({b, c, d});
        }
}

} // namespace

std::vector<Triangle> load_obj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_obj: cannot open " + path);

    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    std::string line, tok;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        std::istringstream ss(line);
        if (!(ss >> tok) || tok[0] == '#') continue;
        if (tok == "v") {
            float x, y, z;
            if (!(ss >> x >> y >> z)) parse_fail(line_no, "malformed vertex");
            verts.push_back({x, y, z});
        } else if (tok == "f") {
            std::vector<uint32_t> idx;
            std::string ref;
            while (ss >> ref) {
                // "i", "i/t", "i/t/n", "i//n"; only the vertex index matters
                size_t slash = ref.find('/');
                std::string_view head(ref.data(), slash == std::string::npos ? ref.size() : slash);
                long v = 0;
                auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
                if (ec != std::errc() || p != head.data() + head.size() || v == 0)
                    parse_fail(line_no, "malformed face index '" + ref + "'");
                long resolved = v > 0 ? v - 1 : long(verts.size()) + v;
                if (resolved < 0 || size_t(resolved) >= verts.size())
                    parse_fail(line_no, "face index out of range");
                idx.push_back(uint32_t(resolved));
            }
            if (idx.size() < 3) parse_fail(line_no, "face with fewer than 3 vertices");
            for (size_t i = 2; i < idx.size(); ++i) {
                Triangle t{verts[idx[0]], verts[idx[i - 1]], verts[idx[i]]};
                if (!degenerate(t)) tris.push_back(t);
            }
        }
        // vn/vt/usemtl/o/g/s/mtllib are ignored
    }
    if (tris.empty()) throw std::runtime_error("load_obj: no triangles in " + path);
    return tris;
}

Scene gen_procedural_scene(uint64_t seed, int complexity, double light_ratio) {
    if (complexity < 1)
        throw std::invalid_argument("gen_procedural_scene: complexity must be >= 1");
    if (!(light_ratio > 0.0) || light_ratio >= 1.0)
        throw std::invalid_argument("gen_procedural_scene: light_ratio must be in (0, 1)");

    constexpr float E = 2.0f; // room edge length
    Scene scene;
    scene.name = "procedural:" + std::to_string(complexity);
    push_box(scene.triangles, {0, 0, 0}, {E, E, E}); // closed room, walls visible from inside

    for (int i = 0; i < complexity; ++i) {
        uint64_t k = rng_key(seed, kStreamScene, uint64_t(i));
        auto draw = [&](uint64_t c, float lo, float hi) {
            return lo + float(rng_double(k, c)) * (hi - lo);
        };
        Vec3 center{draw(0, 0.12f * E, 0.88f * E), draw(1, 0.12f * E, 0.88f * E),
                    draw(2, 0.12f * E, 0.88f * E)};
        float size = draw(3, 0.02f * E, 0.07f * E);
        if (i % 2 == 0) {
            Vec3 half{size * draw(4, 0.6f, 1.4f), size * draw(5, 0.6f, 1.4f),
                      size * draw(6, 0.6f, 1.4f)};
            push_box(scene.triangles, center - half, center + half);
        } else {
            push_sphere(scene.triangles, center, size);
        }
    }

    for (const Triangle& t : scene.triangles) scene.bounds.extend(t.bounds());

    float side = float(light_ratio) * E;
    float y = E * (1.0f - 1e-3f);
    scene.light.corner = {E * 0.5f - side * 0.5f, y, E * 0.5f - side * 0.5f};
    scene.light.edge_u = {side, 0, 0};
    scene.light.edge_v = {0, 0, side};
    scene.light.normal = {0, -1, 0};
    scene.light.area = double(side) * double(side);
    return scene;
}

Scene make_scene(const std::string& spec, uint64_t seed, double light_ratio) {
    if (spec.rfind("procedural:", 0) == 0) {
        int complexity = 0;
        std::string num = spec.substr(11);
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), complexity);
        if (ec != std::errc() || p != num.data() + num.size())
            throw std::invalid_argument("make_scene: bad procedural spec '" + spec + "'");
        return gen_procedural_scene(seed, complexity, light_ratio);
    }

    Scene scene;
    scene.name = spec;
    scene.triangles = load_obj(spec);
    for (const Triangle& t : scene.triangles) scene.bounds.extend(t.bounds());

    double e = scene_extent(scene.bounds);
    float side = float(light_ratio * e);
    Vec3 c = scene.bounds.center();
    float y = scene.bounds.max.y - float(1e-3 * e);
    scene.light.corner = {c.x - side * 0.5f, y, c.z - side * 0.5f};
    scene.light.edge_u = {side, 0, 0};
    scene.light.edge_v = {0, 0, side};
    scene.light.normal = {0, -1, 0};
    scene.light.area = double(side) * double(side);
    return scene;
}

} // namespace rayorder
