#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rayorder/geom.hpp"
#include "rayorder/tracer.hpp"

namespace rayorder {

/// Rectangular area emitter. Kept out of the triangle list: it lights the
/// scene through next-event estimation only.
struct LightRect {
    Vec3 corner;   // one corner of the rectangle
    Vec3 edge_u;   // full edge vectors
    Vec3 edge_v;
    Vec3 normal;
    double area = 0.0;

    Vec3 sample(double u, double v) const {
        return corner + edge_u * float(u) + edge_v * float(v);
    }
};

struct Scene {
    std::string name;
    std::vector<Triangle> triangles;
    Aabb bounds;
    LightRect light;
};

/// Triangles from a Wavefront OBJ file: v and f records, faces fan-
/// triangulated, negative indices resolved, everything else skipped.
/// Degenerate (zero-area) triangles are dropped. Parse errors carry the
/// 1-based line number.
std::vector<Triangle> load_obj(const std::string& path);

/// Closed box populated with `complexity` random boxes and spheres, plus a
/// ceiling light patch sized light_ratio * extent. Same seed, same scene.
Scene gen_procedural_scene(uint64_t seed, int complexity, double light_ratio = 0.05);

/// "procedural:N" or a path to an .obj file. OBJ scenes get the default
/// ceiling light fitted to their bounds.
Scene make_scene(const std::string& spec, uint64_t seed, double light_ratio = 0.05);

} // namespace rayorder
