#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rayorder/geom.hpp"

namespace rayorder {

// Ray dump: "RAYS", u32 count, then per ray f32 origin xyz, f32 direction
// xyz, f32 tmax, u32 kind, all little-endian.
void write_ray_dump(std::ostream& out, std::span<const Ray> rays);
std::vector<Ray> read_ray_dump(std::istream& in);
void write_ray_dump(const std::string& path, std::span<const Ray> rays);
std::vector<Ray> read_ray_dump(const std::string& path);

} // namespace rayorder
