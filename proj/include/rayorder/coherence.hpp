#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rayorder/geom.hpp"

namespace rayorder {

/// Bounding capsule of a ray subset: centroid of the origins, centroid of the
/// termination points, and the mean point-to-axis distance of each end.
struct Capsule {
    Vec3 c_o, c_t;
    double r_o = 0.0, r_t = 0.0;
};

/// Fit a capsule to paired origin/termination points. When the two centroids
/// coincide (no usable axis), both radii collapse to the mean distance of all
/// points to the common centroid, which turns the area formula into a sphere.
Capsule capsule_fit(std::span<const Vec3> origins, std::span<const Vec3> terminations);

/// Lateral cone surface between the end disks plus both end hemispheres:
/// 2*pi*r_o^2 + 2*pi*r_t^2 + pi*(r_o + r_t) * sqrt(h^2 + (r_t - r_o)^2).
double capsule_area(const Capsule& c);

struct CoherenceReport {
    double mean_area = 0.0;
    uint32_t subset_size = 0;
    std::vector<double> subset_areas;
    std::vector<Capsule> capsules;
};

/// Mean capsule area over consecutive subsets of n rays in the given order;
/// a trailing partial subset is dropped. Lower means the rays in each subset
/// stay closer together. Requires at least n rays.
CoherenceReport mean_measure(std::span<const Ray> rays, std::span<const Vec3> terminations,
                             uint32_t n = 64);

/// Sample Pearson correlation; throws when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Element-wise ratio against a baseline series (same length, nonzero base).
std::vector<double> relative_series(std::span<const double> values,
                                    std::span<const double> baseline);

/// One line per subset: id, both centroids, radii, area.
void write_capsule_csv(std::ostream& out, const CoherenceReport& report);

} // namespace rayorder
