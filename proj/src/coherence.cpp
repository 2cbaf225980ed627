#include "rayorder/coherence.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rayorder {

namespace {

struct DVec {
    double x = 0, y = 0, z = 0;
    DVec() = default;
    DVec(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}
    DVec(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    DVec operator-(const DVec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    DVec operator+(const DVec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    DVec operator*(double s) const { return {x * s, y * s, z * s}; }
};

double ddot(const DVec& a, const DVec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double dlen(const DVec& a) { return std::sqrt(ddot(a, a)); }

DVec centroid(std::span<const Vec3> pts) {
    DVec acc;
    for (const Vec3& p : pts) acc = acc + DVec(p);
    return acc * (1.0 / double(pts.size()));
}

double mean_axis_distance(std::span<const Vec3> pts, const DVec& anchor, const DVec& axis_unit) {
    double acc = 0.0;
    for (const Vec3& p : pts) {
        DVec d = DVec(p) - anchor;
        double along = ddot(d, axis_unit);
        DVec radial = d - axis_unit * along;
        acc += dlen(radial);
    }
    return acc / double(pts.size());
}

} // namespace

Capsule capsule_fit(std::span<const Vec3> origins, std::span<const Vec3> terminations) {
    if (origins.empty() || origins.size() != terminations.size())
        throw std::invalid_argument("capsule_fit: need equal, non-empty point sets");

    DVec co = centroid(origins);
    DVec ct = centroid(terminations);

    // Degeneracy threshold scales with the spread of the input points.
    Aabb box;
    for (const Vec3& p : origins) box.extend(p);
    for (const Vec3& p : terminations) box.extend(p);
    Vec3 diag = box.diagonal();
    double spread = std::max({double(diag.x), double(diag.y), double(diag.z), 1e-300});

    Capsule c;
    c.c_o = {float(co.x), float(co.y), float(co.z)};
    c.c_t = {float(ct.x), float(ct.y), float(ct.z)};

    DVec axis = ct - co;
    double h = dlen(axis);
    if (h < 1e-9 * spread) {
        double acc = 0.0;
        for (const Vec3& p : origins) acc += dlen(DVec(p) - co);
        for (const Vec3& p : terminations) acc += dlen(DVec(p) - co);
        double r = acc / double(2 * origins.size());
        c.c_t = c.c_o;
        c.r_o = c.r_t = r;
        return c;
    }
    DVec u = axis * (1.0 / h);
    c.r_o = mean_axis_distance(origins, co, u);
    c.r_t = mean_axis_distance(terminations, co, u);
    return c;
}

double capsule_area(const Capsule& c) {
    const double pi = std::numbers::pi;
    DVec d = DVec(c.c_t) - DVec(c.c_o);
    double h = dlen(d);
    double dr = c.r_t - c.r_o;
    return 2.0 * pi * c.r_o * c.r_o + 2.0 * pi * c.r_t * c.r_t +
           pi * (c.r_o + c.r_t) * std::sqrt(h * h + dr * dr);
}

CoherenceReport mean_measure(std::span<const Ray> rays, std::span<const Vec3> terminations,
                             uint32_t n) {
    if (n == 0) throw std::invalid_argument("mean_measure: subset size must be positive");
    if (rays.size() != terminations.size())
        throw std::invalid_argument("mean_measure: ray/termination count mismatch");
    if (rays.size() < n)
        throw std::invalid_argument("mean_measure: fewer rays than one subset");

    CoherenceReport rep;
    rep.subset_size = n;
    size_t subsets = rays.size() / n;
    std::vector<Vec3> origins(n);
    double acc = 0.0;
    for (size_t s = 0; s < subsets; ++s) {
        for (size_t i = 0; i < n; ++i) origins[i] = rays[s * n + i].origin;
        Capsule c = capsule_fit(origins, terminations.subspan(s * n, n));
        double area = capsule_area(c);
        rep.capsules.push_back(c);
        rep.subset_areas.push_back(area);
        acc += area;
    }
    rep.mean_area = acc / double(subsets);
    return rep;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two same-length series of at least 2 points");
    double n = double(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> relative_series(std::span<const double> values,
                                    std::span<const double> baseline) {
    if (values.size() != baseline.size())
        throw std::invalid_argument("relative_series: length mismatch");
    std::vector<double> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        if (baseline[i] == 0.0)
            throw std::invalid_argument("relative_series: zero baseline entry");
        out[i] = values[i] / baseline[i];
    }
    return out;
}

void write_capsule_csv(std::ostream& out, const CoherenceReport& report) {
    out << "subset,c_o_x,c_o_y,c_o_z,c_t_x,c_t_y,c_t_z,r_o,r_t,area\n";
    char line[320];
    for (size_t i = 0; i < report.capsules.size(); ++i) {
        const Capsule& c = report.capsules[i];
        std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", i,
                      double(c.c_o.x), double(c.c_o.y), double(c.c_o.z), double(c.c_t.x),
                      double(c.c_t.y), double(c.c_t.z), c.r_o, c.r_t, report.subset_areas[i]);
        out << line;
    }
}

} // namespace rayorder
