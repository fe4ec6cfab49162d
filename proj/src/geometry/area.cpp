#include <algorithm>
#include <cmath>
#include <vector>

#include "hotspots/errors.hpp"
#include "hotspots/geometry.hpp"

namespace hotspots {

namespace {

// Signed area of disk(0, r) intersected with the triangle (0, a, b).
double triangle_disk_area(Vec2 a, Vec2 b, double r) {
    const Vec2 e = b - a;
    const double A = norm2(e);
    if (A == 0.0) return 0.0;
    const double B = 2.0 * dot(a, e);
    const double C = norm2(a) - r * r;
    const double disc = B * B - 4.0 * A * C;

    double cuts[4];
    int nc = 0;
    cuts[nc++] = 0.0;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        // Stable roots of A t^2 + B t + C = 0.
        const double q = -0.5 * (B + std::copysign(s, B));
        double t0 = q / A;
        double t1 = q != 0.0 ? C / q : t0;
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > 0.0 && t0 < 1.0) cuts[nc++] = t0;
        if (t1 > 0.0 && t1 < 1.0) cuts[nc++] = t1;
    }
    cuts[nc++] = 1.0;

    double area = 0.0;
    for (int k = 0; k + 1 < nc; ++k) {
        const Vec2 p = a + e * cuts[k];
        const Vec2 q = a + e * cuts[k + 1];
        const Vec2 mid = a + e * (0.5 * (cuts[k] + cuts[k + 1]));
        if (norm2(mid) <= r * r) {
            area += 0.5 * cross(p, q);
        } else {
            area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
        }
    }
    return area;
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n, double c) {
    // keep n . p <= c
    std::vector<Vec2> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % m];
        const double dp = dot(n, p) - c;
        const double dq = dot(n, q) - c;
        if (dp <= 0.0) out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    return out;
}

double polygon_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
    return 0.5 * a;
}

}  // namespace

double ball_volume(const ConvexDomain& d, Vec2 center, double radius) {
    if (!(radius > 0.0)) throw InputError("ball radius must be positive");
    if (!d.contains(center, 1e-9 * d.scale())) throw InputError("ball center lies outside the domain");
    double area = 0.0;
    for (std::size_t i = 0, n = d.size(); i < n; ++i)
        area += triangle_disk_area(d.vertex(i) - center, d.vertex((i + 1) % n) - center, radius);
    return std::max(area, 0.0);
}

double clipped_area(const ConvexDomain& d, Vec2 lo, Vec2 hi) {
    std::vector<Vec2> poly(d.vertices().begin(), d.vertices().end());
    poly = clip_halfplane(poly, {1, 0}, hi.x);
    poly = clip_halfplane(poly, {-1, 0}, -lo.x);
    poly = clip_halfplane(poly, {0, 1}, hi.y);
    poly = clip_halfplane(poly, {0, -1}, -lo.y);
    return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

std::vector<double> equal_area_slabs(const ConvexDomain& d, int k) {
    if (k < 1) throw InputError("slab count must be positive");
    const Vec2 lo = d.min_corner();
    const Vec2 hi = d.max_corner();
    std::vector<double> cuts{lo.x};
    for (int j = 1; j < k; ++j) {
        const double target = d.area() * j / k;
        double a = lo.x, b = hi.x;
        for (int it = 0; it < 200 && b - a > 1e-14 * d.scale(); ++it) {
            const double m = 0.5 * (a + b);
            (clipped_area(d, lo, {m, hi.y}) < target ? a : b) = m;
        }
        cuts.push_back(0.5 * (a + b));
    }
    cuts.push_back(hi.x);
    return cuts;
}

}  // namespace hotspots
