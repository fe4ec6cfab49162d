#include <cmath>
#include <limits>
#include <numbers>

#include "hotspots/geometry.hpp"

namespace hotspots {

namespace {

double wrap_half_turn(double a) {
    // into (-pi/2, pi/2]
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, pi);
    if (a <= -0.5 * pi) a += pi;
    return a;
}

}  // namespace

std::pair<ConvexDomain, NormalizationReport> normalize(const ConvexDomain& d) {
    const std::size_t n = d.size();
    const WidthResult wmin = minimal_width(d);

    // Among edges achieving the minimal width, prefer the smallest rotation.
    double rotation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double depth = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            depth = std::max(depth, d.offset(i) - dot(d.normal(i), d.vertex(j)));
        if (depth > wmin.width * (1.0 + 1e-12)) continue;
        const Vec2 e = d.vertex((i + 1) % n) - d.vertex(i);
        const double cand = wrap_half_turn(-std::atan2(e.y, e.x));
        if (std::abs(cand) < std::abs(rotation) - 1e-15) rotation = cand;
    }

    if (!std::isfinite(rotation)) {
        const Vec2 e = d.vertex((static_cast<std::size_t>(wmin.edge) + 1) % n) - d.vertex(static_cast<std::size_t>(wmin.edge));
        rotation = wrap_half_turn(-std::atan2(e.y, e.x));
    }

    const double inrad = inradius_incenter(d).radius;
    const double scale = 1.0 / inrad;

    std::vector<Vec2> v;
    v.reserve(n);
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& p : d.vertices()) {
        const Vec2 q = rotate(p, rotation) * scale;
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        v.push_back(q);
    }
    for (auto& q : v) q -= lo;

    ConvexDomain out(std::move(v), d.provenance());
    NormalizationReport r;
    r.rotation_angle = rotation;
    r.scale = scale;
    r.translation = -lo;
    const Incircle ic = inradius_incenter(out);
    r.inradius = ic.radius;
    r.incenter = ic.center;
    r.diameter = diameter(out).length;
    r.aspect_N = r.diameter / r.inradius;
    r.width_y = out.max_corner().y - out.min_corner().y;
    r.length_x = out.max_corner().x - out.min_corner().x;
    return {std::move(out), r};
}

Vec2 apply_normalization(const NormalizationReport& r, Vec2 p) {
    return rotate(p, r.rotation_angle) * r.scale + r.translation;
}

}  // namespace hotspots
