#pragma once

// Brute-force oracles and generators shared by the unit tests. Nothing here
// calls into the code paths it is used to check.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hotspots/geometry.hpp"

namespace hotspots::testing {

inline double brute_force_diameter(const ConvexDomain& d) {
    double best = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) best = std::max(best, distance(d.vertex(i), d.vertex(j)));
    return best;
}

/// Convex hull of up to `max_points` random points from a random box shape.
inline ConvexDomain random_convex(std::mt19937_64& rng, int max_points, double max_aspect = 10.0) {
    std::uniform_int_distribution<int> np(3, max_points);
    std::uniform_real_distribution<double> asp(1.0, max_aspect);
    const double length = asp(rng);
    for (;;) {
        const int n = np(rng);
        std::uniform_real_distribution<double> ux(0.0, length), uy(0.0, 1.0);
        std::vector<Vec2> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = {ux(rng), uy(rng)};
        auto hull = convex_hull(pts);
        if (hull.size() < 3) continue;
        try {
            return ConvexDomain(hull);
        } catch (const std::exception&) {
            // nearly collinear draw; try again
        }
    }
}

/// Monte Carlo area of {p in d : |p - c| <= r} by rejection from the bounding box.
struct McArea {
    double value;
    double stderr_;
};

inline McArea monte_carlo_ball_area(const ConvexDomain& d, Vec2 c, double r, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Vec2 lo = d.min_corner(), hi = d.max_corner();
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 p{ux(rng), uy(rng)};
        if (norm2(p - c) <= r * r && d.contains(p, 0.0)) ++hits;
    }
    const double box = (hi.x - lo.x) * (hi.y - lo.y);
    const double f = static_cast<double>(hits) / static_cast<double>(n);
    return {f * box, box * std::sqrt(f * (1.0 - f) / static_cast<double>(n))};
}

/// Reflected (Neumann) heat kernel on [0, L] for generator d^2/dx^2:
/// (1/L) [1 + 2 sum_k e^{-k^2 pi^2 t / L^2} cos(k pi a / L) cos(k pi b / L)].
inline double neumann_kernel_1d(double t, double L, double a, double b) {
    const double pi = std::numbers::pi;
    double s = 1.0;
    for (int k = 1; k < 100000; ++k) {
        const double w = std::exp(-k * k * pi * pi * t / (L * L));
        if (w < 1e-17) break;
        s += 2.0 * w * std::cos(k * pi * a / L) * std::cos(k * pi * b / L);
    }
    return s / L;
}

/// CDF in b of the kernel above.
inline double neumann_cdf_1d(double t, double L, double a, double b) {
    const double pi = std::numbers::pi;
    double s = b / L;
    for (int k = 1; k < 100000; ++k) {
        const double w = std::exp(-k * k * pi * pi * t / (L * L));
        if (w < 1e-17) break;
        s += 2.0 * w * std::cos(k * pi * a / L) * std::sin(k * pi * b / L) / (k * pi);
    }
    return s;
}

/// Heat kernel of the axis-aligned [0, L] x [0, H] rectangle.
inline double rectangle_kernel(double t, double L, double H, Vec2 x, Vec2 z) {
    return neumann_kernel_1d(t, L, x.x, z.x) * neumann_kernel_1d(t, H, x.y, z.y);
}

/// Mean of f over triangle (a, b, c): centroid rule on a 4^levels subdivision.
inline double triangle_mean(const std::function<double(Vec2)>& f, Vec2 a, Vec2 b, Vec2 c, int levels = 3) {
    if (levels == 0) return f((a + b + c) / 3.0);
    const Vec2 ab = (a + b) / 2.0, bc = (b + c) / 2.0, ca = (c + a) / 2.0;
    return 0.25 * (triangle_mean(f, a, ab, ca, levels - 1) + triangle_mean(f, ab, b, bc, levels - 1) +
                   triangle_mean(f, ca, bc, c, levels - 1) + triangle_mean(f, ab, bc, ca, levels - 1));
}

/// Upper `alpha` point of the chi-square distribution.
inline double chi_square_critical(int df, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), alpha));
}

}  // namespace hotspots::testing
