#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "hotspots/geometry.hpp"
#include "hotspots/stochastic.hpp"

#ifdef HOTSPOTS_HAVE_OPENMP
#include <omp.h>
#endif

namespace hotspots::detail {

using Rng = boost::random::mt19937_64;

/// Half-plane form of a polygon, laid out for the inner loop. Polygons with many
/// edges also get a uniform grid: each cell stores the depth of its center and
/// the edges that can realize the minimum anywhere in the cell.
struct HalfPlanes {
    explicit HalfPlanes(const ConvexDomain& d) : domain(&d) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            nx.push_back(d.normal(i).x);
            ny.push_back(d.normal(i).y);
            off.push_back(d.offset(i));
        }
        if (d.size() > 8) build_grid();
    }

    // Signed distance to the boundary, positive inside.
    double depth(Vec2 p) const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < off.size(); ++i) m = std::min(m, off[i] - (nx[i] * p.x + ny[i] * p.y));
        return m;
    }

    // Outside: the exact (negative) depth. Inside: some r >= 0 such that the
    // disk of radius r around p lies in the domain.
    double clearance(Vec2 p) const {
        if (gx == 0) return depth(p);
        const double fx = (p.x - lo.x) * inv_cell, fy = (p.y - lo.y) * inv_cell;
        if (!(fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(gx) && fy < static_cast<double>(gy))) return depth(p);
        const std::size_t c = static_cast<std::size_t>(fy) * gx + static_cast<std::size_t>(fx);
        const double dx = p.x - centers[c].x, dy = p.y - centers[c].y;
        const double bound = center_depth[c] - std::sqrt(dx * dx + dy * dy);
        if (bound > 0.0) return bound;
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = first[c]; k < first[c + 1]; ++k) {
            const std::size_t i = edges[k];
            m = std::min(m, off[i] - (nx[i] * p.x + ny[i] * p.y));
        }
        return m;
    }

    const ConvexDomain* domain;
    std::vector<double> nx, ny, off;

private:
    void build_grid() {
        lo = domain->min_corner();
        const Vec2 hi = domain->max_corner();
        const double w = hi.x - lo.x, h = hi.y - lo.y;
        const double inrad = inradius_incenter(*domain).radius;
        double cell = std::min(std::sqrt(w * h / (64.0 * static_cast<double>(off.size()))), inrad / 8.0);
        cell = std::max(cell, std::sqrt(w * h / static_cast<double>(1 << 20)));
        inv_cell = 1.0 / cell;
        gx = static_cast<std::size_t>(std::ceil(w * inv_cell)) + 1;
        gy = static_cast<std::size_t>(std::ceil(h * inv_cell)) + 1;
        // depth is 1-Lipschitz, so only edges within 2 half-diagonals of the
        // center's minimum can attain the minimum inside the cell
        const double slack = 2.0 * cell * std::sqrt(0.5);
        first.assign(1, 0);
        for (std::size_t j = 0; j < gy; ++j) {
            for (std::size_t i = 0; i < gx; ++i) {
                const Vec2 c{lo.x + (static_cast<double>(i) + 0.5) * cell, lo.y + (static_cast<double>(j) + 0.5) * cell};
                const double dc = depth(c);
                centers.push_back(c);
                center_depth.push_back(dc);
                for (std::size_t e = 0; e < off.size(); ++e)
                    if (off[e] - (nx[e] * c.x + ny[e] * c.y) <= dc + slack) edges.push_back(static_cast<std::uint32_t>(e));
                first.push_back(edges.size());
            }
        }
    }

    Vec2 lo;
    double inv_cell = 0.0;
    std::size_t gx = 0, gy = 0;
    std::vector<Vec2> centers;
    std::vector<double> center_depth;
    std::vector<std::size_t> first;
    std::vector<std::uint32_t> edges;
};

/// Euler walk with reflection. Each increment is the sum of `substeps` draws of
/// standard deviation `sigma`. `observe(step_index, from, to)` returns true to stop.
template <class Observer>
Vec2 walk_path(const HalfPlanes& hp, Vec2 start, std::size_t n_steps, double sigma, Rng& rng, Observer&& observe, int substeps = 1) {
    boost::random::normal_distribution<double> normal(0.0, sigma);
    Vec2 p = start;
    // the disk of radius `reach` around `anchor` lies inside the domain
    Vec2 anchor = p;
    double reach = std::max(hp.clearance(p), 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        Vec2 step{normal(rng), normal(rng)};
        for (int s = 1; s < substeps; ++s) step += Vec2{normal(rng), normal(rng)};
        Vec2 q = p + step;
        const double ax = q.x - anchor.x, ay = q.y - anchor.y;
        if (ax * ax + ay * ay >= reach * reach) {
            const double d = hp.clearance(q);
            if (d < 0.0) {
                q = reflect_into(*hp.domain, p, q);
                reach = std::max(hp.clearance(q), 0.0);
            } else {
                reach = d;
            }
            anchor = q;
        }
        const Vec2 from = p;
        p = q;
        if (observe(k, from, p)) break;
    }
    return p;
}

/// Runs fn(i) for every path index, serially or across OpenMP workers. Paths
/// write only to their own slots, so results do not depend on the backend.
template <class Fn>
void for_each_path(std::size_t n, Backend backend, Fn&& fn) {
#ifdef HOTSPOTS_HAVE_OPENMP
    if (backend == Backend::openmp) {
        const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
        for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)backend;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

struct StepPlan {
    std::size_t n_steps;
    double dt;
};

inline StepPlan plan_steps(double t, double dt) {
    if (t <= 0.0) return {0, dt};
    const auto n = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    return {n, t / static_cast<double>(n)};
}

}  // namespace hotspots::detail
