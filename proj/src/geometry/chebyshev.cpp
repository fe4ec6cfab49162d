#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hotspots/errors.hpp"
#include "hotspots/geometry.hpp"

namespace hotspots {

namespace {

// Dense tableau simplex for
//   maximize r  subject to  n_i . d + r <= beta_i,  d free, r >= 0,
// with beta_i > 0 so the slack basis is feasible. Free d is split into
// d+ - d-. Bland's rule keeps degenerate polygons (rectangles) from cycling.
struct ChebyshevSimplex {
    std::size_t m;
    std::size_t cols;  // 5 structural + m slack + rhs
    std::vector<double> t;
    std::vector<std::size_t> basis;

    double& at(std::size_t row, std::size_t col) { return t[row * cols + col]; }

    ChebyshevSimplex(std::span<const Vec2> normals, std::span<const double> beta)
        : m(normals.size()), cols(5 + normals.size() + 1), t((m + 1) * cols, 0.0), basis(m) {
        for (std::size_t i = 0; i < m; ++i) {
            at(i, 0) = normals[i].x;
            at(i, 1) = -normals[i].x;
            at(i, 2) = normals[i].y;
            at(i, 3) = -normals[i].y;
            at(i, 4) = 1.0;
            at(i, 5 + i) = 1.0;
            at(i, cols - 1) = beta[i];
            basis[i] = 5 + i;
        }
        at(m, 4) = -1.0;  // objective row holds reduced costs of  -r
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = at(row, col);
        for (std::size_t j = 0; j < cols; ++j) at(row, j) /= p;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) at(i, j) -= f * at(row, j);
        }
        basis[row] = col;
    }

    void solve() {
        constexpr double eps = 1e-12;
        const std::size_t max_pivots = 50 * (m + 5);
        for (std::size_t it = 0; it < max_pivots; ++it) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j + 1 < cols; ++j) {
                if (at(m, j) < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                const double a = at(i, enter);
                if (a <= eps) continue;
                const double ratio = at(i, cols - 1) / a;
                if (leave == m || ratio < best - eps) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + eps && basis[i] < basis[leave]) {
                    leave = i;
                }
            }
            if (leave == m) throw InputError("Chebyshev LP unbounded: polygon is corrupted");
            pivot(leave, enter);
        }
        throw ConvergenceError("Chebyshev LP did not terminate", at(m, cols - 1));
    }

    double value(std::size_t var) const {
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] == var) return t[i * cols + cols - 1];
        return 0.0;
    }
};

}  // namespace

Incircle inradius_incenter(const ConvexDomain& d) {
    const std::size_t m = d.size();
    const Vec2 g = d.centroid();
    std::vector<Vec2> normals(m);
    std::vector<double> beta(m);
    for (std::size_t i = 0; i < m; ++i) {
        normals[i] = d.normal(i);
        beta[i] = d.offset(i) - dot(d.normal(i), g);
        if (!(beta[i] > 0.0)) throw InputError("Chebyshev LP infeasible: centroid outside polygon");
    }
    ChebyshevSimplex lp(normals, beta);
    lp.solve();
    const Vec2 center = g + Vec2{lp.value(0) - lp.value(1), lp.value(2) - lp.value(3)};
    // Report the exact minimum edge distance at the optimum.
    return {d.distance_to_boundary(center), center};
}

}  // namespace hotspots
