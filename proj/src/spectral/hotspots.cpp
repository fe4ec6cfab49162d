#include <algorithm>
#include <cmath>
#include <limits>

#include "hotspots/errors.hpp"
#include "hotspots/spectral.hpp"

namespace hotspots {

namespace {

// Connected components of the band nodes; one representative per component
// chosen by `better`.
template <class Better>
std::vector<ExtremalPoint> band_components(const std::vector<int>& band, const TriMesh& mesh, const Eigen::VectorXd& phi,
                                           Better better) {
    std::vector<int> comp(mesh.node_count(), -2);
    for (int i : band) comp[static_cast<std::size_t>(i)] = -1;
    std::vector<ExtremalPoint> reps;
    std::vector<int> stack;
    for (int seed : band) {
        if (comp[static_cast<std::size_t>(seed)] != -1) continue;
        const int id = static_cast<int>(reps.size());
        int best = seed;
        stack.assign(1, seed);
        comp[static_cast<std::size_t>(seed)] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            if (better(phi[v], phi[best])) best = v;
            for (int w : mesh.adjacency()[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(w)] != -1) continue;
                comp[static_cast<std::size_t>(w)] = id;
                stack.push_back(w);
            }
        }
        reps.push_back({mesh.nodes()[static_cast<std::size_t>(best)], phi[best], best});
    }
    return reps;
}

}  // namespace

double interpolate(const Eigen::VectorXd& values, const TriMesh& mesh, Vec2 p) {
    const PointLocation loc = mesh.locate(p);
    const auto& tri = mesh.triangles()[static_cast<std::size_t>(loc.triangle)];
    return loc.bary[0] * values[tri[0]] + loc.bary[1] * values[tri[1]] + loc.bary[2] * values[tri[2]];
}

double evaluate(const EigenPair& pair, const TriMesh& mesh, Vec2 p) { return interpolate(pair.phi, mesh, p); }

HotSpotSet hot_spots(const EigenPair& pair, const TriMesh& mesh, double band_epsilon) {
    if (!(band_epsilon >= 0.0 && band_epsilon <= 0.05)) throw InputError("band_epsilon must lie in [0, 0.05]");
    const Eigen::VectorXd& phi = pair.phi;
    const double vmax = phi.maxCoeff();
    const double vmin = phi.minCoeff();
    const double hi_cut = vmax - band_epsilon * std::abs(vmax);
    const double lo_cut = vmin + band_epsilon * std::abs(vmin);

    HotSpotSet out;
    out.band_epsilon = band_epsilon;
    std::vector<int> top, bottom;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const Vec2 p = mesh.nodes()[static_cast<std::size_t>(i)];
        if (phi[i] >= hi_cut) {
            top.push_back(static_cast<int>(i));
            out.max_band.push_back({p, phi[i], static_cast<int>(i)});
        }
        if (phi[i] <= lo_cut) {
            bottom.push_back(static_cast<int>(i));
            out.min_band.push_back({p, phi[i], static_cast<int>(i)});
        }
    }
    out.maxima = band_components(top, mesh, phi, [](double a, double b) { return a > b; });
    out.minima = band_components(bottom, mesh, phi, [](double a, double b) { return a < b; });
    const auto by_value_desc = [](const ExtremalPoint& a, const ExtremalPoint& b) { return a.value > b.value; };
    std::sort(out.maxima.begin(), out.maxima.end(), by_value_desc);
    std::sort(out.minima.begin(), out.minima.end(), [](const ExtremalPoint& a, const ExtremalPoint& b) { return a.value < b.value; });
    return out;
}

NodalLineReport nodal_line_report(const EigenPair& pair, const TriMesh& mesh) {
    const Eigen::VectorXd& phi = pair.phi;
    const auto& p = mesh.nodes();
    NodalLineReport out;
    out.degenerate = pair.multiplicity_flag;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    for (const auto& tri : mesh.triangles()) {
        std::array<Vec2, 2> seg;
        int found = 0;
        for (int k = 0; k < 3; ++k) {
            const int i = tri[k], j = tri[(k + 1) % 3];
            const bool si = phi[i] >= 0.0, sj = phi[j] >= 0.0;
            if (si == sj) continue;
            const double s = phi[i] / (phi[i] - phi[j]);
            if (found < 2) seg[static_cast<std::size_t>(found)] = p[static_cast<std::size_t>(i)] + (p[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(i)]) * s;
            ++found;
        }
        if (found != 2) continue;
        out.crossing_segments.push_back(seg);
        for (const auto& q : seg) {
            xlo = std::min(xlo, q.x);
            xhi = std::max(xhi, q.x);
        }
    }
    if (out.crossing_segments.empty()) return out;
    out.x_projection_width = xhi - xlo;
    Eigen::Index imax = 0;
    phi.maxCoeff(&imax);
    const double xm = p[static_cast<std::size_t>(imax)].x;
    out.distance_to_max_fiber = xm < xlo ? xlo - xm : (xm > xhi ? xm - xhi : 0.0);
    return out;
}

}  // namespace hotspots
