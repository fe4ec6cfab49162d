#include <algorithm>
#include <cmath>
#include <limits>

#include "hotspots/errors.hpp"
#include "hotspots/geometry.hpp"

namespace hotspots {

namespace {

// Distance of vertex j from the supporting line of edge i (non-negative for convex input).
double edge_depth(const ConvexDomain& d, std::size_t i, std::size_t j) {
    return d.offset(i) - dot(d.normal(i), d.vertex(j));
}

}  // namespace

DiameterPair diameter(const ConvexDomain& d) {
    const std::size_t n = d.size();
    DiameterPair best;
    auto consider = [&](std::size_t i, std::size_t j) {
        const double len = distance(d.vertex(i), d.vertex(j));
        if (len > best.length) {
            best = {d.vertex(i), d.vertex(j), len, static_cast<int>(std::min(i, j)),
                    static_cast<int>(std::max(i, j))};
            if (best.index_a != static_cast<int>(i)) std::swap(best.a, best.b);
        }
    };
    // Antipodal vertices of edge i are those farthest from its line; they advance monotonically.
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ni = (i + 1) % n;
        while (edge_depth(d, i, (j + 1) % n) > edge_depth(d, i, j)) j = (j + 1) % n;
        consider(i, j);
        consider(ni, j);
        // Parallel supporting lines: the next vertex is antipodal as well.
        const std::size_t nj = (j + 1) % n;
        if (edge_depth(d, i, nj) >= edge_depth(d, i, j) * (1.0 - 1e-14)) {
            consider(i, nj);
            consider(ni, nj);
        }
    }
    return best;
}

WidthResult minimal_width(const ConvexDomain& d) {
    const std::size_t n = d.size();
    WidthResult best{std::numeric_limits<double>::infinity(), -1};
    std::size_t j = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (edge_depth(d, 0, k) > edge_depth(d, 0, j)) j = k;
    for (std::size_t i = 0; i < n; ++i) {
        while (edge_depth(d, i, (j + 1) % n) >= edge_depth(d, i, j) && (j + 1) % n != i)
            j = (j + 1) % n;
        const double w = edge_depth(d, i, j);
        if (w < best.width) best = {w, static_cast<int>(i)};
    }
    return best;
}

DiameterPairSet all_diameter_pairs(const ConvexDomain& d, double rel_tol) {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) throw InputError("rel_tol must lie in (0, 1e-3]");
    const DiameterPair diam = diameter(d);
    const double threshold = (1.0 - rel_tol) * diam.length;

    DiameterPairSet out;
    out.pairs.push_back(diam);
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (static_cast<int>(i) == diam.index_a && static_cast<int>(j) == diam.index_b) continue;
            const double len = distance(d.vertex(i), d.vertex(j));
            if (len >= threshold)
                out.pairs.push_back({d.vertex(i), d.vertex(j), len, static_cast<int>(i), static_cast<int>(j)});
        }
    }

    // 2-means over the distinct endpoints, seeded at the calipers pair.
    std::vector<int> ids;
    for (const auto& p : out.pairs) {
        ids.push_back(p.index_a);
        ids.push_back(p.index_b);
    }
    std::vector<int> order;  // first-seen order, duplicates removed
    for (int id : ids)
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);

    std::array<Vec2, 2> centers{diam.a, diam.b};
    std::vector<int> label(order.size(), 0);
    for (int iter = 0; iter < 100; ++iter) {
        std::array<int, 2> count{0, 0};
        std::vector<int> next(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Vec2 p = d.vertex(static_cast<std::size_t>(order[k]));
            const double d0 = distance(p, centers[0]);
            const double d1 = distance(p, centers[1]);
            int lab;
            if (std::abs(d0 - d1) <= 1e-12 * std::max(d0, d1)) {
                lab = count[1] < count[0] ? 1 : 0;  // ties go to the smaller cluster
            } else {
                lab = d1 < d0 ? 1 : 0;
            }
            next[k] = lab;
            ++count[static_cast<std::size_t>(lab)];
        }
        std::array<Vec2, 2> sum{};
        for (std::size_t k = 0; k < order.size(); ++k)
            sum[static_cast<std::size_t>(next[k])] += d.vertex(static_cast<std::size_t>(order[k]));
        for (int c = 0; c < 2; ++c)
            if (count[static_cast<std::size_t>(c)] > 0)
                centers[static_cast<std::size_t>(c)] =
                    sum[static_cast<std::size_t>(c)] / count[static_cast<std::size_t>(c)];
        const bool stable = next == label && iter > 0;
        label = std::move(next);
        if (stable) break;
    }

    auto label_of = [&](int id) {
        const auto it = std::find(order.begin(), order.end(), id);
        return label[static_cast<std::size_t>(it - order.begin())];
    };
    out.cluster_centers = centers;
    out.cluster_radius = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Vec2 p = d.vertex(static_cast<std::size_t>(order[k]));
        out.cluster_radius =
            std::max(out.cluster_radius, distance(p, centers[static_cast<std::size_t>(label[k])]));
    }
    for (const auto& p : out.pairs) out.labels.emplace_back(label_of(p.index_a), label_of(p.index_b));
    out.cluster_radius_over_inrad = out.cluster_radius / inradius_incenter(d).radius;
    return out;
}

ClusteringReport verify_diameter_clustering(const ConvexDomain& d, double c_max, double rel_tol) {
    ClusteringReport r;
    r.pairs = all_diameter_pairs(d, rel_tol);
    if (r.pairs.pairs.empty()) throw InputError("no diameter pair found");
    r.c_max = c_max;
    r.c_estimate = r.pairs.cluster_radius_over_inrad;
    r.aspect_N = r.pairs.pairs.front().length / inradius_incenter(d).radius;
    r.elongated = r.aspect_N >= 4.0;
    r.pass = r.c_estimate <= c_max;
    return r;
}

}  // namespace hotspots
