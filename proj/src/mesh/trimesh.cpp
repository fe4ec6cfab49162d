#include <algorithm>
#include <cmath>
#include <numbers>

#include "hotspots/errors.hpp"
#include "hotspots/mesh.hpp"

namespace hotspots {

TriMesh::TriMesh(ConvexDomain domain, std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles,
                 std::vector<std::uint8_t> boundary_node_flags, double target_h)
    : domain_(std::move(domain)),
      nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary_node_flags)),
      target_h_(target_h) {
    if (boundary_.size() != nodes_.size()) throw InputError("boundary flags do not match node count");
    for (const auto& t : triangles_)
        for (int v : t)
            if (v < 0 || static_cast<std::size_t>(v) >= nodes_.size()) throw InputError("triangle references a missing node");
    build_locator();
    build_adjacency();
}

double TriMesh::triangle_area(std::size_t t) const {
    const auto& [a, b, c] = triangles_[t];
    return 0.5 * orient(nodes_[a], nodes_[b], nodes_[c]);
}

Vec2 TriMesh::triangle_centroid(std::size_t t) const {
    const auto& [a, b, c] = triangles_[t];
    return (nodes_[a] + nodes_[b] + nodes_[c]) / 3.0;
}

double TriMesh::total_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) s += triangle_area(t);
    return s;
}

double TriMesh::min_angle_degrees() const {
    double best = 180.0;
    for (const auto& tri : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = nodes_[tri[k]];
            const Vec2 u = nodes_[tri[(k + 1) % 3]] - p;
            const Vec2 w = nodes_[tri[(k + 2) % 3]] - p;
            best = std::min(best, std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / std::numbers::pi);
        }
    }
    return best;
}

double TriMesh::max_edge_length() const {
    double best = 0.0;
    for (const auto& tri : triangles_)
        for (int k = 0; k < 3; ++k) best = std::max(best, distance(nodes_[tri[k]], nodes_[tri[(k + 1) % 3]]));
    return best;
}

void TriMesh::build_locator() {
    const Vec2 lo = domain_.min_corner(), hi = domain_.max_corner();
    const double w = std::max(hi.x - lo.x, 1e-300), h = std::max(hi.y - lo.y, 1e-300);
    const double cells = std::max(1.0, 0.5 * static_cast<double>(triangles_.size()));
    cell_ = std::sqrt(w * h / cells);
    grid_nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
    grid_ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
    grid_lo_ = lo;

    const auto cell_range = [&](const std::array<int, 3>& tri) {
        Vec2 a = nodes_[tri[0]], b = a;
        for (int v : tri) {
            a = {std::min(a.x, nodes_[v].x), std::min(a.y, nodes_[v].y)};
            b = {std::max(b.x, nodes_[v].x), std::max(b.y, nodes_[v].y)};
        }
        const auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - grid_lo_.x) / cell_)), 0, grid_nx_ - 1); };
        const auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - grid_lo_.y) / cell_)), 0, grid_ny_ - 1); };
        return std::array<int, 4>{cx(a.x), cx(b.x), cy(a.y), cy(b.y)};
    };

    const std::size_t ncell = static_cast<std::size_t>(grid_nx_) * static_cast<std::size_t>(grid_ny_);
    cell_start_.assign(ncell + 1, 0);
    for (const auto& tri : triangles_) {
        const auto r = cell_range(tri);
        for (int j = r[2]; j <= r[3]; ++j)
            for (int i = r[0]; i <= r[1]; ++i) ++cell_start_[static_cast<std::size_t>(j * grid_nx_ + i) + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_items_.assign(static_cast<std::size_t>(cell_start_[ncell]), 0);
    std::vector<int> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto r = cell_range(triangles_[t]);
        for (int j = r[2]; j <= r[3]; ++j)
            for (int i = r[0]; i <= r[1]; ++i) cell_items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(j * grid_nx_ + i)]++)] = static_cast<int>(t);
    }
}

void TriMesh::build_adjacency() {
    adjacency_.assign(nodes_.size(), {});
    for (const auto& tri : triangles_)
        for (int k = 0; k < 3; ++k) {
            adjacency_[tri[k]].push_back(tri[(k + 1) % 3]);
            adjacency_[tri[k]].push_back(tri[(k + 2) % 3]);
        }
    for (auto& row : adjacency_) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
}

PointLocation TriMesh::locate(Vec2 p) const {
    if (!domain_.contains(p, 1e-9)) throw InputError("point lies outside the mesh domain");
    const int i = std::clamp(static_cast<int>(std::floor((p.x - grid_lo_.x) / cell_)), 0, grid_nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - grid_lo_.y) / cell_)), 0, grid_ny_ - 1);
    const std::size_t c = static_cast<std::size_t>(j * grid_nx_ + i);

    PointLocation best;
    double best_min = -1e300;
    for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const int t = cell_items_[static_cast<std::size_t>(k)];
        const auto& [ia, ib, ic] = triangles_[static_cast<std::size_t>(t)];
        const Vec2 a = nodes_[ia], b = nodes_[ib], cc = nodes_[ic];
        const double area2 = orient(a, b, cc);
        const double l0 = orient(p, b, cc) / area2;
        const double l1 = orient(a, p, cc) / area2;
        const double l2 = 1.0 - l0 - l1;
        const double m = std::min({l0, l1, l2});
        if (m > best_min) {
            best_min = m;
            best = {t, {l0, l1, l2}};
            if (m >= 0.0) break;
        }
    }
    if (best.triangle < 0) throw InputError("point location failed");
    if (best_min < 0.0) {
        double s = 0.0;
        for (double& l : best.bary) s += (l = std::max(l, 0.0));
        for (double& l : best.bary) l /= s;
    }
    return best;
}

}  // namespace hotspots
