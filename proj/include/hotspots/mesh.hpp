#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hotspots/geometry.hpp"
#include "hotspots/vec2.hpp"

namespace hotspots {

struct PointLocation {
    int triangle = -1;
    std::array<double, 3> bary{};
};

/// Conforming triangulation of a convex polygon. Immutable after
/// construction and safe to share between threads.
class TriMesh {
public:
    TriMesh(ConvexDomain domain, std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles,
            std::vector<std::uint8_t> boundary_node_flags, double target_h);

    const ConvexDomain& domain() const { return domain_; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<std::uint8_t>& boundary_node_flags() const { return boundary_; }
    double target_h() const { return target_h_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }

    double triangle_area(std::size_t t) const;
    Vec2 triangle_centroid(std::size_t t) const;
    double total_area() const;
    /// Smallest interior angle over all triangles, in degrees.
    double min_angle_degrees() const;
    /// Longest edge over all triangles.
    double max_edge_length() const;

    /// Containing triangle and barycentric coordinates. Points within 1e-9 of
    /// the closure are accepted; anything farther out throws InputError.
    PointLocation locate(Vec2 p) const;

    /// Nodes sharing an edge with node i, sorted.
    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

private:
    void build_locator();
    void build_adjacency();

    ConvexDomain domain_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::uint8_t> boundary_;
    double target_h_;

    Vec2 grid_lo_;
    double cell_ = 1.0;
    int grid_nx_ = 1, grid_ny_ = 1;
    std::vector<int> cell_start_;
    std::vector<int> cell_items_;

    std::vector<std::vector<int>> adjacency_;
};

struct MeshOptions {
    /// Hard cap on node count; triangulate throws ResourceError beyond it.
    std::size_t max_nodes = 2'000'000;
    /// Quality bound on circumradius / shortest edge. sqrt(2) gives 20.7 degrees.
    double radius_edge_bound = 1.4142135623730951;
};

/// Delaunay refinement mesh of `domain` with edge lengths near `target_h`.
/// Requires 0 < target_h <= inradius.
TriMesh triangulate(const ConvexDomain& domain, double target_h, const MeshOptions& options = {});

/// Node count the mesher expects for the given size; used for the cap check.
std::size_t estimated_node_count(const ConvexDomain& domain, double target_h);

}  // namespace hotspots
