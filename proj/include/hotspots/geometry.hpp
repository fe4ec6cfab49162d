#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hotspots/vec2.hpp"

namespace hotspots {

enum class DomainKind { polygon, rectangle, ellipse, stadium, disk, random_hull, triangle };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Where a polygon came from. Curved shapes record their parameters and the
/// vertex count used to polygonalize them.
struct Provenance {
    DomainKind kind = DomainKind::polygon;
    std::map<std::string, double> parameters;
    int polygonalization_k = 0;
    std::uint64_t seed = 0;
};

/// Counterclockwise strictly convex polygon. Immutable after construction.
///
/// Construction reverses clockwise input, drops repeated and collinear
/// vertices (relative tolerance 1e-12) and rejects anything that is not
/// convex or has fewer than three vertices.
class ConvexDomain {
public:
    explicit ConvexDomain(std::vector<Vec2> vertices, Provenance provenance = {});

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec2& vertex(std::size_t i) const { return vertices_[i]; }
    const Provenance& provenance() const { return provenance_; }

    /// Outward unit normal of edge i (from vertex i to vertex i+1).
    Vec2 normal(std::size_t i) const { return normals_[i]; }
    /// Support offset of edge i: normal(i) . p == offset(i) on the edge line.
    double offset(std::size_t i) const { return offsets_[i]; }

    double area() const { return area_; }
    double perimeter() const;
    Vec2 centroid() const;
    Vec2 min_corner() const { return lo_; }
    Vec2 max_corner() const { return hi_; }
    /// Characteristic length used to scale absolute tolerances.
    double scale() const { return scale_; }

    /// Closed-domain membership with absolute slack `tol` (in length units).
    bool contains(Vec2 p, double tol = 1e-12) const;
    /// Minimum over edges of the signed distance to the edge line, positive
    /// inside. For points outside this is the most violated half-plane.
    double distance_to_boundary(Vec2 p) const;
    /// Closest point of the closed polygon.
    Vec2 project(Vec2 p) const;

    /// Interior angle at vertex i in radians.
    double interior_angle(std::size_t i) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<Vec2> normals_;
    std::vector<double> offsets_;
    Provenance provenance_;
    double area_ = 0.0;
    double scale_ = 1.0;
    Vec2 lo_, hi_;
};

// --- constructors for the domain families -------------------------------

ConvexDomain make_rectangle(double length, double height);
ConvexDomain make_ellipse(double semi_major, double semi_minor, int k = 256);
ConvexDomain make_disk(double radius, int k = 256);
/// Rectangle of the given straight length and height 2*radius with
/// semicircular caps; k vertices on the curved parts in total.
ConvexDomain make_stadium(double straight_length, double radius, int k = 256);
/// Convex hull of n uniform points in [0, length] x [0, height].
ConvexDomain make_random_hull(int n_points, double length, double height, std::uint64_t seed);
ConvexDomain make_triangle(Vec2 a, Vec2 b, Vec2 c);

/// Rigid motions and dilations keep provenance.
ConvexDomain transformed(const ConvexDomain& d, double angle, Vec2 shift, double scale = 1.0);

/// Andrew monotone chain; returns the counterclockwise hull.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// --- diameter and Lemma-1 style clustering -------------------------------

struct DiameterPair {
    Vec2 a;
    Vec2 b;
    double length = 0.0;
    int index_a = -1;
    int index_b = -1;
};

/// Rotating calipers over antipodal vertex pairs.
DiameterPair diameter(const ConvexDomain& d);

struct DiameterPairSet {
    std::vector<DiameterPair> pairs;
    std::array<Vec2, 2> cluster_centers{};
    double cluster_radius = 0.0;
    double cluster_radius_over_inrad = 0.0;
    /// cluster label (0/1) of pairs[i].a and pairs[i].b
    std::vector<std::pair<int, int>> labels;
};

/// All vertex pairs at distance >= (1 - rel_tol) * diam, with their
/// endpoints split into two clusters by 2-means seeded at the first pair.
DiameterPairSet all_diameter_pairs(const ConvexDomain& d, double rel_tol);

struct ClusteringReport {
    double c_estimate = 0.0;
    double c_max = 10.0;
    double aspect_N = 0.0;
    bool elongated = false;  ///< aspect_N >= 4
    bool pass = false;
    DiameterPairSet pairs;
};

ClusteringReport verify_diameter_clustering(const ConvexDomain& d, double c_max = 10.0,
                                            double rel_tol = 1e-3);

// --- inradius, width, normalization ---------------------------------------

struct Incircle {
    double radius = 0.0;
    Vec2 center;
};

/// Chebyshev center by a dense simplex on the edge half-planes.
Incircle inradius_incenter(const ConvexDomain& d);

struct WidthResult {
    double width = 0.0;
    int edge = -1;  ///< edge flush with one of the two supporting lines
};

WidthResult minimal_width(const ConvexDomain& d);

struct NormalizationReport {
    double rotation_angle = 0.0;
    double scale = 1.0;
    Vec2 translation;
    double inradius = 1.0;
    double diameter = 0.0;
    double aspect_N = 0.0;
    double width_y = 0.0;     ///< projection onto the y-axis after normalization
    double length_x = 0.0;    ///< projection onto the x-axis after normalization
    Vec2 incenter;
};

/// Rotate so the minimal-width direction is vertical, dilate to inradius 1,
/// and translate so the leftmost vertex sits on x = 0 and the lowest on y = 0.
std::pair<ConvexDomain, NormalizationReport> normalize(const ConvexDomain& d);

/// Apply the same similarity that normalize() applied to d.
Vec2 apply_normalization(const NormalizationReport& r, Vec2 p);

// --- areas ------------------------------------------------------------------

/// |{y in domain : |y - center| <= radius}|, exact up to rounding.
double ball_volume(const ConvexDomain& d, Vec2 center, double radius);

/// Area of the domain intersected with an axis-aligned box.
double clipped_area(const ConvexDomain& d, Vec2 box_lo, Vec2 box_hi);

/// x positions splitting the domain into `k` slabs of equal area; returns
/// k + 1 breakpoints from the leftmost to the rightmost x.
std::vector<double> equal_area_slabs(const ConvexDomain& d, int k);

}  // namespace hotspots
