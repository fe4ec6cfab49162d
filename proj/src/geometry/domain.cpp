#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hotspots/errors.hpp"
#include "hotspots/geometry.hpp"

namespace hotspots {

namespace {

constexpr double kRelTol = 1e-12;

double signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
    return 0.5 * a;
}

}  // namespace

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::polygon: return "polygon";
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::ellipse: return "ellipse";
        case DomainKind::stadium: return "stadium";
        case DomainKind::disk: return "disk";
        case DomainKind::random_hull: return "random_hull";
        case DomainKind::triangle: return "triangle";
    }
    return "polygon";
}

DomainKind domain_kind_from_string(const std::string& name) {
    for (auto k : {DomainKind::polygon, DomainKind::rectangle, DomainKind::ellipse,
                   DomainKind::stadium, DomainKind::disk, DomainKind::random_hull,
                   DomainKind::triangle}) {
        if (to_string(k) == name) return k;
    }
    throw InputError("unknown domain kind '" + name + "'");
}

ConvexDomain::ConvexDomain(std::vector<Vec2> v, Provenance provenance)
    : provenance_(std::move(provenance)) {
    if (v.size() < 3) throw InputError("convex domain needs at least 3 vertices");
    for (const auto& p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InputError("convex domain vertex is not finite");
    }
    if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());

    double extent = 0.0;
    for (const auto& p : v) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    const double dup_tol = kRelTol * std::max(extent, 1e-300);

    // Repeated vertices.
    std::vector<Vec2> w;
    w.reserve(v.size());
    for (const auto& p : v) {
        if (w.empty() || distance(w.back(), p) > dup_tol) w.push_back(p);
    }
    while (w.size() > 1 && distance(w.front(), w.back()) <= dup_tol) w.pop_back();

    // Collinear vertices; a reflex turn means the input is not convex.
    bool changed = true;
    while (changed && w.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::size_t n = w.size();
            const Vec2 a = w[(i + n - 1) % n];
            const Vec2 b = w[i];
            const Vec2 c = w[(i + 1) % n];
            const double la = norm(b - a);
            const double lc = norm(c - b);
            const double turn = cross(b - a, c - b) / (la * lc);
            if (std::abs(turn) <= kRelTol && dot(b - a, c - b) > 0.0) {
                w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
            if (turn < kRelTol) throw InputError("polygon is not strictly convex");
        }
    }
    if (w.size() < 3) throw InputError("polygon is degenerate after removing collinear vertices");

    // A self-overlapping polygon can turn left everywhere; its turning adds to 4π or more.
    double turning = 0.0;
    for (std::size_t i = 0, n = w.size(); i < n; ++i) {
        const Vec2 e0 = w[i] - w[(i + n - 1) % n];
        const Vec2 e1 = w[(i + 1) % n] - w[i];
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
        throw InputError("polygon winds more than once");

    vertices_ = std::move(w);
    area_ = signed_area(vertices_);
    if (!(area_ > 0.0)) throw InputError("polygon has no area");

    const std::size_t n = vertices_.size();
    normals_.resize(n);
    offsets_.resize(n);
    lo_ = hi_ = vertices_[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
        const Vec2 nrm = Vec2{e.y, -e.x} / norm(e);
        normals_[i] = nrm;
        offsets_[i] = dot(nrm, vertices_[i]);
        lo_ = {std::min(lo_.x, vertices_[i].x), std::min(lo_.y, vertices_[i].y)};
        hi_ = {std::max(hi_.x, vertices_[i].x), std::max(hi_.y, vertices_[i].y)};
    }
    scale_ = std::max(hi_.x - lo_.x, hi_.y - lo_.y);
}

double ConvexDomain::perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0, n = size(); i < n; ++i) p += distance(vertices_[i], vertices_[(i + 1) % n]);
    return p;
}

Vec2 ConvexDomain::centroid() const {
    Vec2 c;
    for (std::size_t i = 0, n = size(); i < n; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 b = vertices_[(i + 1) % n];
        c += (a + b) * cross(a, b);
    }
    return c / (6.0 * area_);
}

bool ConvexDomain::contains(Vec2 p, double tol) const {
    for (std::size_t i = 0, n = size(); i < n; ++i) {
        if (dot(normals_[i], p) - offsets_[i] > tol) return false;
    }
    return true;
}

double ConvexDomain::distance_to_boundary(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = size(); i < n; ++i) d = std::min(d, offsets_[i] - dot(normals_[i], p));
    return d;
}

Vec2 ConvexDomain::project(Vec2 p) const {
    if (contains(p, 0.0)) return p;
    Vec2 best = vertices_[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = size(); i < n; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 e = vertices_[(i + 1) % n] - a;
        const double t = std::clamp(dot(p - a, e) / norm2(e), 0.0, 1.0);
        const Vec2 q = a + e * t;
        const double d = norm2(p - q);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

double ConvexDomain::interior_angle(std::size_t i) const {
    const std::size_t n = size();
    const Vec2 a = vertices_[(i + n - 1) % n] - vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n] - vertices_[i];
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

ConvexDomain make_rectangle(double length, double height) {
    if (!(length > 0.0) || !(height > 0.0)) throw InputError("rectangle sides must be positive");
    Provenance p{DomainKind::rectangle, {{"length", length}, {"height", height}}, 4, 0};
    return ConvexDomain({{0, 0}, {length, 0}, {length, height}, {0, height}}, std::move(p));
}

ConvexDomain make_ellipse(double a, double b, int k) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("ellipse semi-axes must be positive");
    if (k < 8) throw InputError("ellipse polygonalization needs k >= 8");
    std::vector<Vec2> v(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double th = 2.0 * std::numbers::pi * j / k;
        v[static_cast<std::size_t>(j)] = {a * std::cos(th), b * std::sin(th)};
    }
    Provenance p{DomainKind::ellipse, {{"semi_major", a}, {"semi_minor", b}}, k, 0};
    return ConvexDomain(std::move(v), std::move(p));
}

ConvexDomain make_disk(double radius, int k) {
    if (!(radius > 0.0)) throw InputError("disk radius must be positive");
    if (k < 8) throw InputError("disk polygonalization needs k >= 8");
    std::vector<Vec2> v(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double th = 2.0 * std::numbers::pi * j / k;
        v[static_cast<std::size_t>(j)] = {radius * std::cos(th), radius * std::sin(th)};
    }
    Provenance p{DomainKind::disk, {{"radius", radius}}, k, 0};
    return ConvexDomain(std::move(v), std::move(p));
}

ConvexDomain make_stadium(double straight, double r, int k) {
    if (!(straight > 0.0) || !(r > 0.0)) throw InputError("stadium dimensions must be positive");
    if (k < 8) throw InputError("stadium polygonalization needs k >= 8");
    const int per_cap = k / 2;
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(2 * per_cap));
    for (int cap = 0; cap < 2; ++cap) {
        const double cx = cap == 0 ? 0.5 * straight : -0.5 * straight;
        const double th0 = cap == 0 ? -0.5 * std::numbers::pi : 0.5 * std::numbers::pi;
        for (int j = 0; j < per_cap; ++j) {
            const double th = th0 + std::numbers::pi * j / (per_cap - 1);
            v.push_back({cx + r * std::cos(th), r * std::sin(th)});
        }
    }
    Provenance p{DomainKind::stadium, {{"straight_length", straight}, {"radius", r}}, k, 0};
    return ConvexDomain(std::move(v), std::move(p));
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

ConvexDomain make_random_hull(int n_points, double length, double height, std::uint64_t seed) {
    if (n_points < 3) throw InputError("random hull needs at least 3 points");
    if (!(length > 0.0) || !(height > 0.0)) throw InputError("random hull box must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, length), uy(0.0, height);
    std::vector<Vec2> pts(static_cast<std::size_t>(n_points));
    for (auto& p : pts) {
        p.x = ux(rng);
        p.y = uy(rng);
    }
    Provenance p{DomainKind::random_hull,
                 {{"points", static_cast<double>(n_points)}, {"length", length}, {"height", height}},
                 0, seed};
    return ConvexDomain(convex_hull(std::move(pts)), std::move(p));
}

ConvexDomain make_triangle(Vec2 a, Vec2 b, Vec2 c) {
    Provenance p{DomainKind::triangle,
                 {{"ax", a.x}, {"ay", a.y}, {"bx", b.x}, {"by", b.y}, {"cx", c.x}, {"cy", c.y}}, 3, 0};
    return ConvexDomain({a, b, c}, std::move(p));
}

ConvexDomain transformed(const ConvexDomain& d, double angle, Vec2 shift, double scale) {
    if (!(scale > 0.0)) throw InputError("dilation factor must be positive");
    std::vector<Vec2> v;
    v.reserve(d.size());
    for (const auto& p : d.vertices()) v.push_back(rotate(p, angle) * scale + shift);
    return ConvexDomain(std::move(v), d.provenance());
}

}  // namespace hotspots
