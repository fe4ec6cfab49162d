#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "hotspots/errors.hpp"
#include "hotspots/mesh.hpp"

namespace hotspots {

namespace {

struct Tri {
    std::array<int, 3> v;
    // n[k] is the neighbour across the edge opposite v[k], -1 on the boundary.
    std::array<int, 3> n;
    bool alive = true;
};

inline int next(int k) { return k == 2 ? 0 : k + 1; }
inline int prev(int k) { return k == 0 ? 2 : k - 1; }

// Positive when p is strictly inside the circumcircle of counterclockwise (a, b, c).
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 b1 = b - a, c1 = c - a;
    const double d = 2.0 * cross(b1, c1);
    const double bb = norm2(b1), cc = norm2(c1);
    return a + Vec2{(c1.y * bb - b1.y * cc) / d, (b1.x * cc - c1.x * bb) / d};
}

class Mesher {
public:
    Mesher(const ConvexDomain& d, double h, const MeshOptions& opt) : dom_(d), h_(h), opt_(opt) {
        min_edge_ = 1e-3 * h;
        const std::size_t n = d.size();
        corner_angle_.resize(n);
        for (std::size_t i = 0; i < n; ++i) corner_angle_[i] = d.interior_angle(i);
    }

    TriMesh run() {
        initial_polygon();
        split_boundary();
        fill_interior();
        refine();
        return finish();
    }

private:
    enum class Outcome { inserted, duplicate, encroaches, rejected };

    // --- bookkeeping ------------------------------------------------------

    int add_node(Vec2 p, int seg, int corner) {
        if (pts_.size() >= opt_.max_nodes)
            throw ResourceError("mesh node cap " + std::to_string(opt_.max_nodes) +
                                " exceeded at h = " + std::to_string(h_) + "; required cap is at least " +
                                std::to_string(estimated_node_count(dom_, h_)));
        pts_.push_back(p);
        seg_.push_back(seg);
        corner_.push_back(corner);
        return static_cast<int>(pts_.size()) - 1;
    }

    int add_tri(int a, int b, int c) {
        tris_.push_back({{a, b, c}, {-1, -1, -1}, true});
        mark_.push_back(0);
        return static_cast<int>(tris_.size()) - 1;
    }

    void replace_neighbour(int t, int old_nb, int new_nb) {
        if (t < 0) return;
        for (int& x : tris_[t].n)
            if (x == old_nb) {
                x = new_nb;
                return;
            }
    }

    Vec2 P(int i) const { return pts_[static_cast<std::size_t>(i)]; }

    bool is_corner(int i) const { return corner_[i] >= 0; }

    // Polygon edge carrying the boundary edge a -> b (counterclockwise).
    int polygon_edge(int a, int b) const {
        if (seg_[a] >= 0) return seg_[a];
        if (seg_[b] >= 0) return seg_[b];
        return corner_[a];
    }

    bool on_polygon_edge(int node, int e) const {
        const int n = static_cast<int>(dom_.size());
        if (seg_[node] >= 0) return seg_[node] == e;
        if (corner_[node] >= 0) return corner_[node] == e || (corner_[node] + n - 1) % n == e;
        return false;
    }

    // --- initial triangulation -------------------------------------------

    void initial_polygon() {
        const int n = static_cast<int>(dom_.size());
        for (int i = 0; i < n; ++i) add_node(dom_.vertex(static_cast<std::size_t>(i)), -1, i);
        const int m = n - 2;
        for (int j = 0; j < m; ++j) {
            const int t = add_tri(0, j + 1, j + 2);
            tris_[t].n = {-1, j + 1 < m ? j + 1 : -1, j > 0 ? j - 1 : -1};
        }
        // Lawson flips to Delaunay.
        std::vector<int> stack;
        for (int t = 0; t < m; ++t) stack.push_back(t);
        std::size_t guard = 0;
        while (!stack.empty()) {
            if (++guard > 100 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + 1000)
                throw ConvergenceError("initial Delaunay flips did not settle", 0.0);
            const int t = stack.back();
            stack.pop_back();
            if (!tris_[t].alive) continue;
            for (int k = 0; k < 3; ++k) {
                const int u = tris_[t].n[k];
                if (u < 0) continue;
                if (try_flip(t, k)) {
                    stack.push_back(t);
                    stack.push_back(u);
                    break;
                }
            }
        }
        last_ = 0;
    }

    bool try_flip(int t, int k) {
        const Tri T = tris_[t];
        const int u = T.n[k];
        const int a = T.v[k], b = T.v[next(k)], c = T.v[prev(k)];
        const Tri U = tris_[u];
        int ku = 0;
        while (U.v[ku] == b || U.v[ku] == c) ++ku;
        const int d = U.v[ku];
        const double ic = incircle(P(a), P(b), P(c), P(d));
        const double s = norm2(P(b) - P(c));
        if (!(ic > 1e-12 * s * s)) return false;
        if (orient(P(a), P(b), P(d)) <= 0.0 || orient(P(a), P(d), P(c)) <= 0.0) return false;

        const int nt_ca = T.n[next(k)];
        const int nt_ab = T.n[prev(k)];
        const int nu_bd = U.n[next(ku)];
        const int nu_dc = U.n[prev(ku)];
        tris_[t].v = {a, b, d};
        tris_[t].n = {nu_bd, u, nt_ab};
        tris_[u].v = {a, d, c};
        tris_[u].n = {nu_dc, nt_ca, t};
        replace_neighbour(nu_bd, u, t);
        replace_neighbour(nt_ca, t, u);
        return true;
    }

    // --- point location ------------------------------------------------------

    struct Walk {
        int tri;
        int exit_edge;  // >= 0 when p lies outside, across this boundary edge of tri
    };

    Walk walk(int start, Vec2 p) const {
        int t = start;
        if (t < 0 || !tris_[t].alive) t = any_alive();
        int rot = 0;
        const std::size_t limit = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& T = tris_[t];
            bool moved = false;
            for (int i = 0; i < 3; ++i) {
                const int k = (i + rot) % 3;
                if (orient(P(T.v[next(k)]), P(T.v[prev(k)]), p) < 0.0) {
                    if (T.n[k] < 0) return {t, k};
                    t = T.n[k];
                    moved = true;
                    break;
                }
            }
            if (!moved) return {t, -1};
            rot = (rot + 1) % 3;
        }
        // Numerical cycling; fall back to a scan.
        int best = -1;
        double best_score = -1e300;
        for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
            if (!tris_[s].alive) continue;
            const Tri& T = tris_[s];
            double worst = 1e300;
            for (int k = 0; k < 3; ++k) worst = std::min(worst, orient(P(T.v[next(k)]), P(T.v[prev(k)]), p));
            if (worst > best_score) {
                best_score = worst;
                best = s;
            }
        }
        return {best, -1};
    }

    int any_alive() const {
        for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t)
            if (tris_[t].alive) return t;
        return -1;
    }

    // --- Bowyer-Watson insertion ---------------------------------------------

    // Inserts p into the triangulation. `seed` contains p; when `split_k` >= 0
    // p lies on the boundary edge split_k of seed, which is replaced by two halves.
    Outcome insert(Vec2 p, int seed, int split_k, int seg, bool test_encroach, std::vector<std::pair<int, int>>* encroached) {
        std::vector<int> excluded;
        for (;;) {
            collect_cavity(p, seed, excluded);

            for (int t : cavity_)
                for (int v : tris_[t].v)
                    if (distance(P(v), p) < 1e-9 * h_) {
                        clear_marks();
                        return Outcome::duplicate;
                    }

            // Star-shape repair: every cavity boundary edge must see p on its left.
            int bad = -1;
            for (int t : cavity_) {
                for (int k = 0; k < 3; ++k) {
                    const int nb = tris_[t].n[k];
                    if (nb >= 0 && mark_[nb]) continue;
                    if (t == seed && k == split_k) continue;
                    const Vec2 a = P(tris_[t].v[next(k)]), b = P(tris_[t].v[prev(k)]);
                    if (orient(a, b, p) <= 1e-12 * (norm2(b - a) + norm2(p - a))) {
                        bad = t;
                        break;
                    }
                }
                if (bad >= 0) break;
            }
            if (bad < 0) break;
            clear_marks();
            if (bad == seed) return Outcome::rejected;
            excluded.push_back(bad);
        }

        if (test_encroach) {
            bool hit = false;
            for (int t : cavity_)
                for (int k = 0; k < 3; ++k) {
                    if (tris_[t].n[k] >= 0) continue;
                    const Vec2 a = P(tris_[t].v[next(k)]), b = P(tris_[t].v[prev(k)]);
                    if (dot(a - p, b - p) < 0.0) {
                        hit = true;
                        if (encroached) encroached->emplace_back(t, k);
                    }
                }
            if (hit) {
                clear_marks();
                return Outcome::encroaches;
            }
        }

        const int pi = add_node(p, seg, -1);
        struct Edge {
            int a, b, outer, owner, tri;
        };
        std::vector<Edge> ring;
        for (int t : cavity_)
            for (int k = 0; k < 3; ++k) {
                const int nb = tris_[t].n[k];
                if (nb >= 0 && mark_[nb]) continue;
                if (t == seed && k == split_k) continue;
                ring.push_back({tris_[t].v[next(k)], tris_[t].v[prev(k)], nb, t, -1});
            }
        for (int t : cavity_) tris_[t].alive = false;
        clear_marks();

        new_tris_.clear();
        for (Edge& e : ring) {
            e.tri = add_tri(e.a, e.b, pi);
            tris_[e.tri].n[2] = e.outer;
            replace_neighbour(e.outer, e.owner, e.tri);
            new_tris_.push_back(e.tri);
        }
        for (const Edge& e : ring) {
            // edge (b, p) is shared with the ring triangle starting at b,
            // edge (p, a) with the one ending at a.
            for (const Edge& f : ring) {
                if (f.a == e.b) tris_[e.tri].n[0] = f.tri;
                if (f.b == e.a) tris_[e.tri].n[1] = f.tri;
            }
        }
        last_ = new_tris_.front();
        return Outcome::inserted;
    }

    void collect_cavity(Vec2 p, int seed, const std::vector<int>& excluded) {
        cavity_.clear();
        cavity_.push_back(seed);
        mark_[seed] = 1;
        for (std::size_t i = 0; i < cavity_.size(); ++i) {
            const Tri& T = tris_[cavity_[i]];
            for (int nb : T.n) {
                if (nb < 0 || mark_[nb]) continue;
                if (std::find(excluded.begin(), excluded.end(), nb) != excluded.end()) continue;
                const Tri& U = tris_[nb];
                if (incircle(P(U.v[0]), P(U.v[1]), P(U.v[2]), p) > 0.0) {
                    mark_[nb] = 1;
                    cavity_.push_back(nb);
                }
            }
        }
    }

    void clear_marks() {
        for (int t : cavity_) mark_[t] = 0;
    }

    // --- boundary and interior seeding ---------------------------------------

    // Triangle holding the boundary edge a -> b.
    int find_boundary_edge(int a, int b, int& k_out) const {
        for (int t : new_tris_) {
            const Tri& T = tris_[t];
            for (int k = 0; k < 3; ++k)
                if (T.n[k] < 0 && T.v[next(k)] == a && T.v[prev(k)] == b) {
                    k_out = k;
                    return t;
                }
        }
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            const Tri& T = tris_[t];
            if (!T.alive) continue;
            for (int k = 0; k < 3; ++k)
                if (T.n[k] < 0 && T.v[next(k)] == a && T.v[prev(k)] == b) {
                    k_out = k;
                    return t;
                }
        }
        return -1;
    }

    void split_boundary() {
        const int n = static_cast<int>(dom_.size());
        new_tris_.clear();
        for (int e = 0; e < n; ++e) {
            const Vec2 a = dom_.vertex(static_cast<std::size_t>(e));
            const Vec2 b = dom_.vertex(static_cast<std::size_t>((e + 1) % n));
            const int m = static_cast<int>(std::ceil(distance(a, b) / h_ - 1e-9));
            int from = e;
            const int to = (e + 1) % n;
            for (int j = 1; j < m; ++j) {
                int k = -1;
                const int t = find_boundary_edge(from, to, k);
                if (t < 0) throw ConvergenceError("lost a boundary edge while seeding", 0.0);
                const double s = static_cast<double>(j) / m;
                const Vec2 p = a + (b - a) * s;
                if (insert(p, t, k, e, false, nullptr) != Outcome::inserted)
                    throw ConvergenceError("boundary seeding failed", 0.0);
                from = static_cast<int>(pts_.size()) - 1;
            }
        }
    }

    void fill_interior() {
        const Vec2 lo = dom_.min_corner(), hi = dom_.max_corner();
        const double dy = h_ * std::sqrt(3.0) / 2.0;
        const int ny = static_cast<int>(std::floor((hi.y - lo.y) / dy)) + 1;
        const int nx = static_cast<int>(std::floor((hi.x - lo.x) / h_)) + 1;
        const double y0 = lo.y + 0.5 * ((hi.y - lo.y) - (ny - 1) * dy);
        const double x0 = lo.x + 0.5 * ((hi.x - lo.x) - (nx - 1) * h_);
        const double margin = 0.5 * h_;
        for (int j = 0; j < ny; ++j) {
            const double shift = (j % 2 == 0) ? 0.0 : 0.5 * h_;
            for (int ii = 0; ii <= nx; ++ii) {
                const int i = (j % 2 == 0) ? ii : nx - ii;
                const Vec2 p{x0 + i * h_ - shift, y0 + j * dy};
                if (dom_.distance_to_boundary(p) < margin) continue;
                const Walk w = walk(last_, p);
                if (w.exit_edge >= 0) continue;
                insert(p, w.tri, -1, -1, false, nullptr);
            }
        }
    }

    // --- refinement ----------------------------------------------------------

    struct Item {
        int tri;
        std::array<int, 3> v;
    };

    bool valid(const Item& it) const { return tris_[it.tri].alive && tris_[it.tri].v == it.v; }

    bool encroached_edge(int t, int k) const {
        const Tri& T = tris_[t];
        if (T.n[k] >= 0) return false;
        const Vec2 a = P(T.v[next(k)]), b = P(T.v[prev(k)]), c = P(T.v[k]);
        return dot(a - c, b - c) < -1e-12 * norm2(b - a);
    }

    // Skinny triangles wedged into an acute polygon corner cannot be fixed by
    // refinement; leave them.
    bool in_acute_corner(int u, int w) const {
        const int n = static_cast<int>(dom_.size());
        for (int c = 0; c < n; ++c) {
            if (corner_angle_[c] >= std::numbers::pi / 3.0) continue;
            const int e_in = (c + n - 1) % n, e_out = c;
            if ((on_polygon_edge(u, e_in) && on_polygon_edge(w, e_out)) ||
                (on_polygon_edge(u, e_out) && on_polygon_edge(w, e_in)))
                return true;
        }
        return false;
    }

    bool is_bad(int t) const {
        const Tri& T = tris_[t];
        const Vec2 a = P(T.v[0]), b = P(T.v[1]), c = P(T.v[2]);
        const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
        const double area2 = cross(b - a, c - a);
        const double R = la * lb * lc / (2.0 * area2);
        double s = la;
        int sk = 0;
        if (lb < s) s = lb, sk = 1;
        if (lc < s) s = lc, sk = 2;
        if (s < min_edge_) return false;
        if (R > size_bound_ * h_) return true;
        if (R / s <= opt_.radius_edge_bound) return false;
        return !in_acute_corner(T.v[next(sk)], T.v[prev(sk)]);
    }

    void schedule(int t) {
        const Tri& T = tris_[t];
        for (int k = 0; k < 3; ++k)
            if (encroached_edge(t, k)) {
                segq_.push_back({t, T.v});
                break;
            }
        if (is_bad(t)) badq_.push_back({t, T.v});
    }

    bool split_segment(int t, int k) {
        const Tri& T = tris_[t];
        const int a = T.v[next(k)], b = T.v[prev(k)];
        const Vec2 pa = P(a), pb = P(b);
        const double len = distance(pa, pb);
        if (len < 2.0 * min_edge_) return false;
        double s = 0.5;
        const auto acute = [&](int v) { return is_corner(v) && corner_angle_[corner_[v]] < 0.5 * std::numbers::pi; };
        if (acute(a) != acute(b)) {
            // concentric shells around the acute corner
            const double d = h_ * std::exp2(std::round(std::log2(0.5 * len / h_)));
            s = acute(a) ? d / len : 1.0 - d / len;
        }
        const Vec2 p = pa + (pb - pa) * s;
        const int e = polygon_edge(a, b);
        if (insert(p, t, k, e, false, nullptr) != Outcome::inserted) return false;
        for (int u : new_tris_) schedule(u);
        return true;
    }

    void refine() {
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
            if (tris_[t].alive) schedule(t);
        std::vector<std::pair<int, int>> enc;
        while (!segq_.empty() || !badq_.empty()) {
            if (!segq_.empty()) {
                const Item it = segq_.front();
                segq_.pop_front();
                if (!valid(it)) continue;
                for (int k = 0; k < 3; ++k)
                    if (encroached_edge(it.tri, k)) {
                        split_segment(it.tri, k);
                        break;
                    }
                continue;
            }
            const Item it = badq_.front();
            badq_.pop_front();
            if (!valid(it) || !is_bad(it.tri)) continue;
            const Tri& T = tris_[it.tri];
            const Vec2 c = circumcenter(P(T.v[0]), P(T.v[1]), P(T.v[2]));
            const Walk w = walk(it.tri, c);
            if (w.exit_edge >= 0) {
                if (split_segment(w.tri, w.exit_edge) && valid(it)) badq_.push_back(it);
                continue;
            }
            enc.clear();
            const Outcome r = insert(c, w.tri, -1, -1, true, &enc);
            if (r == Outcome::inserted) {
                for (int u : new_tris_) schedule(u);
            } else if (r == Outcome::encroaches) {
                bool any = false;
                for (auto [et, ek] : enc) {
                    if (!tris_[et].alive || tris_[et].n[ek] >= 0) continue;
                    any = split_segment(et, ek) || any;
                }
                if (any && valid(it)) badq_.push_back(it);
            }
        }
    }

    TriMesh finish() {
        std::vector<std::array<int, 3>> tris;
        for (const Tri& T : tris_)
            if (T.alive) tris.push_back(T.v);
        std::vector<std::uint8_t> boundary(pts_.size());
        for (std::size_t i = 0; i < pts_.size(); ++i) boundary[i] = (seg_[i] >= 0 || corner_[i] >= 0) ? 1 : 0;
        return TriMesh(dom_, pts_, std::move(tris), std::move(boundary), h_);
    }

    const ConvexDomain& dom_;
    double h_;
    MeshOptions opt_;
    double min_edge_;
    double size_bound_ = 0.75;
    std::vector<double> corner_angle_;

    std::vector<Vec2> pts_;
    std::vector<int> seg_;
    std::vector<int> corner_;
    std::vector<Tri> tris_;
    std::vector<char> mark_;
    std::vector<int> cavity_;
    std::vector<int> new_tris_;
    int last_ = 0;
    std::deque<Item> segq_, badq_;
};

}  // namespace

std::size_t estimated_node_count(const ConvexDomain& domain, double target_h) {
    const double interior = domain.area() / (target_h * target_h * std::sqrt(3.0) / 2.0);
    const double boundary = domain.perimeter() / target_h + static_cast<double>(domain.size());
    return static_cast<std::size_t>(std::ceil(1.5 * interior + 2.0 * boundary));
}

TriMesh triangulate(const ConvexDomain& domain, double target_h, const MeshOptions& options) {
    const double inrad = inradius_incenter(domain).radius;
    if (!(target_h > 0.0) || target_h > inrad * (1.0 + 1e-12))
        throw InputError("target_h must lie in (0, inradius] = (0, " + std::to_string(inrad) + "]");
    const std::size_t need = estimated_node_count(domain, target_h);
    if (need > options.max_nodes)
        throw ResourceError("h = " + std::to_string(target_h) + " needs about " + std::to_string(need) +
                            " nodes; raise the node cap to at least that");
    return Mesher(domain, target_h, options).run();
}

}  // namespace hotspots
