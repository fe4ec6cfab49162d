#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "hotspots/errors.hpp"
#include "hotspots/experiments.hpp"

namespace hotspots {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Solved {
    ConvexDomain domain;
    NormalizationReport normalization;
    TriMesh mesh;
    EigenPair pair;
};

Solved solve_normalized(const ConvexDomain& d, double h, const EigenOptions& eigen) {
    auto [nd, nr] = normalize(d);
    TriMesh mesh = triangulate(nd, h);
    EigenPair pair = solve_first_eigenpair(mesh, eigen);
    return {std::move(nd), nr, std::move(mesh), std::move(pair)};
}

VerificationReport start_report(LemmaId id, const ConvexDomain& d) {
    VerificationReport r;
    r.lemma = id;
    r.domain_label = domain_label(d);
    r.domain = d.provenance();
    return r;
}

void finish(VerificationReport& r, Clock::time_point t0) {
    r.pass = evaluate_pass(r);
    r.runtime_seconds = seconds_since(t0);
}

double distance_to_pair(Vec2 p, const DiameterPair& pair) { return std::min(distance(p, pair.a), distance(p, pair.b)); }

// max over points of the distance to the pair, then best and worst over pairs
std::pair<double, double> best_worst(const std::vector<Vec2>& points, const std::vector<DiameterPair>& pairs) {
    double best = std::numeric_limits<double>::infinity(), worst = 0.0;
    for (const DiameterPair& pair : pairs) {
        double m = 0.0;
        for (const Vec2& p : points) m = std::max(m, distance_to_pair(p, pair));
        best = std::min(best, m);
        worst = std::max(worst, m);
    }
    return {best, worst};
}

// Points where the P1 interpolant crosses `level` along mesh edges; together
// with the band nodes they span the exact band of the interpolant.
void add_level_crossings(const TriMesh& mesh, const Eigen::VectorXd& phi, double level, std::vector<Vec2>& out) {
    const auto& nodes = mesh.nodes();
    for (const auto& tri : mesh.triangles())
        for (int e = 0; e < 3; ++e) {
            const int i = tri[static_cast<std::size_t>(e)], j = tri[static_cast<std::size_t>((e + 1) % 3)];
            const double a = phi[i] - level, b = phi[j] - level;
            if (a * b >= 0.0) continue;
            const Vec2 p = nodes[static_cast<std::size_t>(i)], q = nodes[static_cast<std::size_t>(j)];
            out.push_back(p + (q - p) * (a / (a - b)));
        }
}

}  // namespace

VerificationReport verify_main_theorem(const ConvexDomain& domain, const MainTheoremOptions& o) {
    const auto t0 = Clock::now();
    if (!(o.c_max > 0.0)) throw InputError("c_max must be positive");
    VerificationReport r = start_report(LemmaId::main_theorem, domain);
    const Solved s = solve_normalized(domain, o.h, o.eigen);
    const HotSpotSet hs = hot_spots(s.pair, s.mesh, o.band_epsilon);
    const DiameterPairSet pairs = all_diameter_pairs(s.domain, o.pair_rel_tol);
    const double inrad = inradius_incenter(s.domain).radius;

    std::vector<Vec2> band, reps;
    for (const auto* set : {&hs.max_band, &hs.min_band})
        for (const ExtremalPoint& e : *set) band.push_back(e.point);
    const std::size_t band_nodes = band.size();
    add_level_crossings(s.mesh, s.pair.phi, (1.0 - o.band_epsilon) * s.pair.phi.maxCoeff(), band);
    add_level_crossings(s.mesh, s.pair.phi, (1.0 - o.band_epsilon) * s.pair.phi.minCoeff(), band);
    for (const auto* set : {&hs.maxima, &hs.minima})
        for (const ExtremalPoint& e : *set) reps.push_back(e.point);

    const auto [band_best, band_worst] = best_worst(band, pairs.pairs);
    const auto [rep_best, rep_worst] = best_worst(reps, pairs.pairs);

    // the pair whose direction is most orthogonal to the incenter -> max direction
    const Vec2 xmax = hs.maxima.front().point;
    const Vec2 center = inradius_incenter(s.domain).center;
    const Vec2 u = xmax - center;
    const DiameterPair* orth = &pairs.pairs.front();
    double best_cos = std::numeric_limits<double>::infinity();
    for (const DiameterPair& pair : pairs.pairs) {
        const Vec2 v = pair.b - pair.a;
        const double c = std::abs(dot(u, v)) / (norm(u) * norm(v) + 1e-300);
        if (c < best_cos) {
            best_cos = c;
            orth = &pair;
        }
    }

    r.fitted_constants = {
        {"c_band_best_pair", band_best / inrad},
        {"c_band_worst_pair", band_worst / inrad},
        {"c_rep_best_pair", rep_best / inrad},
        {"c_rep_worst_pair", rep_worst / inrad},
        {"c_rep_orthogonal_pair", distance_to_pair(xmax, *orth) / inrad},
        {"aspect_N", s.normalization.aspect_N},
        {"mu1", s.pair.mu1},
        {"multiplicity_flag", s.pair.multiplicity_flag ? 1.0 : 0.0},
        {"diameter_pairs", static_cast<double>(pairs.pairs.size())},
        {"lemma1_cluster_radius_over_inrad", pairs.cluster_radius_over_inrad},
        {"band_points", static_cast<double>(band_nodes)},
        {"h", o.h},
    };
    r.tolerances = {{"c_band_best_pair", CheckOp::le, o.c_max}};
    if (s.normalization.aspect_N < 4.0) r.notes["regime"] = "outside elongated regime (aspect_N < 4)";
    if (s.pair.multiplicity_flag) r.notes["multiplicity"] = "near-degenerate first eigenvalue; checks use one representative eigenvector";
    finish(r, t0);
    return r;
}

VerificationReport verify_lemma1(const ConvexDomain& domain, double c_max, double rel_tol) {
    const auto t0 = Clock::now();
    VerificationReport r = start_report(LemmaId::lemma1, domain);
    const ClusteringReport c = verify_diameter_clustering(domain, c_max, rel_tol);
    r.fitted_constants = {
        {"c_estimate", c.c_estimate},
        {"aspect_N", c.aspect_N},
        {"elongated", c.elongated ? 1.0 : 0.0},
        {"near_diameter_pairs", static_cast<double>(c.pairs.pairs.size())},
        {"rel_tol", rel_tol},
    };
    r.tolerances = {{"c_estimate", CheckOp::le, c_max}};
    if (!c.elongated) r.notes["regime"] = "outside elongated regime (aspect_N < 4)";
    finish(r, t0);
    return r;
}

VerificationReport verify_lemma4(const ConvexDomain& domain, const Lemma4Options& o) {
    const auto t0 = Clock::now();
    if (!(o.radius > 0.0)) throw InputError("lemma 4 radius must be positive");
    if (o.circle_samples < 0) throw InputError("circle_samples must be non-negative");
    VerificationReport r = start_report(LemmaId::lemma4, domain);
    const auto [nd, nr] = normalize(domain);
    if (nr.aspect_N < o.min_aspect)
        throw InputError("lemma 4 needs aspect_N >= " + std::to_string(o.min_aspect) + ", got " + std::to_string(nr.aspect_N));
    const Solved s = solve_normalized(domain, o.h, o.eigen);
    const HotSpotSet hs = hot_spots(s.pair, s.mesh, 1e-3);
    const ExtremalPoint top = hs.maxima.front();
    const double phi_max = s.pair.phi.maxCoeff();

    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
        if (distance(s.mesh.nodes()[i], top.point) <= o.radius) m = std::min(m, s.pair.phi[static_cast<Eigen::Index>(i)]);
    for (int k = 0; k < o.circle_samples; ++k) {
        const double th = 2.0 * std::numbers::pi * k / o.circle_samples;
        const Vec2 p = top.point + Vec2{std::cos(th), std::sin(th)} * o.radius;
        if (s.domain.contains(p, 0.0)) m = std::min(m, evaluate(s.pair, s.mesh, p));
    }
    const double ratio = m / phi_max;
    const double c = ratio > 0.0 ? -std::log(ratio) / s.pair.mu1 : std::numeric_limits<double>::infinity();
    const double diam_over_inrad = s.normalization.diameter / s.normalization.inradius;

    r.fitted_constants = {
        {"c_fitted", c},
        {"m_over_max", ratio},
        {"mu1", s.pair.mu1},
        {"mu1_L2", s.pair.mu1 * s.normalization.length_x * s.normalization.length_x},
        {"c_geometric", (1.0 - ratio) * diam_over_inrad * diam_over_inrad},
        {"aspect_N", s.normalization.aspect_N},
        {"radius", o.radius},
        {"h", o.h},
    };
    r.tolerances = {
        {"m_over_max", CheckOp::gt, 0.0},
        {"c_fitted", CheckOp::gt, 0.0},
        {"c_fitted", CheckOp::le, o.c_max},
    };
    finish(r, t0);
    return r;
}

VerificationReport eigenvalue_scaling(const std::vector<ConvexDomain>& family, const EigenvalueScalingOptions& o) {
    const auto t0 = Clock::now();
    if (family.size() < 4) throw InputError("eigenvalue scaling needs at least 4 family members");
    VerificationReport r;
    r.lemma = LemmaId::eigenvalue_scaling;
    r.domain_label = "family[" + std::to_string(family.size()) + "]";
    r.domain = family.front().provenance();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Solved s = solve_normalized(family[i], o.h, o.eigen);
        const double L = s.normalization.length_x;
        const std::string key = "mu1_L2[" + std::to_string(i) + "]";
        r.fitted_constants[key] = s.pair.mu1 * L * L;
        r.fitted_constants["aspect_N[" + std::to_string(i) + "]"] = s.normalization.aspect_N;
        r.notes["member[" + std::to_string(i) + "]"] = domain_label(family[i]);
        r.tolerances.push_back({key, CheckOp::le, o.c_max});
        if (family[i].provenance().kind == DomainKind::rectangle)
            r.tolerances.push_back({key, CheckOp::within_rel, o.rectangle_rel_tol, pi2});
    }
    r.fitted_constants["h"] = o.h;
    finish(r, t0);
    return r;
}

VerificationReport verify_nodal_width(const ConvexDomain& domain, const NodalWidthOptions& o) {
    const auto t0 = Clock::now();
    VerificationReport r = start_report(LemmaId::nodal_width, domain);
    const Solved s = solve_normalized(domain, o.h, o.eigen);
    const NodalLineReport nl = nodal_line_report(s.pair, s.mesh);
    r.fitted_constants = {
        {"width", nl.x_projection_width},
        {"width_times_L", nl.x_projection_width * s.normalization.length_x},
        {"distance_to_max_fiber", nl.distance_to_max_fiber},
        {"degenerate", nl.degenerate ? 1.0 : 0.0},
        {"aspect_N", s.normalization.aspect_N},
        {"h", o.h},
    };
    r.tolerances = {
        {"width", CheckOp::le, o.width_max},
        {"width_times_L", CheckOp::le, o.ratio_max},
        {"degenerate", CheckOp::le, 0.0},
    };
    if (s.normalization.aspect_N < 8.0) r.notes["regime"] = "outside elongated regime (aspect_N < 8)";
    finish(r, t0);
    return r;
}

}  // namespace hotspots
