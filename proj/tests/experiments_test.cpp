#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hotspots/errors.hpp"
#include "hotspots/experiments.hpp"
#include "test_support.hpp"

using namespace hotspots;

namespace {

const double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double constant(const VerificationReport& r, const std::string& key) {
    const auto it = r.fitted_constants.find(key);
    REQUIRE_MESSAGE(it != r.fitted_constants.end(), key);
    return it->second;
}

bool same_vertices(const ConvexDomain& a, const ConvexDomain& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.vertex(i).x != b.vertex(i).x || a.vertex(i).y != b.vertex(i).y) return false;
    return true;
}

}  // namespace

TEST_CASE("report pass is recomputed from constants and tolerances") {
    VerificationReport r;
    r.fitted_constants = {{"a", 1.0}, {"b", 2.0}, {"nan", std::nan("")}, {"inf", INFINITY}};
    CHECK_FALSE(evaluate_pass(r));

    r.tolerances = {{"a", CheckOp::le, 1.0}, {"b", CheckOp::gt, 1.5}};
    CHECK(evaluate_pass(r));
    r.fitted_constants["a"] = 1.0 + 1e-12;
    CHECK_FALSE(evaluate_pass(r));

    CHECK(check_holds({"a", CheckOp::lt, 2.0}, r.fitted_constants));
    CHECK_FALSE(check_holds({"b", CheckOp::lt, 2.0}, r.fitted_constants));
    CHECK(check_holds({"b", CheckOp::ge, 2.0}, r.fitted_constants));
    CHECK(check_holds({"b", CheckOp::within_rel, 0.1, 2.1}, r.fitted_constants));
    CHECK_FALSE(check_holds({"b", CheckOp::within_rel, 0.01, 2.1}, r.fitted_constants));
    CHECK(check_holds({"b", CheckOp::finite}, r.fitted_constants));
    CHECK_FALSE(check_holds({"inf", CheckOp::finite}, r.fitted_constants));
    CHECK_FALSE(check_holds({"nan", CheckOp::le, INFINITY}, r.fitted_constants));
    CHECK_FALSE(check_holds({"missing", CheckOp::finite}, r.fitted_constants));
}

TEST_CASE("enum names round-trip") {
    for (LemmaId id : {LemmaId::main_theorem, LemmaId::lemma1, LemmaId::lemma2, LemmaId::lemma3, LemmaId::lemma4,
                       LemmaId::theorem1_bounds, LemmaId::eigenvalue_scaling, LemmaId::nodal_width, LemmaId::hitting_time,
                       LemmaId::stationarity})
        CHECK(lemma_id_from_string(to_string(id)) == id);
    for (CheckOp op : {CheckOp::le, CheckOp::lt, CheckOp::ge, CheckOp::gt, CheckOp::within_rel, CheckOp::finite})
        CHECK(check_op_from_string(to_string(op)) == op);
    for (FamilyKind k : {FamilyKind::rectangles, FamilyKind::ellipses, FamilyKind::stadiums, FamilyKind::random_hulls,
                         FamilyKind::triangles})
        CHECK(family_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(lemma_id_from_string("lemma9"), InputError);
    CHECK_THROWS_AS(check_op_from_string("eq"), InputError);
    CHECK_THROWS_AS(family_kind_from_string("squares"), InputError);
}

TEST_CASE("domain families are deterministic and validated") {
    const FamilyConfig rects{FamilyKind::rectangles, {5, 10, 20}};
    const auto r = domain_family(rects, 1);
    REQUIRE(r.size() == 3);
    CHECK(r[1].provenance().kind == DomainKind::rectangle);
    CHECK(r[2].area() == doctest::Approx(20.0));

    const auto st = domain_family({FamilyKind::stadiums, {8}, 0, 12, 4, 12, 64}, 1);
    CHECK(st[0].max_corner().x - st[0].min_corner().x == doctest::Approx(16.0).epsilon(1e-3));
    CHECK(st[0].max_corner().y - st[0].min_corner().y == doctest::Approx(2.0).epsilon(1e-3));

    for (FamilyKind kind : {FamilyKind::random_hulls, FamilyKind::triangles}) {
        FamilyConfig c{kind};
        c.count = 6;
        const auto a = domain_family(c, 42), b = domain_family(c, 42), other = domain_family(c, 43);
        REQUIRE(a.size() == 6);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(same_vertices(a[i], b[i]));
            CHECK_FALSE(same_vertices(a[i], other[i]));
            const double w = a[i].max_corner().x - a[i].min_corner().x;
            CHECK(w <= c.length_max + 1e-12);
        }
    }

    CHECK_THROWS_AS(domain_family({FamilyKind::rectangles, {}}, 1), InputError);
    CHECK_THROWS_AS(domain_family({FamilyKind::ellipses, {0.5}}, 1), InputError);
    CHECK_THROWS_AS(domain_family({FamilyKind::stadiums, {1.0}}, 1), InputError);
    CHECK_THROWS_AS(domain_family({FamilyKind::random_hulls}, 1), InputError);
    FamilyConfig bad{FamilyKind::triangles};
    bad.count = 2;
    bad.length_min = 5;
    bad.length_max = 4;
    CHECK_THROWS_AS(domain_family(bad, 1), InputError);
}

TEST_CASE("run_over_family matches across backends and propagates errors") {
    const auto fam = domain_family({FamilyKind::rectangles, {2, 3, 4, 6}}, 0);
    const auto fn = [](const ConvexDomain& d) { return verify_volume_comparability(d, 0.5, 50, 9); };
    const auto a = run_over_family(fam, fn, Backend::serial);
    const auto b = run_over_family(fam, fn, Backend::openmp);
    REQUIRE(a.size() == fam.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].fitted_constants == b[i].fitted_constants);
        CHECK(a[i].domain_label == domain_label(fam[i]));
    }
    const auto failing = [](const ConvexDomain& d) -> VerificationReport {
        if (d.area() > 3.5) throw InputError("too big");
        return {};
    };
    CHECK_THROWS_AS(run_over_family(fam, failing, Backend::openmp), InputError);
}

TEST_CASE("main theorem on the disk reproduces the sqrt 2 distance") {
    const VerificationReport r = verify_main_theorem(make_disk(1.0, 256));
    CHECK(rel(constant(r, "c_rep_orthogonal_pair"), std::sqrt(2.0)) < 0.02);
    CHECK(constant(r, "multiplicity_flag") == 1.0);
    CHECK(r.notes.count("multiplicity") == 1);
    CHECK(r.pass == evaluate_pass(r));
    CHECK(r.pass);
}

TEST_CASE("main theorem on the 10x1 rectangle: worst pair at distance 2 inradii") {
    const VerificationReport r = verify_main_theorem(make_rectangle(10, 1));
    // max point (0, 1) against corner (0, 0); the band widens it by at most its width
    const double band = 10.0 * std::acos(1.0 - 1e-3) / pi;
    const double worst = constant(r, "c_band_worst_pair");
    CHECK(worst >= 2.0 * (1.0 - 1e-9));
    CHECK(worst <= std::hypot(2.0, 2.0 * band + 0.2) + 1e-9);
    CHECK(rel(worst, 2.0) < 0.02);
    CHECK(constant(r, "diameter_pairs") == 2.0);
    CHECK(r.pass);
}

TEST_CASE("main theorem on the (8,1) ellipse: bounded, scale free and refinement stable") {
    const ConvexDomain e = make_ellipse(8, 1, 256);
    const VerificationReport r = verify_main_theorem(e);
    const double c = constant(r, "c_band_best_pair");
    CHECK(c > 0.0);
    CHECK(c <= 3.0);
    CHECK(r.pass);

    const VerificationReport moved = verify_main_theorem(transformed(e, 0.7, {3.0, -2.0}, 5.0));
    CHECK(constant(moved, "c_band_best_pair") == doctest::Approx(c).epsilon(1e-6));
    CHECK(constant(moved, "mu1") == doctest::Approx(constant(r, "mu1")).epsilon(1e-6));

    MainTheoremOptions fine;
    fine.h = 0.05;
    CHECK(rel(constant(verify_main_theorem(e, fine), "c_band_best_pair"), c) < 0.1);

    MainTheoremOptions strict;
    strict.c_max = 0.1;
    const VerificationReport s = verify_main_theorem(e, strict);
    CHECK_FALSE(s.pass);
    CHECK(s.pass == evaluate_pass(s));
}

TEST_CASE("lemma 1 wrapper reports clustering") {
    const VerificationReport r = verify_lemma1(make_ellipse(8, 1, 128));
    CHECK(constant(r, "elongated") == 1.0);
    CHECK(constant(r, "c_estimate") <= 10.0);
    CHECK(r.pass);
    const VerificationReport sq = verify_lemma1(make_rectangle(1, 1));
    CHECK(sq.notes.count("regime") == 1);
}

TEST_CASE("lemma 4 on the 20x1 rectangle matches the closed form") {
    // normalized frame: 40 x 2, phi = cos(pi x / 40), mu1 = pi^2 / 1600
    const double closed = -std::log(std::cos(pi / 40.0)) / (pi * pi / 1600.0);
    const VerificationReport r = verify_lemma4(make_rectangle(20, 1));
    CHECK(rel(constant(r, "c_fitted"), closed) < 0.05);
    CHECK(rel(constant(r, "mu1_L2"), pi * pi) < 0.01);
    CHECK(constant(r, "m_over_max") > 0.99);
    CHECK(r.pass);

    // aspect_N = diam / inrad = 2 sqrt(10) < 8
    CHECK_THROWS_AS(verify_lemma4(make_rectangle(3, 1)), InputError);
}

TEST_CASE("lemma 4 is refinement stable on an elongated ellipse") {
    const ConvexDomain e = make_ellipse(10, 1, 256);
    const VerificationReport coarse = verify_lemma4(e);
    Lemma4Options fine;
    fine.h = 0.05;
    const VerificationReport f = verify_lemma4(e, fine);
    const double c = constant(coarse, "c_fitted");
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
    CHECK(rel(constant(f, "c_fitted"), c) < 0.1);
    CHECK(coarse.pass);
}

TEST_CASE("envelope fit on an exact Gaussian line") {
    std::vector<EnvelopeSample> s;
    for (int i = 0; i <= 20; ++i) s.push_back({0.25 * i, std::log(0.3) - 0.5 * 0.25 * i});
    const GaussianBoundFit f = fit_envelope(s);
    CHECK(f.c1 == doctest::Approx(0.3));
    CHECK(f.c3 == doctest::Approx(0.3));
    CHECK(f.c2 == doctest::Approx(0.5));
    CHECK(f.c4 == doctest::Approx(0.5));
    CHECK(f.violation_count == 0);
    CHECK(f.cells_used == s.size());
}

TEST_CASE("envelope fit brackets a band around the mean decay") {
    std::vector<EnvelopeSample> s;
    for (int i = 0; i <= 20; ++i) {
        const double x = 0.25 * i;
        s.push_back({x, std::log(0.5) - 0.3 * x});
        s.push_back({x, std::log(2.0) - 0.3 * x});
    }
    const GaussianBoundFit f = fit_envelope(s);
    CHECK(f.c1 == doctest::Approx(0.5));
    CHECK(f.c3 == doctest::Approx(2.0));
    CHECK(f.c2 == doctest::Approx(0.3));
    CHECK(f.violation_count == 0);

    const GaussianBoundFit flat = fit_envelope({{1.0, 0.0}, {2.0, 1.0}}, 0.01);
    CHECK(flat.c2 == 0.01);
    CHECK(flat.violation_count == 0);
}

TEST_CASE("envelope fit invariants on random clouds") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EnvelopeSample> s;
        const int n = 1 + static_cast<int>(u(rng) * 60);
        const double slope = -2.0 * u(rng) + 0.5;
        for (int i = 0; i < n; ++i) {
            const double x = 6.0 * u(rng);
            s.push_back({x, slope * x + 3.0 * (u(rng) - 0.5)});
        }
        const GaussianBoundFit f = fit_envelope(s);
        CHECK(f.violation_count == 0);
        CHECK(envelope_violations(f, s) == 0);
        CHECK(f.c1 > 0.0);
        CHECK(f.c2 >= 1e-3);
        CHECK(f.c4 >= 1e-3);
        CHECK(f.c1 <= f.c3);
        CHECK(f.c4 <= f.c2);
        CHECK(std::isfinite(f.c3));
    }
    CHECK_THROWS_AS(fit_envelope({}), InputError);
    CHECK_THROWS_AS(fit_envelope({{0.0, 1.0}}, 0.0), InputError);
}

TEST_CASE("envelope violations count points outside the band") {
    GaussianBoundFit f;
    f.c1 = 0.5;
    f.c2 = 1.0;
    f.c3 = 2.0;
    f.c4 = 0.5;
    const std::vector<EnvelopeSample> s = {{0.0, 0.0}, {0.0, std::log(3.0)}, {1.0, std::log(0.5) - 1.5}, {2.0, -1.0}};
    CHECK(envelope_violations(f, s) == 2);
}

TEST_CASE("free-space Gaussian fit: exponents near 1/4 and prefactors near 1/4") {
    // generator Laplacian: p = e^{-r^2/4t} / (4 pi t), V(x, sqrt t) = pi t
    const ConvexDomain box = make_rectangle(20, 20);
    const TriMesh bins = triangulate(box, 0.25);
    GaussianFitOptions o;
    o.n_paths = 50000;
    o.min_count = 50;
    const GaussianBoundFit f = fit_gaussian_bounds(box, bins, {{10.0, 10.0}, {9.5, 10.3}}, {0.5, 1.0}, 11, o);
    CHECK(f.violation_count == 0);
    CHECK(f.c1 <= f.c3);
    CHECK(f.c4 <= f.c2);
    CHECK(rel(f.c2, 0.25) < 0.25);
    CHECK(rel(f.c4, 0.25) < 0.25);
    CHECK(f.c1 >= 0.125);
    CHECK(f.c1 <= 0.5);
    CHECK(f.c3 >= 0.125);
    CHECK(f.c3 <= 0.5);

    const VerificationReport r = verify_gaussian_bounds(box, bins, {{10.0, 10.0}, {9.5, 10.3}}, {0.5, 1.0}, 11, o);
    CHECK(r.pass);
    CHECK(constant(r, "c2") == f.c2);

    CHECK_THROWS_AS(fit_gaussian_bounds(box, bins, {{10.0, 10.0}}, {0.5, 1.0}, 1, o), InputError);
    CHECK_THROWS_AS(fit_gaussian_bounds(box, bins, {{10.0, 10.0}, {9.0, 9.0}}, {0.5}, 1, o), InputError);
}

TEST_CASE("volume comparability on a rectangle hits the corner-sector bounds") {
    // normalized 20 x 2: V(., 1) >= pi / 4 and V(., delta) <= pi delta^2, both attained at a corner
    const double delta = 0.25;
    const VerificationReport r = verify_volume_comparability(make_rectangle(10, 1), delta, 400, 3);
    CHECK(constant(r, "ratio_min") >= 1.0 / (4.0 * delta * delta) - 1e-9);
    CHECK(constant(r, "ratio_min") <= 1.0 / (delta * delta));
    CHECK(constant(r, "ratio_max") >= 1.0 / (delta * delta));
    CHECK(constant(r, "ratio_max") <= 4.0 / (delta * delta) + 1e-9);
    CHECK(constant(r, "pairs") == 400 + 3 * 4);
    CHECK(r.pass);

    const VerificationReport again = verify_volume_comparability(make_rectangle(10, 1), delta, 400, 3);
    CHECK(again.fitted_constants == r.fitted_constants);
    CHECK_THROWS_AS(verify_volume_comparability(make_rectangle(10, 1), 0.0, 10, 3), InputError);
    CHECK_THROWS_AS(verify_volume_comparability(make_rectangle(10, 1), 1.5, 10, 3), InputError);
}

TEST_CASE("volume comparability on a large disk sees full interior balls") {
    const VerificationReport r = verify_volume_comparability(make_disk(1.0, 256), 1.0, 200, 4);
    CHECK(constant(r, "ratio_min") > 0.0);
    CHECK(std::isfinite(constant(r, "ratio_max")));
    CHECK(constant(r, "interior_ratio") == 1.0);
}

TEST_CASE("lemma 3 wrapper requires a normalized domain") {
    const auto [sq, nr] = normalize(make_rectangle(1, 1));
    const TriMesh bins = triangulate(sq, 0.5);
    const Vec2 c = inradius_incenter(sq).center;
    const VerificationReport r = verify_lemma3(sq, bins, c, c, 1.0, 4000, 7, 1e-3);
    CHECK(std::isfinite(constant(r, "c_delta_hat")));
    CHECK(constant(r, "c_delta_hat") > 0.0);
    CHECK(r.pass);
    CHECK_THROWS_AS(verify_lemma3(make_rectangle(1, 1), bins, c, c, 1.0, 100, 7, 1e-3), InputError);
}

TEST_CASE("eigenvalue scaling: rectangles give pi^2 and the result is scale free") {
    const auto fam = domain_family({FamilyKind::rectangles, {5, 10, 20, 40}}, 0);
    const VerificationReport r = eigenvalue_scaling(fam);
    for (int i = 0; i < 4; ++i) CHECK(rel(constant(r, "mu1_L2[" + std::to_string(i) + "]"), pi * pi) < 0.01);
    CHECK(r.pass);

    std::vector<ConvexDomain> scaled;
    for (const auto& d : fam) scaled.push_back(transformed(d, 0.3, {1.0, 2.0}, 0.01));
    const VerificationReport s = eigenvalue_scaling(scaled);
    for (int i = 0; i < 4; ++i) {
        const std::string key = "mu1_L2[" + std::to_string(i) + "]";
        CHECK(constant(s, key) == doctest::Approx(constant(r, key)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(eigenvalue_scaling({fam[0], fam[1], fam[2]}), InputError);
}

TEST_CASE("eigenvalue scaling on ellipses stays bounded") {
    const auto fam = domain_family({FamilyKind::ellipses, {2, 4, 8, 16}, 0, 12, 4, 12, 128}, 0);
    const VerificationReport r = eigenvalue_scaling(fam);
    CHECK(r.pass);
    for (int i = 0; i < 4; ++i) CHECK(constant(r, "mu1_L2[" + std::to_string(i) + "]") <= 4.0 * pi * pi);
}

TEST_CASE("nodal line of a rectangle is the middle fiber") {
    const VerificationReport r = verify_nodal_width(make_rectangle(10, 1));
    CHECK(constant(r, "width") <= 0.1);
    CHECK(constant(r, "degenerate") == 0.0);
    // max sits on a short edge, the nodal line in the middle: 10 in normalized units
    CHECK(rel(constant(r, "distance_to_max_fiber"), 10.0) < 0.02);
    CHECK(r.pass);

    const VerificationReport e = verify_nodal_width(make_ellipse(16, 1, 256));
    CHECK(constant(e, "width") <= 0.5);
    CHECK(e.pass);
}

TEST_CASE("stationarity: uniform at long times, detectably not at short times") {
    for (const ConvexDomain& d : {make_rectangle(1, 1), make_rectangle(3, 1), make_triangle({0, 0}, {3, 0}, {1, 1})}) {
        const VerificationReport r = verify_stationarity(d, 21);
        CHECK_MESSAGE(r.pass, domain_label(d));
        CHECK(constant(r, "chi2") <= constant(r, "chi2_critical"));
    }
    StationarityOptions early;
    early.time_factor = 1e-3;
    const VerificationReport r = verify_stationarity(make_rectangle(4, 1), 21, early);
    CHECK_FALSE(r.pass);
    CHECK(constant(r, "chi2_critical") == doctest::Approx(testing::chi_square_critical(4, 0.01)));

    StationarityOptions bad;
    bad.slabs = 1;
    CHECK_THROWS_AS(verify_stationarity(make_rectangle(1, 1), 1, bad), InputError);
}

TEST_CASE("hitting time on an elongated rectangle") {
    HittingTimeOptions o;
    o.n_paths = 2000;
    const VerificationReport r = verify_hitting_time(make_rectangle(8, 1), 5, o);
    CHECK(constant(r, "P_B[1]") <= 0.01);
    CHECK(constant(r, "P_B[2]") <= 0.01);
    CHECK(constant(r, "exp_indicator_mean[1]") > 1.0);
    CHECK(constant(r, "seed_agreement_z") <= 3.0);
    CHECK(r.pass);
}

TEST_CASE("hitting time long-strip control matches the first-passage oracle") {
    const VerificationReport r = hitting_time_control(2.0, 4000, 17, 0.2);
    CHECK(constant(r, "oracle_median") == doctest::Approx(4.396).epsilon(1e-3));
    // one-sided 1D oracle: P(T <= 50 median) = 2 (1 - Phi(c / sqrt(2 t))) = 0.924
    CHECK(constant(r, "P_A") > 0.9);
    CHECK(r.pass);
    CHECK_THROWS_AS(hitting_time_control(0.0, 10, 1), InputError);
}
