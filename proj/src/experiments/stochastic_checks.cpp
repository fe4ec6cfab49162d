#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "hotspots/errors.hpp"
#include "hotspots/experiments.hpp"

namespace hotspots {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

VerificationReport start_report(LemmaId id, const ConvexDomain& d, std::uint64_t seed) {
    VerificationReport r;
    r.lemma = id;
    r.domain_label = domain_label(d);
    r.domain = d.provenance();
    r.seed = seed;
    return r;
}

void finish(VerificationReport& r, Clock::time_point t0) {
    r.pass = evaluate_pass(r);
    r.runtime_seconds = seconds_since(t0);
}

void require_normalized(const ConvexDomain& d) {
    const double inrad = inradius_incenter(d).radius;
    if (std::abs(inrad - 1.0) > 1e-6) throw InputError("domain must be normalized to inradius 1, got " + std::to_string(inrad));
}

Vec2 uniform_point(const ConvexDomain& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(d.min_corner().x, d.max_corner().x), uy(d.min_corner().y, d.max_corner().y);
    for (;;) {
        const Vec2 p{ux(rng), uy(rng)};
        if (d.contains(p, 0.0)) return p;
    }
}

}  // namespace

VerificationReport verify_volume_comparability(const ConvexDomain& domain, double delta, std::size_t n_pairs,
                                               std::uint64_t seed) {
    const auto t0 = Clock::now();
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("delta must lie in (0, 1]");
    VerificationReport r = start_report(LemmaId::lemma2, domain, seed);
    const ConvexDomain d = normalize(domain).first;
    const Vec2 center = inradius_incenter(d).center;

    double lo = kInf, hi = 0.0;
    std::size_t used = 0;
    const auto record = [&](Vec2 x, Vec2 y) {
        const double ratio = ball_volume(d, x, 1.0) / ball_volume(d, y, delta);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++used;
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const Vec2 x = uniform_point(d, rng);
        for (;;) {
            const double rad = std::sqrt(u01(rng)), th = 2.0 * std::numbers::pi * u01(rng);
            const Vec2 y = x + Vec2{std::cos(th), std::sin(th)} * rad;
            if (!d.contains(y, 0.0)) continue;
            record(x, y);
            break;
        }
    }
    // vertices: matched tips, and tip against an interior point at distance 1
    for (const Vec2& v : d.vertices()) {
        record(v, v);
        const Vec2 dir = center - v;
        const double len = norm(dir);
        const Vec2 w = len > 1.0 ? v + dir / len : center;
        record(v, w);
        record(w, v);
    }

    r.fitted_constants = {
        {"ratio_min", lo},
        {"ratio_max", hi},
        {"delta", delta},
        {"interior_ratio", 1.0 / (delta * delta)},
        {"pairs", static_cast<double>(used)},
    };
    r.tolerances = {
        {"ratio_min", CheckOp::gt, 0.0},
        {"ratio_max", CheckOp::finite},
    };
    finish(r, t0);
    return r;
}

VerificationReport verify_lemma3(const ConvexDomain& domain, const TriMesh& bin_mesh, Vec2 x, Vec2 y, double delta,
                                 std::size_t n_paths, std::uint64_t seed, double dt, Backend backend) {
    const auto t0 = Clock::now();
    require_normalized(domain);
    VerificationReport r = start_report(LemmaId::lemma3, domain, seed);
    const KernelDominationReport k = verify_kernel_domination(domain, bin_mesh, x, y, delta, n_paths, seed, 1.0, dt, 20, backend);
    r.fitted_constants = {
        {"c_delta_hat", k.c_delta_hat},
        {"sup_ratio_cell", static_cast<double>(k.sup_ratio_cell)},
        {"sup_ratio_x", k.sup_ratio_center.x},
        {"sup_ratio_y", k.sup_ratio_center.y},
        {"cells_used", static_cast<double>(k.cells_used)},
        {"delta", delta},
        {"n_paths", static_cast<double>(n_paths)},
    };
    r.tolerances = {
        {"c_delta_hat", CheckOp::finite},
        {"c_delta_hat", CheckOp::gt, 0.0},
    };
    finish(r, t0);
    return r;
}

GaussianBoundFit fit_envelope(std::vector<EnvelopeSample> samples, double min_exponent) {
    if (samples.empty()) throw InputError("envelope fit needs at least one sample");
    if (!(min_exponent > 0.0)) throw InputError("min_exponent must be positive");
    double ms = 0.0, my = 0.0;
    for (const EnvelopeSample& p : samples) {
        ms += p.s;
        my += p.y;
    }
    ms /= static_cast<double>(samples.size());
    my /= static_cast<double>(samples.size());
    double sxx = 0.0, sxy = 0.0;
    for (const EnvelopeSample& p : samples) {
        sxx += (p.s - ms) * (p.s - ms);
        sxy += (p.s - ms) * (p.y - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

    GaussianBoundFit f;
    f.c2 = f.c4 = std::max(-slope, min_exponent);
    double lo = kInf, hi = -kInf;
    for (const EnvelopeSample& p : samples) {
        lo = std::min(lo, p.y + f.c2 * p.s);
        hi = std::max(hi, p.y + f.c4 * p.s);
    }
    f.c1 = std::exp(lo);
    f.c3 = std::exp(hi);
    f.cells_used = samples.size();
    f.violation_count = envelope_violations(f, samples);
    f.samples = std::move(samples);
    return f;
}

std::size_t envelope_violations(const GaussianBoundFit& fit, const std::vector<EnvelopeSample>& samples) {
    std::size_t bad = 0;
    const double l1 = std::log(fit.c1), l3 = std::log(fit.c3);
    for (const EnvelopeSample& p : samples) {
        const double lower = l1 - fit.c2 * p.s, upper = l3 - fit.c4 * p.s;
        const double tol = 1e-12 * std::max(1.0, std::abs(p.y));
        if (p.y < lower - tol || p.y > upper + tol) ++bad;
    }
    return bad;
}

GaussianBoundFit fit_gaussian_bounds(const ConvexDomain& domain, const TriMesh& bin_mesh, const std::vector<Vec2>& sources,
                                     const std::vector<double>& times, std::uint64_t seed, const GaussianFitOptions& o) {
    if (sources.size() < 2) throw InputError("gaussian fit needs at least 2 sources");
    if (times.size() < 2) throw InputError("gaussian fit needs at least 2 times");
    const double inrad = inradius_incenter(domain).radius;
    std::vector<EnvelopeSample> samples;
    std::uint64_t combo = 0;
    for (const Vec2& x : sources) {
        for (double t : times) {
            if (!(t > 0.0)) throw InputError("gaussian fit times must be positive");
            const double dt = o.dt > 0.0 ? o.dt : std::min(1e-3 * inrad * inrad, t / 500.0);
            const PathEnsemble ens = simulate(domain, x, t, dt, o.n_paths, path_seed(seed, combo++), o.backend);
            const HeatKernelEstimate est = bin_endpoints(bin_mesh, ens);
            const double v = ball_volume(domain, x, std::sqrt(t));
            for (std::size_t c = 0; c < est.counts.size(); ++c) {
                if (est.counts[c] < o.min_count) continue;
                samples.push_back({norm2(est.cell_centers[c] - x) / t, std::log(est.density[c] * v)});
            }
        }
    }
    if (samples.empty()) throw InputError("no cell reached the minimum count; increase n_paths");
    return fit_envelope(std::move(samples), o.min_exponent);
}

VerificationReport verify_gaussian_bounds(const ConvexDomain& domain, const TriMesh& bin_mesh, const std::vector<Vec2>& sources,
                                          const std::vector<double>& times, std::uint64_t seed, const GaussianFitOptions& o) {
    const auto t0 = Clock::now();
    VerificationReport r = start_report(LemmaId::theorem1_bounds, domain, seed);
    const GaussianBoundFit f = fit_gaussian_bounds(domain, bin_mesh, sources, times, seed, o);
    r.fitted_constants = {
        {"c1", f.c1},
        {"c2", f.c2},
        {"c3", f.c3},
        {"c4", f.c4},
        {"violation_count", static_cast<double>(f.violation_count)},
        {"cells_used", static_cast<double>(f.cells_used)},
        {"n_paths", static_cast<double>(o.n_paths)},
    };
    r.tolerances = {{"violation_count", CheckOp::le, 0.0}};
    for (const char* c : {"c1", "c2", "c3", "c4"}) {
        r.tolerances.push_back({c, CheckOp::gt, 0.0});
        r.tolerances.push_back({c, CheckOp::finite});
    }
    finish(r, t0);
    return r;
}

VerificationReport verify_hitting_time(const ConvexDomain& domain, std::uint64_t seed, const HittingTimeOptions& o) {
    const auto t0 = Clock::now();
    VerificationReport r = start_report(LemmaId::hitting_time, domain, seed);
    const ConvexDomain d = normalize(domain).first;
    const TriMesh mesh = triangulate(d, o.h);
    const EigenPair pair = solve_first_eigenpair(mesh, o.eigen);

    HittingTimeStats runs[2] = {
        hitting_time_experiment(d, pair, mesh, o.offset_c2, std::nan(""), o.t_budget, o.n_paths, path_seed(seed, 1), o.dt, o.backend),
        hitting_time_experiment(d, pair, mesh, o.offset_c2, std::nan(""), o.t_budget, o.n_paths, path_seed(seed, 2), o.dt, o.backend),
    };
    const double diff = runs[0].exp_indicator_mean - runs[1].exp_indicator_mean;
    const double se = std::hypot(runs[0].exp_indicator_stderr, runs[1].exp_indicator_stderr);
    const double threshold = std::exp(pair.mu1 * o.offset_c2 * o.offset_c2 / 4.0);

    r.fitted_constants = {
        {"mu1", pair.mu1},
        {"offset_c2", o.offset_c2},
        {"t_budget", o.t_budget},
        {"barrier_x", runs[0].barrier_x},
        {"seed_agreement_z", se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : kInf)},
        {"exp_threshold", threshold},
    };
    for (int k = 0; k < 2; ++k) {
        const std::string tag = "[" + std::to_string(k + 1) + "]";
        r.fitted_constants["P_B" + tag] = runs[k].miss_fraction;
        r.fitted_constants["P_A" + tag] = runs[k].hit_fraction;
        r.fitted_constants["exp_indicator_mean" + tag] = runs[k].exp_indicator_mean;
        r.fitted_constants["exp_indicator_stderr" + tag] = runs[k].exp_indicator_stderr;
        r.fitted_constants["exp_functional" + tag] = runs[k].exp_functional;
        r.fitted_constants["median_T" + tag] = runs[k].quantiles.at(0.5);
        r.fitted_constants["min_T" + tag] = runs[k].min_time;
        r.tolerances.push_back({"P_B" + tag, CheckOp::le, o.max_miss_fraction});
        r.tolerances.push_back({"exp_indicator_mean" + tag, CheckOp::gt, 1.0});
        r.tolerances.push_back({"exp_functional" + tag, CheckOp::gt, threshold});
    }
    r.tolerances.push_back({"seed_agreement_z", CheckOp::le, 3.0});
    finish(r, t0);
    return r;
}

VerificationReport hitting_time_control(double offset_c2, std::size_t n_paths, std::uint64_t seed, double rel_tol,
                                        Backend backend) {
    const auto t0 = Clock::now();
    if (!(offset_c2 > 0.0)) throw InputError("control offset must be positive");
    const double length = std::max(40.0, 20.0 * offset_c2);
    const ConvexDomain strip = make_rectangle(length, 2.0);
    VerificationReport r = start_report(LemmaId::hitting_time, strip, seed);
    const double z = boost::math::quantile(boost::math::complement(boost::math::normal(), 0.25));
    const double oracle = offset_c2 * offset_c2 / (2.0 * z * z);
    const HittingTimeStats s =
        hitting_times(strip, {0.5 * length + offset_c2, 1.0}, 0.5 * length, 0.0, 50.0 * oracle, 1e-3, n_paths, seed, backend);
    r.fitted_constants = {
        {"median_T", s.quantiles.at(0.5)},
        {"oracle_median", oracle},
        {"P_A", s.hit_fraction},
        {"offset_c2", offset_c2},
        {"n_paths", static_cast<double>(n_paths)},
    };
    r.tolerances = {{"median_T", CheckOp::within_rel, rel_tol, oracle}};
    r.notes["control"] = "long strip, 1D first-passage oracle";
    finish(r, t0);
    return r;
}

VerificationReport verify_stationarity(const ConvexDomain& domain, std::uint64_t seed, const StationarityOptions& o) {
    const auto t0 = Clock::now();
    if (o.slabs < 2) throw InputError("stationarity needs at least 2 slabs");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    VerificationReport r = start_report(LemmaId::stationarity, domain, seed);
    const ConvexDomain d = normalize(domain).first;
    const Incircle inc = inradius_incenter(d);
    const double diam = diameter(d).length;
    Vec2 left = d.vertex(0);
    for (const Vec2& v : d.vertices())
        if (v.x < left.x) left = v;
    const Vec2 start = inc.center + (left - inc.center) * 0.8;
    const double t = o.time_factor * diam * diam;
    const PathEnsemble ens = simulate(d, start, t, 1e-3 * inc.radius * inc.radius, o.n_paths, seed, o.backend);

    const std::vector<double> cuts = equal_area_slabs(d, o.slabs);
    std::vector<double> counts(static_cast<std::size_t>(o.slabs), 0.0);
    for (const Vec2& p : ens.endpoints) {
        const auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, p.x);
        counts[static_cast<std::size_t>(it - (cuts.begin() + 1))] += 1.0;
    }
    const double expected = static_cast<double>(o.n_paths) / o.slabs;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const double critical =
        boost::math::quantile(boost::math::complement(boost::math::chi_squared(static_cast<double>(o.slabs - 1)), o.alpha));

    r.fitted_constants = {
        {"chi2", chi2},
        {"chi2_critical", critical},
        {"slabs", static_cast<double>(o.slabs)},
        {"t", t},
        {"dt", ens.dt},
        {"n_paths", static_cast<double>(o.n_paths)},
        {"min_slab_count", *std::min_element(counts.begin(), counts.end())},
        {"max_slab_count", *std::max_element(counts.begin(), counts.end())},
    };
    r.tolerances = {{"chi2", CheckOp::le, critical}};
    finish(r, t0);
    return r;
}

}  // namespace hotspots
