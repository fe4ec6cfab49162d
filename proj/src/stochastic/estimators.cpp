#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hotspots/errors.hpp"
#include "walker.hpp"

namespace hotspots {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MeanStderr {
    double mean;
    double stderr_;
};

// Two-pass mean and standard error, summed in path order.
MeanStderr mean_stderr(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace

FeynmanKacReport feynman_kac_check(const ConvexDomain& domain, const std::function<double(Vec2)>& f, double mu, Vec2 start,
                                   double t, std::size_t n_paths, std::uint64_t seed, double dt, double h, Backend backend) {
    const PathEnsemble ens = simulate(domain, start, t, dt, n_paths, seed, backend);
    std::vector<double> values(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) values[i] = f(ens.endpoints[i]);
    const MeanStderr ms = mean_stderr(values);

    FeynmanKacReport r;
    r.lhs = ms.mean;
    r.standard_error = ms.stderr_;
    r.rhs = std::exp(-mu * t) * f(start);
    const double diff = r.lhs - r.rhs;
    r.z_score = r.standard_error > 0.0 ? diff / r.standard_error : (diff == 0.0 ? 0.0 : std::copysign(kInf, diff));
    r.relative_error = std::abs(diff) / std::abs(r.rhs);
    r.error_budget = 3.0 * r.standard_error / std::abs(r.rhs) + std::sqrt(ens.dt) + h * h;
    r.within_3_sigma = std::abs(r.z_score) <= 3.0;
    r.pass = r.relative_error <= r.error_budget;
    r.t = t;
    r.dt = ens.dt;
    r.h = h;
    r.n_paths = n_paths;
    r.seed = seed;
    return r;
}

FeynmanKacReport feynman_kac_check(const ConvexDomain& domain, const EigenPair& pair, const TriMesh& mesh, Vec2 start, double t,
                                   std::size_t n_paths, std::uint64_t seed, double dt, Backend backend) {
    if (pair.phi.size() != static_cast<Eigen::Index>(mesh.node_count())) throw InputError("eigenpair was not solved on this mesh");
    const auto f = [&](Vec2 p) { return evaluate(pair, mesh, p); };
    return feynman_kac_check(domain, f, pair.mu1, start, t, n_paths, seed, dt, mesh.target_h(), backend);
}

HeatKernelEstimate bin_endpoints(const TriMesh& mesh, const PathEnsemble& ens) {
    HeatKernelEstimate est;
    const std::size_t m = mesh.triangle_count();
    est.source = ens.start;
    est.time = ens.t_final;
    est.n_paths = ens.n_paths;
    est.dt = ens.dt;
    est.seed = ens.rng_seed;
    est.cell_areas.resize(m);
    est.cell_centers.resize(m);
    est.counts.assign(m, 0);
    est.density.assign(m, 0.0);
    for (std::size_t t = 0; t < m; ++t) {
        est.cell_areas[t] = mesh.triangle_area(t);
        est.cell_centers[t] = mesh.triangle_centroid(t);
    }
    for (const Vec2& p : ens.endpoints) ++est.counts[static_cast<std::size_t>(mesh.locate(p).triangle)];
    const double n = static_cast<double>(ens.n_paths);
    for (std::size_t t = 0; t < m; ++t) est.density[t] = static_cast<double>(est.counts[t]) / (n * est.cell_areas[t]);
    return est;
}

HeatKernelEstimate estimate_heat_kernel(const ConvexDomain& domain, const TriMesh& mesh, Vec2 source, double t, std::size_t n_paths,
                                        std::uint64_t seed, double dt, Backend backend) {
    if (!(t > 0.0)) throw InputError("heat kernel time must be positive");
    if (n_paths < 10000) throw InputError("heat kernel estimation needs at least 10^4 paths");
    return bin_endpoints(mesh, simulate(domain, source, t, dt, n_paths, seed, backend));
}

HittingTimeStats hitting_times(const ConvexDomain& domain, Vec2 start, double barrier_x, double mu, double t_budget, double dt,
                               std::size_t n_paths, std::uint64_t seed, Backend backend) {
    if (!domain.contains(start, 1e-9 * domain.scale())) throw InputError("hitting-time start lies outside the domain");
    if (barrier_x < domain.min_corner().x || barrier_x > domain.max_corner().x)
        throw InputError("barrier x = " + std::to_string(barrier_x) + " lies outside the domain's x-range");
    if (!(t_budget > 0.0)) throw InputError("t_budget must be positive");
    if (n_paths < 1) throw InputError("n_paths must be at least 1");
    const double inrad = inradius_incenter(domain).radius;
    if (!(dt > 0.0) || dt > 1e-3 * inrad * inrad * (1.0 + 1e-12)) throw InputError("dt must lie in (0, 1e-3 * inradius^2]");

    const detail::StepPlan plan = detail::plan_steps(t_budget, dt);
    const double sigma = std::sqrt(2.0 * plan.dt);
    const detail::HalfPlanes hp(domain);
    const Vec2 s0 = domain.contains(start, 0.0) ? start : domain.project(start);
    const double side = s0.x >= barrier_x ? 1.0 : -1.0;

    std::vector<double> T(n_paths, kInf);
    if (s0.x == barrier_x) {
        std::fill(T.begin(), T.end(), 0.0);
    } else {
        detail::for_each_path(n_paths, backend, [&](std::size_t i) {
            detail::Rng rng(path_seed(seed, i));
            detail::walk_path(hp, s0, plan.n_steps, sigma, rng, [&](std::size_t k, Vec2 from, Vec2 to) {
                if ((to.x - barrier_x) * side > 0.0) return false;
                const double frac = (from.x - barrier_x) / (from.x - to.x);
                T[i] = (static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * plan.dt;
                return true;
            });
        });
    }

    HittingTimeStats s;
    s.start = start;
    s.barrier_x = barrier_x;
    s.offset_c2 = std::abs(s0.x - barrier_x);
    s.t_budget = t_budget;
    s.mu1_used = mu;
    s.n_paths = n_paths;
    s.dt = plan.dt;
    s.seed = seed;

    std::vector<double> weighted(n_paths, 0.0);
    std::size_t hits = 0;
    double exp_sum = 0.0;
    s.min_time = kInf;
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!std::isfinite(T[i])) continue;
        ++hits;
        weighted[i] = std::exp(mu * T[i]);
        exp_sum += weighted[i];
        s.min_time = std::min(s.min_time, T[i]);
    }
    s.hit_fraction = static_cast<double>(hits) / static_cast<double>(n_paths);
    s.miss_fraction = 1.0 - s.hit_fraction;
    s.exp_functional = hits > 0 ? exp_sum / static_cast<double>(hits) : 0.0;
    const MeanStderr ms = mean_stderr(weighted);
    s.exp_indicator_mean = ms.mean;
    s.exp_indicator_stderr = ms.stderr_;

    std::vector<double> sorted = T;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n_paths)));
        s.quantiles[q] = sorted[std::max<std::size_t>(rank, 1) - 1];
    }
    return s;
}

HittingTimeStats hitting_time_experiment(const ConvexDomain& domain, const EigenPair& pair, const TriMesh& mesh, double offset_c2,
                                         double start_y, double t_budget, std::size_t n_paths, std::uint64_t seed, double dt,
                                         Backend backend) {
    const double aspect = diameter(domain).length / inradius_incenter(domain).radius;
    if (aspect < 8.0) throw InputError("hitting-time experiment needs aspect_N >= 8, got " + std::to_string(aspect));
    if (!(offset_c2 >= 0.0)) throw InputError("offset_c2 must be non-negative");
    const HotSpotSet hs = hot_spots(pair, mesh, 1e-3);
    const Vec2 xmax = hs.maxima.front().point;
    const Vec2 xmin = hs.minima.front().point;
    const double toward_nodal_line = xmin.x < xmax.x ? -1.0 : 1.0;
    const double barrier = xmax.x + toward_nodal_line * offset_c2;
    const Vec2 start{xmax.x, std::isnan(start_y) ? xmax.y : start_y};
    HittingTimeStats s = hitting_times(domain, start, barrier, pair.mu1, t_budget, dt, n_paths, seed, backend);
    s.offset_c2 = offset_c2;
    return s;
}

KernelDominationReport verify_kernel_domination(const ConvexDomain& domain, const TriMesh& mesh, Vec2 x, Vec2 y, double delta,
                                                std::size_t n_paths, std::uint64_t seed, double t_ref, double dt,
                                                std::uint64_t min_count, Backend backend) {
    if (distance(x, y) > 1.0 + 1e-12) throw InputError("kernel domination needs |x - y| <= 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("delta must lie in (0, 1]");
    const HeatKernelEstimate num = bin_endpoints(mesh, simulate(domain, x, delta * t_ref, dt, n_paths, path_seed(seed, 0xD0D0), backend));
    const HeatKernelEstimate den = bin_endpoints(mesh, simulate(domain, y, t_ref, dt, n_paths, path_seed(seed, 0xE0E0), backend));

    KernelDominationReport r;
    r.delta = delta;
    r.t_ref = t_ref;
    r.n_paths = n_paths;
    r.seed = seed;
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        if (den.counts[c] < min_count) continue;
        ++r.cells_used;
        const double ratio = static_cast<double>(num.counts[c]) / static_cast<double>(den.counts[c]);
        if (ratio > r.c_delta_hat || r.sup_ratio_cell < 0) {
            r.c_delta_hat = ratio;
            r.sup_ratio_cell = static_cast<int>(c);
            r.sup_ratio_center = den.cell_centers[c];
        }
    }
    if (r.cells_used == 0)
        throw InputError("no cell reached " + std::to_string(min_count) + " reference endpoints; increase n_paths");
    return r;
}

}  // namespace hotspots
