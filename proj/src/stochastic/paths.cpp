#include <cstdlib>
#include <limits>
#include <string>

#include "hotspots/errors.hpp"
#include "walker.hpp"

namespace hotspots {

int worker_count() {
#ifdef HOTSPOTS_HAVE_OPENMP
    if (const char* env = std::getenv("HOTSPOTS_NUM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vec2 reflect_into(const ConvexDomain& d, Vec2 from, Vec2 to, int max_reflections) {
    const std::size_t n = d.size();
    for (int r = 0; r < max_reflections; ++r) {
        std::size_t hit = n;
        double first = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double vt = dot(d.normal(i), to) - d.offset(i);
            if (vt <= 0.0) continue;
            const double vf = dot(d.normal(i), from) - d.offset(i);
            const double s = vf >= 0.0 ? 0.0 : vf / (vf - vt);
            if (s < first) {
                first = s;
                hit = i;
            }
        }
        if (hit == n) return to;
        const Vec2 nrm = d.normal(hit);
        const double vt = dot(nrm, to) - d.offset(hit);
        from = from + (to - from) * first;
        to = to - nrm * (2.0 * vt);
    }
    if (d.contains(to, 0.0)) return to;

    // Fallback: project, then step inward along the normal of the worst edge.
    std::size_t worst = 0;
    double worst_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = dot(d.normal(i), to) - d.offset(i);
        if (v > worst_v) {
            worst_v = v;
            worst = i;
        }
    }
    Vec2 p = d.project(to) - d.normal(worst) * 1e-9;
    if (!d.contains(p, 0.0)) {
        // sharp corner: the normal step left the other edge; pull toward the centroid
        const Vec2 c = d.centroid();
        const Vec2 q = p;
        for (double s = 1e-9 / std::max(distance(c, q), 1e-300); !d.contains(p, 0.0) && s < 1.0; s *= 2.0) p = q + (c - q) * s;
        if (!d.contains(p, 0.0)) p = c;
    }
    return p;
}

PathEnsemble simulate(const ConvexDomain& domain, Vec2 start, double t_final, double dt, std::size_t n_paths, std::uint64_t seed,
                      Backend backend, int substeps) {
    if (!domain.contains(start, 1e-9 * domain.scale())) throw InputError("simulation start lies outside the domain");
    if (n_paths < 1) throw InputError("n_paths must be at least 1");
    if (!(t_final >= 0.0)) throw InputError("t_final must be non-negative");
    const double inrad = inradius_incenter(domain).radius;
    if (!(dt > 0.0) || dt > 1e-3 * inrad * inrad * (1.0 + 1e-12))
        throw InputError("dt must lie in (0, 1e-3 * inradius^2] = (0, " + std::to_string(1e-3 * inrad * inrad) + "]");
    if (substeps < 1) throw InputError("substeps must be at least 1");

    const detail::StepPlan plan = detail::plan_steps(t_final, dt);
    const double sigma = std::sqrt(2.0 * plan.dt / substeps);
    const detail::HalfPlanes hp(domain);
    const Vec2 s0 = domain.contains(start, 0.0) ? start : domain.project(start);

    PathEnsemble out;
    out.start = start;
    out.t_final = t_final;
    out.dt = plan.dt;
    out.n_paths = n_paths;
    out.rng_seed = seed;
    out.endpoints.resize(n_paths);
    detail::for_each_path(n_paths, backend, [&](std::size_t i) {
        detail::Rng rng(path_seed(seed, i));
        out.endpoints[i] = detail::walk_path(hp, s0, plan.n_steps, sigma, rng, [](std::size_t, Vec2, Vec2) { return false; }, substeps);
    });
    return out;
}

}  // namespace hotspots
