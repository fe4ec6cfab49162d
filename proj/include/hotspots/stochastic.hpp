#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hotspots/geometry.hpp"
#include "hotspots/mesh.hpp"
#include "hotspots/spectral.hpp"

namespace hotspots {

/// How path ensembles are executed. Both backends produce bit-identical
/// results for the same seed.
enum class Backend { serial, openmp };

/// Worker count for the OpenMP backend: HOTSPOTS_NUM_THREADS if set,
/// otherwise the OpenMP default. Always 1 without OpenMP.
int worker_count();

/// Seed of path `index` under master seed `seed`: splitmix64 applied to
/// seed + (index + 1) * 0x9E3779B97F4A7C15.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// Reflected Brownian motion with generator Laplacian: each coordinate gets
/// a Gaussian increment of variance 2 dt per step.
struct PathEnsemble {
    Vec2 start;
    double t_final = 0.0;
    double dt = 0.0;  // step actually used (t_final / n_steps)
    std::size_t n_paths = 0;
    std::vector<Vec2> endpoints;
    std::uint64_t rng_seed = 0;
};

/// One Euler proposal from `from` to `to` made admissible: specular
/// reflection across the first edge crossed, up to `max_reflections` times,
/// then projection plus a 1e-9 inward step.
Vec2 reflect_into(const ConvexDomain& domain, Vec2 from, Vec2 to, int max_reflections = 8);

/// `substeps` > 1 builds each increment from that many finer draws: the law is
/// unchanged, but the run shares its random stream with one at dt / substeps,
/// which couples the two for time-step refinement studies.
PathEnsemble simulate(const ConvexDomain& domain, Vec2 start, double t_final, double dt, std::size_t n_paths,
                      std::uint64_t seed, Backend backend = Backend::openmp, int substeps = 1);

struct FeynmanKacReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double standard_error = 0.0;
    double z_score = 0.0;
    double relative_error = 0.0;
    /// 3 standard errors (relative) plus sqrt(dt) + h^2 discretization allowance.
    double error_budget = 0.0;
    bool within_3_sigma = false;
    bool pass = false;
    double t = 0.0, dt = 0.0, h = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Compares the sample mean of f(B_x(t)) with e^{-mu t} f(x).
FeynmanKacReport feynman_kac_check(const ConvexDomain& domain, const std::function<double(Vec2)>& f, double mu, Vec2 start,
                                   double t, std::size_t n_paths, std::uint64_t seed, double dt = 1e-4, double h = 0.0,
                                   Backend backend = Backend::openmp);
FeynmanKacReport feynman_kac_check(const ConvexDomain& domain, const EigenPair& pair, const TriMesh& mesh, Vec2 start,
                                   double t, std::size_t n_paths, std::uint64_t seed, double dt = 1e-4,
                                   Backend backend = Backend::openmp);

/// Endpoint histogram over mesh triangles, as a density per unit area.
struct HeatKernelEstimate {
    Vec2 source;
    double time = 0.0;
    std::vector<double> cell_areas;
    std::vector<Vec2> cell_centers;
    std::vector<std::uint64_t> counts;
    std::vector<double> density;
    std::size_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
};

HeatKernelEstimate bin_endpoints(const TriMesh& mesh, const PathEnsemble& ensemble);
HeatKernelEstimate estimate_heat_kernel(const ConvexDomain& domain, const TriMesh& mesh, Vec2 source, double t,
                                        std::size_t n_paths, std::uint64_t seed, double dt = 1e-4,
                                        Backend backend = Backend::openmp);

struct HittingTimeStats {
    Vec2 start;
    double barrier_x = 0.0;
    double offset_c2 = 0.0;
    double t_budget = 0.0;
    double mu1_used = 0.0;
    /// P(A): fraction of paths that reached the barrier within t_budget.
    double hit_fraction = 0.0;
    /// P(B) = 1 - P(A).
    double miss_fraction = 0.0;
    /// Mean of e^{mu T} over paths in A.
    double exp_functional = 0.0;
    /// E(e^{mu T} 1_A) over all paths, with its standard error.
    double exp_indicator_mean = 0.0;
    double exp_indicator_stderr = 0.0;
    double min_time = 0.0;
    /// Quantiles of T over all paths; misses count as +infinity.
    std::map<double, double> quantiles;
    std::size_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
};

/// First passage of reflected BM from `start` to the vertical line x = barrier_x,
/// with the crossing time interpolated linearly inside the step.
HittingTimeStats hitting_times(const ConvexDomain& domain, Vec2 start, double barrier_x, double mu, double t_budget, double dt,
                               std::size_t n_paths, std::uint64_t seed, Backend backend = Backend::openmp);

/// Fiber experiment on a normalized domain: barrier at distance offset_c2 from
/// the x_max fiber toward the nodal line; paths start at (x_max.x, start_y).
HittingTimeStats hitting_time_experiment(const ConvexDomain& domain, const EigenPair& pair, const TriMesh& mesh, double offset_c2,
                                         double start_y, double t_budget, std::size_t n_paths, std::uint64_t seed,
                                         double dt = 1e-3, Backend backend = Backend::openmp);

struct KernelDominationReport {
    double c_delta_hat = 0.0;
    int sup_ratio_cell = -1;
    Vec2 sup_ratio_center;
    std::size_t cells_used = 0;
    double delta = 0.0;
    double t_ref = 1.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Largest ratio p_delta(x, .) / p_tref(y, .) over cells where the reference
/// kernel has at least `min_count` endpoints.
KernelDominationReport verify_kernel_domination(const ConvexDomain& domain, const TriMesh& mesh, Vec2 x, Vec2 y, double delta,
                                                std::size_t n_paths, std::uint64_t seed, double t_ref = 1.0, double dt = 1e-4,
                                                std::uint64_t min_count = 20, Backend backend = Backend::openmp);

}  // namespace hotspots
