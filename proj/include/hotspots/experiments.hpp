#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hotspots/geometry.hpp"
#include "hotspots/mesh.hpp"
#include "hotspots/spectral.hpp"
#include "hotspots/stochastic.hpp"

namespace hotspots {

enum class LemmaId {
    main_theorem,
    lemma1,
    lemma2,
    lemma3,
    lemma4,
    theorem1_bounds,
    eigenvalue_scaling,
    nodal_width,
    hitting_time,
    stationarity,
};

std::string to_string(LemmaId id);
LemmaId lemma_id_from_string(const std::string& name);

/// One inequality on a named fitted constant. `within_rel` means
/// |value - target| <= bound * |target|; `finite` ignores bound and target.
enum class CheckOp { le, lt, ge, gt, within_rel, finite };

std::string to_string(CheckOp op);
CheckOp check_op_from_string(const std::string& name);

struct Check {
    std::string constant;
    CheckOp op = CheckOp::le;
    double bound = 0.0;
    double target = 0.0;
};

/// False when the constant is missing or NaN.
bool check_holds(const Check& check, const std::map<std::string, double>& constants);

struct VerificationReport {
    LemmaId lemma = LemmaId::main_theorem;
    std::string domain_label;
    Provenance domain;
    std::map<std::string, double> fitted_constants;
    std::vector<Check> tolerances;
    std::map<std::string, std::string> notes;
    bool pass = false;
    double runtime_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Recomputes pass from fitted_constants and tolerances alone.
bool evaluate_pass(const VerificationReport& report);

/// Short human-readable description, e.g. "ellipse(semi_major=8,semi_minor=1,k=256)".
std::string domain_label(const ConvexDomain& d);

// --- domain families ---------------------------------------------------------

enum class FamilyKind { rectangles, ellipses, stadiums, random_hulls, triangles };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Rectangles: N x 1 for each N in `parameters`. Ellipses: semi-axes (a, 1).
/// Stadiums: total length a times width, radius 1. Random hulls and
/// triangles: `count` members with box length drawn from
/// [length_min, length_max]; hulls use `points` uniform points in the box,
/// triangles have vertices (0, 0), (M, 0), (u M, 1).
struct FamilyConfig {
    FamilyKind kind = FamilyKind::rectangles;
    std::vector<double> parameters;
    int count = 0;
    int points = 12;
    double length_min = 4.0;
    double length_max = 12.0;
    int polygonalization_k = 256;
};

std::vector<ConvexDomain> domain_family(const FamilyConfig& config, std::uint64_t seed);

/// Runs fn on every member; with the OpenMP backend members run concurrently.
/// Exceptions are rethrown after all members finish (the first by index wins).
std::vector<VerificationReport> run_over_family(const std::vector<ConvexDomain>& family,
                                                const std::function<VerificationReport(const ConvexDomain&)>& fn,
                                                Backend backend = Backend::serial);

// --- spectral verifications --------------------------------------------------

/// Mesh size for spectral work is in normalized units (inradius 1).
struct MainTheoremOptions {
    double h = 0.1;
    double band_epsilon = 1e-3;
    double c_max = 10.0;
    double pair_rel_tol = 1e-9;
    EigenOptions eigen;
};

/// The band is the exact superlevel set {phi_h >= (1 - eps) max} of the P1
/// interpolant (and its sublevel twin at the minimum), so the fitted c does
/// not jump with the node spacing. Constants: c_band_best_pair (the fitted c), c_band_worst_pair,
/// c_rep_best_pair, c_rep_worst_pair, c_rep_orthogonal_pair, aspect_N, mu1,
/// multiplicity_flag, diameter_pairs, lemma1_c_estimate, h.
VerificationReport verify_main_theorem(const ConvexDomain& domain, const MainTheoremOptions& options = {});

/// Wraps verify_diameter_clustering; non-elongated domains get a note.
VerificationReport verify_lemma1(const ConvexDomain& domain, double c_max = 10.0, double rel_tol = 1e-3);

struct Lemma4Options {
    double h = 0.1;
    double radius = 1.0;
    double c_max = 100.0;
    double min_aspect = 8.0;
    int circle_samples = 720;
    EigenOptions eigen;
};

/// m = min of phi over the radius-ball at x_max (mesh nodes plus P1 samples on
/// the circle); c = -log(m / phi(x_max)) / mu1. Also reports the geometric
/// form c_geometric = (1 - m / phi(x_max)) (diam / inrad)^2.
VerificationReport verify_lemma4(const ConvexDomain& domain, const Lemma4Options& options = {});

struct EigenvalueScalingOptions {
    double h = 0.1;
    double c_max = 4.0 * 9.869604401089358;
    double rectangle_rel_tol = 0.01;
    EigenOptions eigen;
};

/// mu1 * L^2 per member, L the x-extent after normalization (scale free).
/// Constants are keyed "mu1_L2[i]".
VerificationReport eigenvalue_scaling(const std::vector<ConvexDomain>& family, const EigenvalueScalingOptions& options = {});

struct NodalWidthOptions {
    double h = 0.1;
    double width_max = 0.5;
    double ratio_max = 25.0;
    EigenOptions eigen;
};

/// x-projection width of the zero set in normalized units and width * L.
VerificationReport verify_nodal_width(const ConvexDomain& domain, const NodalWidthOptions& options = {});

// --- geometric and stochastic verifications ----------------------------------

/// Samples x uniformly in the normalized domain and y uniformly in the unit
/// ball around x, plus adversarial placements at every vertex; reports the
/// range of V(x, 1) / V(y, delta).
VerificationReport verify_volume_comparability(const ConvexDomain& domain, double delta, std::size_t n_pairs,
                                               std::uint64_t seed);

/// Kernel domination on a normalized domain (x, y in its coordinates).
VerificationReport verify_lemma3(const ConvexDomain& domain, const TriMesh& bin_mesh, Vec2 x, Vec2 y, double delta,
                                 std::size_t n_paths, std::uint64_t seed, double dt = 1e-4,
                                 Backend backend = Backend::openmp);

/// One point of the Gaussian-envelope fit: s = |x - z|^2 / t and
/// y = log(p_hat(z) * V(x, sqrt t)).
struct EnvelopeSample {
    double s = 0.0;
    double y = 0.0;
};

struct GaussianBoundFit {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    std::size_t violation_count = 0;
    std::size_t cells_used = 0;
    std::vector<EnvelopeSample> samples;
};

/// Envelope lines log c1 - c2 s <= y <= log c3 - c4 s. The exponent is the
/// least-squares decay rate of y in s (floored at `min_exponent`), shared by
/// both lines; c1 and c3 are then the tightest intercepts with no violations.
GaussianBoundFit fit_envelope(std::vector<EnvelopeSample> samples, double min_exponent = 1e-3);

/// Points that violate the envelope by more than 1e-12 in log scale.
std::size_t envelope_violations(const GaussianBoundFit& fit, const std::vector<EnvelopeSample>& samples);

struct GaussianFitOptions {
    std::size_t n_paths = 20000;
    std::uint64_t min_count = 20;
    /// 0 picks min(1e-3 inrad^2, t / 500).
    double dt = 0.0;
    double min_exponent = 1e-3;
    Backend backend = Backend::openmp;
};

/// Pools every (source, time) kernel estimate binned on `bin_mesh` into one fit.
GaussianBoundFit fit_gaussian_bounds(const ConvexDomain& domain, const TriMesh& bin_mesh, const std::vector<Vec2>& sources,
                                     const std::vector<double>& times, std::uint64_t seed,
                                     const GaussianFitOptions& options = {});

VerificationReport verify_gaussian_bounds(const ConvexDomain& domain, const TriMesh& bin_mesh, const std::vector<Vec2>& sources,
                                          const std::vector<double>& times, std::uint64_t seed,
                                          const GaussianFitOptions& options = {});

struct HittingTimeOptions {
    double h = 0.1;
    double offset_c2 = 2.0;
    double t_budget = 50.0;
    std::size_t n_paths = 10000;
    double dt = 1e-3;
    double max_miss_fraction = 0.01;
    EigenOptions eigen;
    Backend backend = Backend::openmp;
};

/// Two independent seeds (path_seed(seed, 1) and path_seed(seed, 2)) on the
/// normalized domain; checks P(B), E(e^{mu T} 1_A) > 1, seed agreement
/// within 3 sigma and exp_functional > e^{mu c2^2 / 4}.
VerificationReport verify_hitting_time(const ConvexDomain& domain, std::uint64_t seed, const HittingTimeOptions& options = {});

/// Long-strip control: median first-passage time over distance c2 against
/// the one-dimensional oracle c2^2 / (2 z_{3/4}^2), within rel_tol.
VerificationReport hitting_time_control(double offset_c2, std::size_t n_paths, std::uint64_t seed, double rel_tol = 0.2,
                                        Backend backend = Backend::openmp);

struct StationarityOptions {
    std::size_t n_paths = 100;
    int slabs = 5;
    double alpha = 0.01;
    /// t = time_factor * diam^2.
    double time_factor = 20.0;
    Backend backend = Backend::openmp;
};

/// Paths start near the leftmost vertex of the normalized domain; endpoints
/// are counted in equal-area vertical slabs and tested with chi-square.
VerificationReport verify_stationarity(const ConvexDomain& domain, std::uint64_t seed, const StationarityOptions& options = {});

}  // namespace hotspots
