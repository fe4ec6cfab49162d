#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hotspots/mesh.hpp"

namespace hotspots {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 stiffness and consistent mass matrices.
struct FemMatrices {
    SparseMatrix K;
    SparseMatrix M;
};

/// Element stiffness of the P1 triangle (a, b, c) by the cotangent formula.
std::array<std::array<double, 3>, 3> element_stiffness(Vec2 a, Vec2 b, Vec2 c);
/// Element consistent mass: area/12 * [[2,1,1],[1,2,1],[1,1,2]].
std::array<std::array<double, 3>, 3> element_mass(Vec2 a, Vec2 b, Vec2 c);

FemMatrices assemble(const TriMesh& mesh);

enum class SignConvention { max_on_right };

/// First nontrivial Neumann eigenpair on a mesh.
struct EigenPair {
    double mu1 = 0.0;
    Eigen::VectorXd phi;
    SignConvention sign_convention = SignConvention::max_on_right;
    /// ||K phi - mu1 M phi|| / ||M phi||
    double residual = 0.0;
    bool multiplicity_flag = false;
    double mu2 = 0.0;
    int iterations = 0;
};

struct EigenOptions {
    /// Relative residual target for both returned Ritz pairs.
    double tol = 1e-10;
    int max_iterations = 500;
    int block_size = 6;
    std::uint64_t seed = 0x5eedULL;
};

/// Smallest nonzero generalized eigenpair of (K, M) by shift-invert block
/// iteration with the constant mode projected out at every step. `nodes`
/// fixes the sign convention (global max to the right of the global min).
EigenPair solve_first_eigenpair(const FemMatrices& fem, const std::vector<Vec2>& nodes, const EigenOptions& options = {});
EigenPair solve_first_eigenpair(const TriMesh& mesh, const EigenOptions& options = {});

/// Applies the max-on-right convention in place; returns true when phi was negated.
bool apply_sign_convention(Eigen::VectorXd& phi, const std::vector<Vec2>& nodes);

/// P1 interpolation of phi at p.
double evaluate(const EigenPair& pair, const TriMesh& mesh, Vec2 p);
double interpolate(const Eigen::VectorXd& values, const TriMesh& mesh, Vec2 p);

struct ExtremalPoint {
    Vec2 point;
    double value = 0.0;
    int node = -1;
};

/// Nodes within a relative band of the global max (min), grouped into
/// mesh-connected components.
struct HotSpotSet {
    /// One extremal node per connected component of the band.
    std::vector<ExtremalPoint> maxima;
    std::vector<ExtremalPoint> minima;
    /// Every node inside the band.
    std::vector<ExtremalPoint> max_band;
    std::vector<ExtremalPoint> min_band;
    double band_epsilon = 1e-3;
};

HotSpotSet hot_spots(const EigenPair& pair, const TriMesh& mesh, double band_epsilon = 1e-3);

struct NodalLineReport {
    std::vector<std::array<Vec2, 2>> crossing_segments;
    double x_projection_width = 0.0;
    /// Gap between the nodal line's x-range and the x-coordinate of the global max.
    double distance_to_max_fiber = 0.0;
    /// Set when the eigenvalue is (nearly) multiple and the line is not meaningful.
    bool degenerate = false;
};

NodalLineReport nodal_line_report(const EigenPair& pair, const TriMesh& mesh);

}  // namespace hotspots
