#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hotspots/errors.hpp"
#include "hotspots/spectral.hpp"

namespace hotspots {

namespace {

// Removes the M-weighted mean (the constant eigenvector) from every column.
void deflate_constants(Eigen::MatrixXd& Y, const Eigen::VectorXd& m_ones, double total_mass) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) Y.col(j).array() -= m_ones.dot(Y.col(j)) / total_mass;
}

double residual_norm(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& x, double mu) {
    const Eigen::VectorXd mx = M * x;
    return (K * x - mu * mx).norm() / mx.norm();
}

}  // namespace

bool apply_sign_convention(Eigen::VectorXd& phi, const std::vector<Vec2>& nodes) {
    Eigen::Index imax = 0, imin = 0;
    phi.maxCoeff(&imax);
    phi.minCoeff(&imin);
    double scale = 0.0;
    for (const auto& p : nodes) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double tol = 1e-12 * std::max(scale, 1.0);
    const double dx = nodes[static_cast<std::size_t>(imax)].x - nodes[static_cast<std::size_t>(imin)].x;
    bool flip = dx < -tol;
    if (std::abs(dx) <= tol) {
        // symmetric tie: the rightmost node of largest |phi| must be positive
        const double peak = phi.cwiseAbs().maxCoeff();
        Eigen::Index pick = -1;
        for (Eigen::Index i = 0; i < phi.size(); ++i) {
            if (std::abs(phi[i]) < peak * (1.0 - 1e-12)) continue;
            const auto& p = nodes[static_cast<std::size_t>(i)];
            if (pick < 0) {
                pick = i;
                continue;
            }
            const auto& q = nodes[static_cast<std::size_t>(pick)];
            if (p.x > q.x || (p.x == q.x && p.y > q.y)) pick = i;
        }
        flip = phi[pick] < 0.0;
    }
    if (flip) phi = -phi;
    return flip;
}

EigenPair solve_first_eigenpair(const FemMatrices& fem, const std::vector<Vec2>& nodes, const EigenOptions& opt) {
    const SparseMatrix& K = fem.K;
    const SparseMatrix& M = fem.M;
    const Eigen::Index n = K.rows();
    const int b = opt.block_size;
    if (M.rows() != n || static_cast<Eigen::Index>(nodes.size()) != n) throw InputError("matrix and node sizes disagree");
    if (!(opt.tol >= 1e-12)) throw InputError("eigensolver tol must be at least 1e-12");
    if (b < 2 || n < b + 2) throw InputError("mesh too small for the block eigensolver");

    // Shift below mu1 using the convex-domain lower bound pi^2 / diam^2.
    Vec2 lo = nodes.front(), hi = nodes.front();
    for (const auto& p : nodes) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double sigma = 0.1 * std::numbers::pi * std::numbers::pi / norm2(hi - lo);

    const SparseMatrix shifted = K + sigma * M;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError("factorization of K + sigma M failed", 0.0);

    const Eigen::VectorXd m_ones = M * Eigen::VectorXd::Ones(n);
    const double total_mass = m_ones.sum();

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd X(n, b);
    for (Eigen::Index j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = u(rng);
    deflate_constants(X, m_ones, total_mass);

    Eigen::VectorXd theta;
    double r0 = INFINITY, r1 = INFINITY;
    int it = 0;
    for (it = 1; it <= opt.max_iterations; ++it) {
        Eigen::MatrixXd Y = ldlt.solve(M * X);
        deflate_constants(Y, m_ones, total_mass);
        const Eigen::MatrixXd MY = M * Y;
        for (Eigen::Index j = 0; j < b; ++j) {
            const double s = std::sqrt(Y.col(j).dot(MY.col(j)));
            Y.col(j) /= s;
        }
        const Eigen::MatrixXd KY = K * Y;
        Eigen::MatrixXd Kr = Y.transpose() * KY;
        Eigen::MatrixXd Mr = Y.transpose() * (M * Y);
        Kr = 0.5 * (Kr + Kr.transpose()).eval();
        Mr = 0.5 * (Mr + Mr.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(Kr, Mr);
        if (rr.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz step failed", r0);
        theta = rr.eigenvalues();
        X = Y * rr.eigenvectors();
        r0 = residual_norm(K, M, X.col(0), theta[0]);
        r1 = residual_norm(K, M, X.col(1), theta[1]);
        if (r0 <= opt.tol && r1 <= opt.tol) break;
    }
    if (it > opt.max_iterations)
        throw ConvergenceError("eigensolver did not converge in " + std::to_string(opt.max_iterations) +
                                   " iterations (residual " + std::to_string(r0) + ")",
                               r0);

    EigenPair pair;
    Eigen::MatrixXd phi = X.col(0);
    deflate_constants(phi, m_ones, total_mass);
    pair.phi = phi.col(0);
    pair.phi /= std::sqrt(pair.phi.dot(M * pair.phi));
    pair.mu1 = pair.phi.dot(K * pair.phi);
    pair.mu2 = theta[1];
    pair.residual = residual_norm(K, M, pair.phi, pair.mu1);
    pair.multiplicity_flag = (pair.mu2 - pair.mu1) / pair.mu1 < 1e-3;
    pair.iterations = it;
    apply_sign_convention(pair.phi, nodes);
    return pair;
}

EigenPair solve_first_eigenpair(const TriMesh& mesh, const EigenOptions& options) {
    return solve_first_eigenpair(assemble(mesh), mesh.nodes(), options);
}

}  // namespace hotspots
