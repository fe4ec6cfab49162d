#include <vector>

#include <Eigen/SparseCore>

#include "hotspots/errors.hpp"
#include "hotspots/spectral.hpp"

namespace hotspots {

std::array<std::array<double, 3>, 3> element_stiffness(Vec2 a, Vec2 b, Vec2 c) {
    // grad(lambda_i) is the edge opposite vertex i rotated by 90 degrees over 2A
    const std::array<Vec2, 3> e{c - b, a - c, b - a};
    const double area = 0.5 * cross(b - a, c - a);
    if (!(area > 0.0)) throw InputError("degenerate or clockwise element");
    std::array<std::array<double, 3>, 3> k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[i][j] = dot(e[i], e[j]) / (4.0 * area);
    return k;
}

std::array<std::array<double, 3>, 3> element_mass(Vec2 a, Vec2 b, Vec2 c) {
    const double area = 0.5 * cross(b - a, c - a);
    std::array<std::array<double, 3>, 3> m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    return m;
}

FemMatrices assemble(const TriMesh& mesh) {
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(9 * mesh.triangle_count());
    mt.reserve(9 * mesh.triangle_count());
    const auto& p = mesh.nodes();
    for (const auto& tri : mesh.triangles()) {
        const auto ke = element_stiffness(p[tri[0]], p[tri[1]], p[tri[2]]);
        const auto me = element_mass(p[tri[0]], p[tri[1]], p[tri[2]]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri[i], tri[j], ke[i][j]);
                mt.emplace_back(tri[i], tri[j], me[i][j]);
            }
    }
    FemMatrices fem{SparseMatrix(n, n), SparseMatrix(n, n)};
    fem.K.setFromTriplets(kt.begin(), kt.end());
    fem.M.setFromTriplets(mt.begin(), mt.end());
    return fem;
}

}  // namespace hotspots
