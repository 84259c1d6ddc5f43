#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mixsym/geometry.hpp"

namespace mixsym {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal P1 coefficients on a specific mesh.
struct ScalarField {
    std::uint64_t mesh_fingerprint = 0;
    Eigen::VectorXd values;

    ScalarField() = default;
    ScalarField(const Mesh& mesh, Eigen::VectorXd v);
    static ScalarField zeros(const Mesh& mesh) { return ScalarField(mesh, Eigen::VectorXd::Zero(mesh.num_vertices())); }
    static ScalarField from_function(const Mesh& mesh, const std::function<double(const Point&)>& fn);
    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

enum class Support { Volume, BoundaryGamma2 };

/// Weight evaluated at a quadrature point; `u` is the value of the attached
/// field there (0 when no field is attached).
using PointWeight = std::function<double(const Point& x, double u)>;
using WeightFunction = std::function<double(const Point& x)>;

/// Weight values at every quadrature point, cell-major (Volume) or over the
/// tag-2 facets in mesh order (BoundaryGamma2).
struct WeightSamples {
    Support support = Support::Volume;
    std::vector<double> values;
};

WeightSamples sample_weight(const Mesh& mesh, Support support, const PointWeight& weight,
                            const Eigen::VectorXd* field = nullptr);
WeightSamples constant_weight(const Mesh& mesh, Support support, double value);

/// K_ij = int grad(phi_i) . grad(phi_j).
SparseMatrix assemble_stiffness(const Mesh& mesh);
/// Consistent mass matrix, weight sampled at the quadrature points of a rule
/// that is exact for P1 x P1 products. An empty weight means 1.
SparseMatrix assemble_mass(const Mesh& mesh, const WeightFunction& weight, Support support);
SparseMatrix assemble_weighted_mass(const Mesh& mesh, const WeightSamples& weight);

/// Matrices of B(u, v) = int grad u.grad v + int c u v + int_{Gamma_2} d u v
/// and of the product inner product on L2(Omega) x L2(Gamma_2).
struct OperatorBundle {
    std::uint64_t mesh_fingerprint = 0;
    int dimension = 1;
    SparseMatrix K, M_vol, M_bnd, M_c, M_d;
    WeightSamples c, d;
    std::vector<bool> dirichlet;     // per vertex
    std::vector<int> free_vertices;  // ascending
    std::vector<int> free_index;     // vertex -> reduced index, -1 if constrained
    std::optional<double> shift;

    std::size_t num_free() const { return free_vertices.size(); }
    SparseMatrix form() const { return K + M_c + M_d; }
    SparseMatrix product_mass() const { return M_vol + M_bnd; }
};

OperatorBundle make_bundle(const Mesh& mesh, WeightSamples c, WeightSamples d);
OperatorBundle make_bundle(const Mesh& mesh, const WeightFunction& c = {}, const WeightFunction& d = {});

double bilinear_value(const OperatorBundle& bundle, const ScalarField& u, const ScalarField& v);
double product_inner(const OperatorBundle& bundle, const ScalarField& u, const ScalarField& v);

/// Smallest Lambda in {0, 1, 2, 4, ...} making K + M_c + M_d + Lambda (M_vol + M_bnd)
/// positive definite (smallest eigenvalue above 1e-10) on the free vertices.
/// Stores the result in bundle.shift.
double coercive_shift(OperatorBundle& bundle);

/// Principal submatrix on the given (ascending) index list.
SparseMatrix restrict_matrix(const SparseMatrix& m, const std::vector<int>& keep);
/// Reduced vector -> full-length vector with zeros elsewhere.
Eigen::VectorXd extend_by_zero(const Eigen::VectorXd& reduced, const std::vector<int>& keep, std::size_t n);
Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, const std::vector<int>& keep);

}  // namespace mixsym
