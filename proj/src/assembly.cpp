#include "mixsym/assembly.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <string>

#include "mixsym/eigensolver.hpp"
#include "mixsym/errors.hpp"
#include "simplex.hpp"

namespace mixsym {

namespace {

using Triplet = Eigen::Triplet<double>;

std::array<Point, 4> cell_points(const Mesh& mesh, const Cell& c) {
    std::array<Point, 4> p{};
    for (int i = 0; i <= mesh.dimension(); ++i) p[i] = mesh.vertices()[c[i]];
    return p;
}

std::array<Point, 4> facet_points(const Mesh& mesh, const Facet& f) {
    std::array<Point, 4> p{};
    for (int i = 0; i < mesh.dimension(); ++i) p[i] = mesh.vertices()[f.vertices[i]];
    return p;
}

void check_field(const OperatorBundle& bundle, const ScalarField& u) {
    if (u.mesh_fingerprint != bundle.mesh_fingerprint || u.size() != bundle.dirichlet.size())
        throw Error(ErrorCode::MeshMismatch, "field does not belong to the bundle's mesh");
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& t) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

}  // namespace

ScalarField::ScalarField(const Mesh& mesh, Eigen::VectorXd v) : mesh_fingerprint(mesh.fingerprint()), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != mesh.num_vertices())
        throw Error(ErrorCode::MeshMismatch, "field length differs from vertex count");
}

ScalarField ScalarField::from_function(const Mesh& mesh, const std::function<double(const Point&)>& fn) {
    Eigen::VectorXd v(mesh.num_vertices());
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = fn(mesh.vertices()[i]);
    return ScalarField(mesh, std::move(v));
}

WeightSamples sample_weight(const Mesh& mesh, Support support, const PointWeight& weight, const Eigen::VectorXd* field) {
    WeightSamples out;
    out.support = support;
    const int dim = mesh.dimension();
    auto sample_simplex = [&](const std::array<Point, 4>& p, const int* ids, int nverts) {
        for (const auto& q : detail::quadrature(nverts)) {
            const Point x = detail::interpolate(std::span<const Point>(p.data(), nverts), q.bary);
            double u = 0.0;
            if (field)
                for (int i = 0; i < nverts; ++i) u += q.bary[i] * (*field)[ids[i]];
            out.values.push_back(weight(x, u));
        }
    };
    if (support == Support::Volume) {
        out.values.reserve(mesh.num_cells() * detail::quadrature(dim + 1).size());
        for (const auto& c : mesh.cells()) sample_simplex(cell_points(mesh, c), c.data(), dim + 1);
    } else {
        for (const auto& f : mesh.facets())
            if (f.tag == 2) sample_simplex(facet_points(mesh, f), f.vertices.data(), dim);
    }
    return out;
}

WeightSamples constant_weight(const Mesh& mesh, Support support, double value) {
    return sample_weight(mesh, support, [value](const Point&, double) { return value; });
}

SparseMatrix assemble_stiffness(const Mesh& mesh) {
    const int dim = mesh.dimension();
    std::vector<Triplet> t;
    t.reserve(mesh.num_cells() * (dim + 1) * (dim + 1));
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& cell = mesh.cells()[c];
        const auto p = cell_points(mesh, cell);
        const std::span<const Point> ps(p.data(), dim + 1);
        const double vol = detail::signed_volume(dim, ps);
        if (!(vol > 0.0)) throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(c));
        const auto g = detail::barycentric_gradients(dim, ps);
        for (int i = 0; i <= dim; ++i)
            for (int j = 0; j <= dim; ++j) {
                const double dot = g[i][0] * g[j][0] + g[i][1] * g[j][1] + g[i][2] * g[j][2];
                t.emplace_back(cell[i], cell[j], dot * vol);
            }
    }
    return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix assemble_weighted_mass(const Mesh& mesh, const WeightSamples& weight) {
    const int dim = mesh.dimension();
    std::vector<Triplet> t;
    std::size_t cursor = 0;
    auto add_simplex = [&](const std::array<Point, 4>& p, const int* ids, int nverts, double measure, std::size_t index) {
        if (!(measure > 0.0)) throw Error(ErrorCode::DegenerateCell, "simplex " + std::to_string(index));
        const auto& rule = detail::quadrature(nverts);
        std::array<double, 16> local{};
        for (const auto& q : rule) {
            if (cursor >= weight.values.size()) throw Error(ErrorCode::MeshMismatch, "weight samples too short");
            const double w = q.weight * measure * weight.values[cursor++];
            for (int i = 0; i < nverts; ++i)
                for (int j = 0; j < nverts; ++j) local[i * 4 + j] += w * q.bary[i] * q.bary[j];
        }
        for (int i = 0; i < nverts; ++i)
            for (int j = 0; j < nverts; ++j) t.emplace_back(ids[i], ids[j], local[i * 4 + j]);
        (void)p;
    };
    if (weight.support == Support::Volume) {
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const auto& cell = mesh.cells()[c];
            add_simplex(cell_points(mesh, cell), cell.data(), dim + 1, mesh.cell_volume(c), c);
        }
    } else {
        for (std::size_t f = 0; f < mesh.facets().size(); ++f) {
            const auto& facet = mesh.facets()[f];
            if (facet.tag != 2) continue;
            add_simplex(facet_points(mesh, facet), facet.vertices.data(), dim, mesh.facet_measure(f), f);
        }
    }
    if (cursor != weight.values.size()) throw Error(ErrorCode::MeshMismatch, "weight samples do not match the mesh");
    return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix assemble_mass(const Mesh& mesh, const WeightFunction& weight, Support support) {
    if (!weight) return assemble_weighted_mass(mesh, constant_weight(mesh, support, 1.0));
    return assemble_weighted_mass(mesh, sample_weight(mesh, support, [&](const Point& x, double) { return weight(x); }));
}

OperatorBundle make_bundle(const Mesh& mesh, WeightSamples c, WeightSamples d) {
    if (c.support != Support::Volume || d.support != Support::BoundaryGamma2)
        throw Error(ErrorCode::ConfigError, "c must be a volume weight and d a Gamma_2 weight");
    OperatorBundle b;
    b.mesh_fingerprint = mesh.fingerprint();
    b.dimension = mesh.dimension();
    b.K = assemble_stiffness(mesh);
    b.M_vol = assemble_weighted_mass(mesh, constant_weight(mesh, Support::Volume, 1.0));
    b.M_bnd = assemble_weighted_mass(mesh, constant_weight(mesh, Support::BoundaryGamma2, 1.0));
    b.M_c = assemble_weighted_mass(mesh, c);
    b.M_d = assemble_weighted_mass(mesh, d);
    b.c = std::move(c);
    b.d = std::move(d);
    b.dirichlet = mesh.dirichlet_mask();
    b.free_index.assign(mesh.num_vertices(), -1);
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (!b.dirichlet[v]) {
            b.free_index[v] = static_cast<int>(b.free_vertices.size());
            b.free_vertices.push_back(static_cast<int>(v));
        }
    return b;
}

OperatorBundle make_bundle(const Mesh& mesh, const WeightFunction& c, const WeightFunction& d) {
    auto wrap = [](const WeightFunction& w) -> PointWeight {
        if (!w) return [](const Point&, double) { return 0.0; };
        return [w](const Point& x, double) { return w(x); };
    };
    return make_bundle(mesh, sample_weight(mesh, Support::Volume, wrap(c)),
                       sample_weight(mesh, Support::BoundaryGamma2, wrap(d)));
}

double bilinear_value(const OperatorBundle& bundle, const ScalarField& u, const ScalarField& v) {
    check_field(bundle, u);
    check_field(bundle, v);
    return u.values.dot(bundle.K * v.values + bundle.M_c * v.values + bundle.M_d * v.values);
}

double product_inner(const OperatorBundle& bundle, const ScalarField& u, const ScalarField& v) {
    check_field(bundle, u);
    check_field(bundle, v);
    return u.values.dot(bundle.M_vol * v.values + bundle.M_bnd * v.values);
}

SparseMatrix restrict_matrix(const SparseMatrix& m, const std::vector<int>& keep) {
    std::vector<int> index(static_cast<std::size_t>(m.rows()), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) index[keep[i]] = static_cast<int>(i);
    std::vector<Triplet> t;
    for (int col : keep) {
        for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
            const int r = index[it.row()];
            if (r >= 0) t.emplace_back(r, index[col], it.value());
        }
    }
    return from_triplets(keep.size(), t);
}

Eigen::VectorXd extend_by_zero(const Eigen::VectorXd& reduced, const std::vector<int>& keep, std::size_t n) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = reduced[static_cast<Eigen::Index>(i)];
    return full;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, const std::vector<int>& keep) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) r[static_cast<Eigen::Index>(i)] = full[keep[i]];
    return r;
}

double coercive_shift(OperatorBundle& bundle) {
    for (double w : bundle.c.values)
        if (!std::isfinite(w)) throw Error(ErrorCode::ShiftOverflow, "non-finite volume weight");
    for (double w : bundle.d.values)
        if (!std::isfinite(w)) throw Error(ErrorCode::ShiftOverflow, "non-finite boundary weight");
    const SparseMatrix A = restrict_matrix(bundle.form(), bundle.free_vertices);
    const SparseMatrix B = restrict_matrix(bundle.product_mass(), bundle.free_vertices);
    constexpr double kMargin = 1e-10;
    double lambda = 0.0;
    while (lambda <= std::ldexp(1.0, 60)) {
        if (positive_definite(A + lambda * B, kMargin)) {
            bundle.shift = lambda;
            return lambda;
        }
        lambda = lambda == 0.0 ? 1.0 : 2.0 * lambda;
    }
    throw Error(ErrorCode::ShiftOverflow, "no coercive shift up to 2^60");
}

}  // namespace mixsym
