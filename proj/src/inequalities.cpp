#include "mixsym/inequalities.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "mixsym/eigensolver.hpp"
#include "mixsym/errors.hpp"

namespace mixsym {

namespace {

std::vector<int> free_list(const Mesh& mesh) {
    const auto dir = mesh.dirichlet_mask();
    if (std::none_of(dir.begin(), dir.end(), [](bool b) { return b; }))
        throw Error(ErrorCode::NoDirichlet, "Gamma_1 is empty; the constant is infinite");
    std::vector<int> keep;
    for (std::size_t v = 0; v < dir.size(); ++v)
        if (!dir[v]) keep.push_back(static_cast<int>(v));
    return keep;
}

ScalarField field_on(const Mesh& mesh, const Eigen::VectorXd& reduced, const std::vector<int>& keep) {
    return ScalarField(mesh, extend_by_zero(reduced, keep, mesh.num_vertices()));
}

struct SteklovData {
    std::vector<int> free;
    std::vector<int> boundary, interior;   // positions inside `free`
    Eigen::VectorXd sigma;
    Eigen::MatrixXd vectors;               // full free-space vectors, columns
};

SteklovData steklov(const Mesh& mesh) {
    SteklovData out;
    out.free = free_list(mesh);
    const auto g2 = mesh.gamma2_mask();
    for (std::size_t i = 0; i < out.free.size(); ++i)
        (g2[out.free[i]] ? out.boundary : out.interior).push_back(static_cast<int>(i));
    if (out.boundary.empty()) throw Error(ErrorCode::NoGamma2, "no free Gamma_2 vertices");

    const SparseMatrix K = restrict_matrix(assemble_stiffness(mesh), out.free);
    const SparseMatrix Mb = restrict_matrix(assemble_mass(mesh, {}, Support::BoundaryGamma2), out.free);
    const Eigen::MatrixXd Kgg = Eigen::MatrixXd(restrict_matrix(K, out.boundary));
    const Eigen::MatrixXd Mgg = Eigen::MatrixXd(restrict_matrix(Mb, out.boundary));
    const auto nb = static_cast<Eigen::Index>(out.boundary.size());
    const auto ni = static_cast<Eigen::Index>(out.interior.size());

    // harmonic extension x_I = -K_II^{-1} K_IG x_G
    Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(ni, nb);
    Eigen::MatrixXd schur = Kgg;
    if (ni > 0) {
        const SparseMatrix Kii = restrict_matrix(K, out.interior);
        Eigen::MatrixXd Kig(ni, nb);
        for (Eigen::Index a = 0; a < ni; ++a)
            for (Eigen::Index b = 0; b < nb; ++b) Kig(a, b) = K.coeff(out.interior[a], out.boundary[b]);
        Eigen::SimplicialLDLT<SparseMatrix> solver(Kii);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorCode::NotConverged, "interior stiffness factorization failed");
        ext = -solver.solve(Kig);
        schur += Kig.transpose() * ext;
    }
    schur = 0.5 * (schur + schur.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur, Mgg);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NotConverged, "Steklov eigenproblem failed");
    out.sigma = es.eigenvalues();
    out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.free.size()), nb);
    for (Eigen::Index b = 0; b < nb; ++b) out.vectors.row(out.boundary[b]) = es.eigenvectors().row(b);
    if (ni > 0) {
        const Eigen::MatrixXd inner = ext * es.eigenvectors();
        for (Eigen::Index a = 0; a < ni; ++a) out.vectors.row(out.interior[a]) = inner.row(a);
    }
    return out;
}

}  // namespace

std::string_view to_string(ConstantKind kind) {
    switch (kind) {
        case ConstantKind::PoincareVolume: return "poincare_volume";
        case ConstantKind::PoincareTrace: return "poincare_trace";
        case ConstantKind::Steklov: return "steklov";
    }
    return "unknown";
}

ConstantEstimate poincare_constant(const Mesh& mesh) {
    const auto keep = free_list(mesh);
    if (keep.empty()) throw Error(ErrorCode::NoDirichlet, "no free vertices");
    const SparseMatrix K = restrict_matrix(assemble_stiffness(mesh), keep);
    const SparseMatrix M = restrict_matrix(assemble_mass(mesh, {}, Support::Volume), keep);
    const auto pairs = smallest_eigenpairs(K, M, 0.0, 1);
    ConstantEstimate est;
    est.kind = ConstantKind::PoincareVolume;
    est.eigenvalue = pairs.values[0];
    est.value = 1.0 / pairs.values[0];
    est.mesh_size = mesh.mesh_size();
    Eigen::VectorXd w = pairs.vectors.col(0);
    if (w.sum() < 0) w = -w;
    est.minimizer = field_on(mesh, w, keep);
    return est;
}

std::vector<double> steklov_eigenvalues(const Mesh& mesh, int k) {
    const auto data = steklov(mesh);
    if (k < 1 || k > data.sigma.size())
        throw Error(ErrorCode::ConfigError, "requested " + std::to_string(k) + " Steklov eigenvalues of " +
                                                std::to_string(data.sigma.size()));
    return {data.sigma.data(), data.sigma.data() + k};
}

ConstantEstimate trace_poincare_constant(const Mesh& mesh) {
    const auto data = steklov(mesh);
    ConstantEstimate est;
    est.kind = ConstantKind::PoincareTrace;
    est.eigenvalue = data.sigma[0];
    est.value = 1.0 / data.sigma[0];
    est.mesh_size = mesh.mesh_size();
    Eigen::VectorXd w = data.vectors.col(0);
    if (w.sum() < 0) w = -w;
    est.minimizer = field_on(mesh, w, data.free);
    return est;
}

double small_domain_threshold(double M, double C1, double C2, int N, double cap) {
    if (!(M > 0.0) || !(C1 >= 0.0) || !(C2 >= 0.0) || N < 1 || !(cap > 0.0))
        throw Error(ErrorCode::ConfigError, "threshold needs M > 0, nonnegative constants and a positive cap");
    // phi(t) = M (C1 t^2 + C2 t) with t = delta^{1/N} is increasing
    auto phi = [&](double t) { return M * (C1 * t * t + C2 * t); };
    const double tcap = std::isinf(cap) ? cap : std::pow(cap, 1.0 / N);
    if (std::isfinite(tcap) && phi(tcap) <= 1.0) return cap;
    if (C1 == 0.0 && C2 == 0.0) return cap;
    double lo = 0.0, hi = 1.0;
    while (phi(hi) <= 1.0) hi *= 2.0;
    if (std::isfinite(tcap)) hi = std::min(hi, tcap);
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) <= 1.0 ? lo : hi) = mid;
    }
    return std::pow(lo, N);
}

double small_domain_threshold(double M, const Mesh& mesh) {
    const double vol = mesh.measure();
    const int N = mesh.dimension();
    const double C1 = poincare_constant(mesh).value / std::pow(vol, 2.0 / N);
    double C2 = 0.0;
    if (mesh.gamma2_measure() > 0.0) C2 = trace_poincare_constant(mesh).value / std::pow(vol, 1.0 / N);
    return small_domain_threshold(M, C1, C2, N, vol);
}

SupportCheck small_support_positive(const Mesh& mesh, const std::vector<int>& cells, double M) {
    SupportCheck out;
    std::vector<bool> in(mesh.num_cells(), false);
    for (int c : cells) {
        if (c < 0 || static_cast<std::size_t>(c) >= mesh.num_cells())
            throw Error(ErrorCode::MeshMismatch, "cell index " + std::to_string(c) + " out of range");
        if (!in[c]) out.support_measure += mesh.cell_volume(c);
        in[c] = true;
    }
    std::vector<bool> inside(mesh.num_vertices(), true), touched(mesh.num_vertices(), false);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
        for (int i = 0; i <= mesh.dimension(); ++i) {
            const int v = mesh.cells()[c][i];
            touched[v] = true;
            if (!in[c]) inside[v] = false;
        }
    const auto dir = mesh.dirichlet_mask();
    std::vector<int> keep;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (inside[v] && touched[v] && !dir[v]) keep.push_back(static_cast<int>(v));
    out.free_vertices = static_cast<int>(keep.size());
    if (keep.empty()) {
        out.positive_definite = true;
        return out;
    }
    const SparseMatrix op = assemble_stiffness(mesh) - M * (assemble_mass(mesh, {}, Support::Volume) +
                                                            assemble_mass(mesh, {}, Support::BoundaryGamma2));
    out.positive_definite = positive_definite(restrict_matrix(op, keep));
    return out;
}

}  // namespace mixsym
