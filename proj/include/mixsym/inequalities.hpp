#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "mixsym/assembly.hpp"

namespace mixsym {

enum class ConstantKind { PoincareVolume, PoincareTrace, Steklov };

std::string_view to_string(ConstantKind kind);

struct ConstantEstimate {
    double value = 0.0;
    ConstantKind kind = ConstantKind::PoincareVolume;
    double mesh_size = 0.0;
    bool extrapolated = false;
    double eigenvalue = 0.0;   // the eigenvalue whose reciprocal is `value`
    ScalarField minimizer;     // field attaining the constant
};

/// Sharp C in int v^2 <= C int |grad v|^2 over fields vanishing on Gamma_1:
/// 1 / lambda_1 of K w = lambda M_vol w. Throws NoDirichlet.
ConstantEstimate poincare_constant(const Mesh& mesh);

/// The k smallest eigenvalues of the mixed Steklov problem K w = sigma M_bnd w,
/// computed on the discrete Dirichlet-to-Neumann map (Schur complement of K
/// onto the free Gamma_2 vertices). Throws NoDirichlet, NoGamma2.
std::vector<double> steklov_eigenvalues(const Mesh& mesh, int k);

/// Sharp C in int_{Gamma_2} v^2 <= C int |grad v|^2: 1 / sigma_1.
ConstantEstimate trace_poincare_constant(const Mesh& mesh);

/// Largest delta in (0, cap] with M (C1 delta^{2/N} + C2 delta^{1/N}) <= 1,
/// to relative accuracy 1e-12 in delta^{1/N}.
double small_domain_threshold(double M, double C1, double C2, int N,
                              double cap = std::numeric_limits<double>::infinity());

/// Same with the constants taken from the mesh: the sharp domain constants
/// are converted to the measure-normalized form (C1 = C / |Omega|^{2/N},
/// C2 = C_trace / |Omega|^{1/N}) and delta is capped at |Omega|. For the pure
/// Dirichlet analog the trace term is absent.
double small_domain_threshold(double M, const Mesh& mesh);

struct SupportCheck {
    double support_measure = 0.0;   // measure of the union of the given cells
    int free_vertices = 0;          // vertices whose fields stay inside the cells
    bool positive_definite = false;
};

/// Whether K - M (M_vol + M_bnd) is positive definite on the fields supported
/// in the given cells (nodal values only at vertices off Gamma_1 whose every
/// incident cell is listed). An empty field space counts as positive.
SupportCheck small_support_positive(const Mesh& mesh, const std::vector<int>& cells, double M);

}  // namespace mixsym
