#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixsym/assembly.hpp"

namespace mixsym {

/// f(r, x_N, s) in the volume and g(r, s) on Gamma_2, with r = |x'|, together
/// with their s-derivatives.
struct NonlinearityPair {
    std::function<double(double r, double xn, double s)> f, f_s;
    std::function<double(double r, double s)> g, g_s;
    std::string f_name = "zero", g_name = "zero";
};

/// Named one-variable nonlinearity (no dependence on position):
///   zero                      0
///   const:a=1                 a
///   linear:a=1                a s
///   power:p=2,a=1             a s^p, p a positive integer
///   abspower:p=2,a=1          a |s|^p, real p > 1
///   exp:mu=1,a=1              a exp(mu s)
///   poly:c0=0,c1=0,c2=0,c3=0  c0 + c1 s + c2 s^2 + c3 s^3
/// Throws ConfigError on unknown names or malformed parameters.
struct ScalarNonlinearity {
    std::function<double(double)> value, derivative;
    std::string name;
};
ScalarNonlinearity parse_nonlinearity(std::string_view text);

NonlinearityPair make_nonlinearity(std::string_view f_text, std::string_view g_text);

/// Free-vertex components of
///   int grad u . grad phi_i - int f(x, u) phi_i - int_{Gamma_2} g(x', u) phi_i,
/// f and g evaluated at the same quadrature points as the weighted masses.
/// Throws NonFiniteValue, MeshMismatch, and ConfigError when u does not vanish
/// on Gamma_1.
Eigen::VectorXd residual(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& u);

/// Bundle of the linearization at u: c = -f_s(x, u), d = -g_s(x', u), with
/// the coercive shift computed. Its form matrix is the exact Jacobian of
/// `residual` on the free vertices.
OperatorBundle linearize(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& u);

struct NewtonStep {
    double residual_norm = 0.0;
    double step_norm = 0.0;    // 0 for the initial entry
    double damping = 1.0;
};

struct SolveTrace {
    std::vector<NewtonStep> iterates;   // first entry is the initial guess
    bool converged = false;
    ScalarField final;
};

/// Damped Newton with step halving on the residual norm. Returns
/// converged = false when max_iter is exhausted or the line search stalls;
/// throws SingularJacobian if the Jacobian cannot be factored.
SolveTrace newton_solve(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& init, double tol,
                        int max_iter);

/// Newton along a load path: solves family(t) for t = 1/steps, 2/steps, ..., 1
/// starting each solve from the previous solution.
SolveTrace continuation_solve(const Mesh& mesh, const std::function<NonlinearityPair(double)>& family,
                              const ScalarField& init, int steps, double tol, int max_iter);

struct ConvexityReport {
    bool f_strict = false;
    bool g_strict = false;
    bool passed = false;           // f strict, and g strict unless not required
    double f_margin = 0.0;         // min increase of the derivative between neighbours
    double g_margin = 0.0;
    /// Pair a < b with derivative(a) >= derivative(b) for the first failing function.
    std::optional<std::array<double, 2>> witness;
    std::string failing;           // "f", "g" or empty
};

/// Strict monotonicity of f_s and g_s on an equispaced grid of `samples`
/// points in [s_lo, s_hi], at each listed (r, x_N) position (g uses r).
/// `require_g` is false for the pure Dirichlet analog.
ConvexityReport check_strict_convexity(const NonlinearityPair& nl, double s_lo, double s_hi, int samples,
                                       const std::vector<std::array<double, 2>>& positions = {{0.0, 0.0}},
                                       bool require_g = true);

}  // namespace mixsym
