#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixsym/assembly.hpp"
#include "mixsym/eigensolver.hpp"

namespace mixsym {

/// Eigenpairs of (K + M_c + M_d) w = lambda (M_vol + M_bnd) w on the free
/// vertices: lambda enters both the equation and the Gamma_2 condition.
struct Spectrum {
    std::vector<double> eigenvalues;         // ascending
    std::vector<ScalarField> eigenvectors;   // orthonormal in the product inner product
    double shift_used = 0.0;
    std::vector<double> residuals;
    std::size_t free_dimension = 0;          // size of the discrete space

    std::size_t size() const { return eigenvalues.size(); }
};

/// The k smallest eigenpairs. Requires bundle.shift (see coercive_shift).
/// Each eigenvector is signed so that its product inner product with the
/// constant field is positive (largest entry positive if that vanishes).
Spectrum solve_eigenproblem(const OperatorBundle& bundle, int k, std::uint64_t seed = 0);

/// 1e-9 * (1 + |lambda_1|).
double zero_tolerance(const Spectrum& spectrum);

/// Number of eigenvalues below -zero_tolerance. Throws Inconclusive when an
/// eigenvalue lies within the tolerance band or when the spectrum does not
/// reach a nonnegative eigenvalue.
int morse_index(const Spectrum& spectrum);

/// Solves with k = 2, 4, 8, ... until the largest computed eigenvalue is at
/// least zero_tolerance (or the whole space is computed).
Spectrum morse_spectrum(const OperatorBundle& bundle, std::uint64_t seed = 0);

double rayleigh_quotient(const OperatorBundle& bundle, const ScalarField& v);

struct MinMaxReport {
    int trials = 0;
    int checks = 0;
    int violations = 0;
    /// Smallest observed margin of each characterization (negative = violated).
    double slack_min = 0.0;             // i)  R(v) >= lambda_1
    double slack_complement = 0.0;      // ii) min over complements of w_1..w_{m-1}
    double slack_minmax = 0.0;          // iii)
    double slack_maxmin = 0.0;          // iv)
    double achieved_error = 0.0;        // |max R over span(w_1..w_m) - lambda_m|
};

/// Randomized check of the variational characterizations (min, min over
/// orthogonal complements, min-max, max-min) with tolerance
/// 1e-8 * max(1, |lambda_m|). Throws ViolationFound with a witness.
MinMaxReport verify_minmax(const OperatorBundle& bundle, const Spectrum& spectrum, int trials, std::uint64_t seed);

struct FirstEigenReport {
    double min_ratio = 0.0;      // min over free vertices of w_1 / max w_1
    double gap = 0.0;            // lambda_2 - lambda_1
    int near_minimizers = 0;     // sampled fields with R(v) <= lambda_1 + 1e-12
    double max_angle = 0.0;      // largest angle to w_1 among those
};

/// w_1 strictly one-signed on the free vertices, lambda_1 simple, and every
/// sampled near-minimizer of R aligned with w_1 within 1e-4 rad.
FirstEigenReport first_eigen_properties(const Spectrum& spectrum, const OperatorBundle& bundle, std::uint64_t seed = 0);

struct WeightOrdering {
    bool first_dominates = false;   // c >= c', d >= d' at every quadrature point
    bool identical = false;
    double lambda1_first = 0.0;
    double lambda1_second = 0.0;
};

/// Certifies lambda_1 monotonicity in the weights. Throws NotComparable when
/// the weights cross and ViolationFound when the ordering fails.
WeightOrdering compare_weights(const OperatorBundle& first, const OperatorBundle& second);

}  // namespace mixsym
