#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "mixsym/assembly.hpp"

namespace mixsym {

struct LanczosOptions {
    int block_size = 4;
    /// Relative residual target ||A y - lambda B y|| / ((||A|| + |lambda| ||B||) ||y||).
    double tolerance = 1e-12;
    std::uint64_t seed = 0;
    int max_restarts = 200;
};

struct PencilEigenpairs {
    Eigen::VectorXd values;        // ascending
    Eigen::MatrixXd vectors;       // B-orthonormal columns
    Eigen::VectorXd residuals;     // relative residuals as defined above
    int matrix_solves = 0;
};

/// k smallest eigenpairs of A y = lambda B y (A, B symmetric, B positive
/// definite) by block Lanczos on the operator (A + shift B)^{-1} B with full
/// B-reorthogonalization and thick restarts. A + shift B must be positive
/// definite; throws ShiftMissing otherwise and NotConverged when the target
/// residual is not met.
PencilEigenpairs smallest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, double shift, int k,
                                     const LanczosOptions& options = {});

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;
};

/// Inertia of A - sigma B from an LDL^T factorization (Sylvester's law):
/// `negative` counts the pencil eigenvalues below sigma.
Inertia pencil_inertia(const SparseMatrix& A, const SparseMatrix& B, double sigma);

/// True when S - margin I admits an LDL^T factorization with positive pivots.
bool positive_definite(const SparseMatrix& S, double margin = 0.0);

}  // namespace mixsym
