#include "mixsym/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "mixsym/errors.hpp"
#include "mixsym/rng.hpp"

namespace mixsym {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

double max_row_sum(const SparseMatrix& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) sums[it.row()] += std::abs(it.value());
    return m.rows() ? sums.maxCoeff() : 0.0;
}

SparseMatrix identity(Eigen::Index n) {
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

/// Basis of a Krylov-type search space, B-orthonormal, with B Q and
/// Op Q = (A + shift B)^{-1} B Q cached column by column.
class SearchSpace {
public:
    SearchSpace(const SparseMatrix& B, Eigen::Index n, Eigen::Index capacity)
        : B_(B), n_(n), Q_(n, capacity), BQ_(n, capacity), Z_(n, capacity), T_(capacity, capacity) {}

    Eigen::Index size() const { return m_; }
    Eigen::Index with_operator() const { return mz_; }
    Eigen::Index capacity() const { return Q_.cols(); }

    /// B-orthogonalizes x against the basis and appends it. Returns false
    /// when x is numerically inside the span.
    bool append(Eigen::VectorXd x) {
        if (m_ >= capacity() || m_ >= n_) return false;
        const double original = std::sqrt(std::max(0.0, x.dot(B_ * x)));
        if (!(original > 0.0) || !std::isfinite(original)) return false;
        for (int pass = 0; pass < 2; ++pass) {
            if (m_ > 0) x -= Q_.leftCols(m_) * (BQ_.leftCols(m_).transpose() * x);
        }
        Eigen::VectorXd bx = B_ * x;
        const double norm = std::sqrt(std::max(0.0, x.dot(bx)));
        if (!(norm > 1e-10 * original)) return false;
        Q_.col(m_) = x / norm;
        BQ_.col(m_) = bx / norm;
        ++m_;
        return true;
    }

    /// Applies the operator to the columns that do not have it yet and grows T.
    int apply_operator(const Ldlt& solver) {
        if (mz_ == m_) return 0;
        const Eigen::Index fresh = m_ - mz_;
        Z_.middleCols(mz_, fresh) = solver.solve(BQ_.middleCols(mz_, fresh));
        T_.block(0, mz_, m_, fresh) = BQ_.leftCols(m_).transpose() * Z_.middleCols(mz_, fresh);
        T_.block(mz_, 0, fresh, mz_) = T_.block(0, mz_, mz_, fresh).transpose();
        Eigen::MatrixXd corner = T_.block(mz_, mz_, fresh, fresh);
        T_.block(mz_, mz_, fresh, fresh) = 0.5 * (corner + corner.transpose());
        mz_ = m_;
        return static_cast<int>(fresh);
    }

    Eigen::MatrixXd projected() const { return T_.topLeftCorner(mz_, mz_); }
    auto basis() const { return Q_.leftCols(mz_); }
    auto operator_images() const { return Z_.leftCols(mz_); }

    /// Replaces the basis by the given combinations (orthonormal coefficient
    /// columns), keeping the operator images consistent.
    void restart(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& projected_diag) {
        const Eigen::Index r = coeffs.cols();
        Eigen::MatrixXd q = Q_.leftCols(mz_) * coeffs;
        Eigen::MatrixXd bq = BQ_.leftCols(mz_) * coeffs;
        Eigen::MatrixXd z = Z_.leftCols(mz_) * coeffs;
        Q_.leftCols(r) = q;
        BQ_.leftCols(r) = bq;
        Z_.leftCols(r) = z;
        T_.topLeftCorner(r, r) = projected_diag.asDiagonal();
        m_ = mz_ = r;
    }

private:
    const SparseMatrix& B_;
    Eigen::Index n_;
    Eigen::MatrixXd Q_, BQ_, Z_, T_;
    Eigen::Index m_ = 0, mz_ = 0;
};

}  // namespace

bool positive_definite(const SparseMatrix& S, double margin) {
    if (S.rows() == 0) return true;
    Ldlt ldlt;
    if (margin != 0.0)
        ldlt.compute(SparseMatrix(S - margin * identity(S.rows())));
    else
        ldlt.compute(S);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = ldlt.vectorD();
    return d.allFinite() && d.minCoeff() > 0.0;
}

Inertia pencil_inertia(const SparseMatrix& A, const SparseMatrix& B, double sigma) {
    Inertia in;
    if (A.rows() == 0) return in;
    Ldlt ldlt(SparseMatrix(A - sigma * B));
    if (ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::Inconclusive, "LDL^T factorization of the shifted pencil broke down");
    const Eigen::VectorXd d = ldlt.vectorD();
    const double scale = d.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) <= 1e-14 * scale)
            ++in.zero;
        else if (d[i] < 0)
            ++in.negative;
        else
            ++in.positive;
    }
    return in;
}

PencilEigenpairs smallest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, double shift, int k,
                                     const LanczosOptions& options) {
    const Eigen::Index n = A.rows();
    if (k < 1 || k > n)
        throw Error(ErrorCode::ConfigError, "requested " + std::to_string(k) + " eigenpairs of a pencil of size " +
                                                std::to_string(n));
    Ldlt solver(SparseMatrix(A + shift * B));
    if (solver.info() != Eigen::Success || !(solver.vectorD().minCoeff() > 0.0))
        throw Error(ErrorCode::ShiftMissing, "A + shift B is not positive definite for shift " + std::to_string(shift));

    const double normA = max_row_sum(A), normB = max_row_sum(B);
    const Eigen::Index block = std::min<Eigen::Index>(std::max(1, options.block_size), n);
    const Eigen::Index capacity = std::min<Eigen::Index>(n, std::max<Eigen::Index>(3 * k + 10 * block, 160));
    const Eigen::Index keep = std::min<Eigen::Index>(capacity / 2, std::max<Eigen::Index>(k + block, 2 * k));

    CounterRng rng(options.seed, 0x1a2c);
    auto random_vector = [&] {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
        return v;
    };
    // Adds the candidates, topping up with random vectors until `want` columns
    // were added or the space is exhausted.
    auto extend = [&](SearchSpace& space, std::vector<Eigen::VectorXd> candidates, Eigen::Index want) {
        Eigen::Index added = 0;
        for (auto& c : candidates) {
            if (added == want) break;
            if (space.append(std::move(c))) ++added;
        }
        int attempts = 0;
        while (added < want && space.size() < std::min(n, space.capacity()) && attempts < 8 * want + 8) {
            ++attempts;
            if (space.append(random_vector())) ++added;
        }
        return added;
    };

    SearchSpace space(B, n, capacity);
    PencilEigenpairs out;
    extend(space, {}, block);
    int restarts = 0;
    while (true) {
        out.matrix_solves += space.apply_operator(solver);
        const Eigen::Index m = space.with_operator();
        if (m >= k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(space.projected());
            // largest theta <-> smallest lambda; columns ordered ascending in theta
            const Eigen::VectorXd theta = ritz.eigenvalues();
            Eigen::MatrixXd coeffs(m, k);
            Eigen::VectorXd lambda(k);
            for (int j = 0; j < k; ++j) {
                coeffs.col(j) = ritz.eigenvectors().col(m - 1 - j);
                lambda[j] = 1.0 / theta[m - 1 - j] - shift;
            }
            const Eigen::MatrixXd Y = space.basis() * coeffs;
            Eigen::VectorXd res(k);
            bool converged = theta[m - k] > 0.0;
            for (int j = 0; j < k; ++j) {
                const Eigen::VectorXd r = A * Y.col(j) - lambda[j] * (B * Y.col(j));
                const double scale = (normA + std::abs(lambda[j]) * normB) * Y.col(j).norm();
                res[j] = scale > 0 ? r.norm() / scale : r.norm();
                converged = converged && res[j] <= options.tolerance;
            }
            if (converged || m == n) {
                if (!converged && res.maxCoeff() > 1e-8)
                    throw Error(ErrorCode::NotConverged, "full search space reached with residual " +
                                                             std::to_string(res.maxCoeff()));
                out.values = lambda;
                out.vectors = Y;
                out.residuals = res;
                return out;
            }
            if (space.capacity() < n && space.size() + block > space.capacity()) {
                if (++restarts > options.max_restarts) {
                    Eigen::Index worst;
                    res.maxCoeff(&worst);
                    throw Error(ErrorCode::NotConverged, "eigenpair " + std::to_string(worst) + " residual " +
                                                             std::to_string(res[worst]));
                }
                const Eigen::Index r = std::min(keep, m);
                Eigen::MatrixXd kept(m, r);
                Eigen::VectorXd kept_theta(r);
                for (Eigen::Index j = 0; j < r; ++j) {
                    kept.col(j) = ritz.eigenvectors().col(m - 1 - j);
                    kept_theta[j] = theta[m - 1 - j];
                }
                // residual directions of the operator drive the expansion
                std::vector<Eigen::VectorXd> next;
                const Eigen::MatrixXd Zk = space.operator_images() * kept;
                const Eigen::MatrixXd Qk = space.basis() * kept;
                for (Eigen::Index j = 0; j < r && static_cast<Eigen::Index>(next.size()) < block; ++j)
                    if (j >= k || res[j] > options.tolerance) next.push_back(Zk.col(j) - kept_theta[j] * Qk.col(j));
                space.restart(kept, kept_theta);
                if (extend(space, std::move(next), block) == 0) {
                    throw Error(ErrorCode::NotConverged, "search space cannot be expanded after restart");
                }
                continue;
            }
        }
        // plain block Krylov step: images of the newest block
        const Eigen::Index newest = std::min(block, m);
        std::vector<Eigen::VectorXd> next;
        for (Eigen::Index j = m - newest; j < m; ++j) next.emplace_back(space.operator_images().col(j));
        if (extend(space, std::move(next), std::min(block, n - space.size())) == 0 && space.size() == m) {
            if (m == n) continue;  // handled on the next pass
            throw Error(ErrorCode::NotConverged, "search space stagnated at dimension " + std::to_string(m));
        }
    }
}

}  // namespace mixsym
