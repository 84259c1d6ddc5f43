#pragma once

// Reference computations used by the tests. They share no code with the
// library beyond the matrix types.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15) {
    double flo = f(lo);
    for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// First root of tan s = 1/s, i.e. s sin s - cos s = 0 on (0, pi/2).
inline double interval_root() {
    return bisect([](double s) { return s * std::sin(s) - std::cos(s); }, 1e-3, std::numbers::pi / 2 - 1e-12);
}

/// Unit square (0,1)^2 with w = 0 on x = 0, x = 1, y = 1 and dw/dnu = lambda w
/// on y = 0. Mode sin(k pi x) Y(y) with Y(1) = 0 gives
/// Y'' = (k^2 pi^2 - lambda) Y and -Y'(0) = lambda Y(0); with t = 1 - y and
/// S(t) the solution vanishing at t = 0, the condition is S'(1) = lambda S(1).
inline double square_mode_residual(int k, double lambda) {
    const double q = k * k * std::numbers::pi * std::numbers::pi - lambda;
    double s, ds;
    if (q > 1e-12) {
        const double r = std::sqrt(q);
        s = std::sinh(r) / r;
        ds = std::cosh(r);
    } else if (q < -1e-12) {
        const double r = std::sqrt(-q);
        s = std::sin(r) / r;
        ds = std::cos(r);
    } else {
        s = 1.0;
        ds = 1.0;
    }
    return ds - lambda * s;
}

/// Smallest positive root of square_mode_residual over k = 1..kmax.
inline double square_dual_lambda1(int kmax = 6) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kmax; ++k) {
        auto f = [k](double l) { return square_mode_residual(k, l); };
        // scan for the first sign change
        double prev = 1e-9, fprev = f(prev);
        for (double l = 0.01; l < 400.0; l += 0.01) {
            const double fl = f(l);
            if ((fl < 0) != (fprev < 0)) {
                best = std::min(best, bisect(f, prev, l));
                break;
            }
            prev = l;
            fprev = fl;
        }
    }
    return best;
}

/// All eigenvalues of the dense symmetric-definite pencil (A, B), ascending.
inline Eigen::VectorXd dense_pencil(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(A);
    const Eigen::MatrixXd b = Eigen::MatrixXd(B);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
    return es.eigenvalues();
}

inline Eigen::MatrixXd dense_pencil_vectors(const Eigen::SparseMatrix<double>& A,
                                            const Eigen::SparseMatrix<double>& B) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A), Eigen::MatrixXd(B)};
    return es.eigenvectors();
}

/// Observed convergence order from errors at h, h/2, h/4 style sequences.
inline double order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace oracle
