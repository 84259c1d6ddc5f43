#include "mixsym/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixsym/errors.hpp"
#include "mixsym/rng.hpp"

namespace mixsym {

namespace {

struct ReducedPencil {
    SparseMatrix A, B;
};

ReducedPencil reduce(const OperatorBundle& bundle) {
    return {restrict_matrix(bundle.form(), bundle.free_vertices),
            restrict_matrix(bundle.product_mass(), bundle.free_vertices)};
}

ScalarField make_field(const OperatorBundle& bundle, const Eigen::VectorXd& reduced) {
    ScalarField f;
    f.mesh_fingerprint = bundle.mesh_fingerprint;
    f.values = extend_by_zero(reduced, bundle.free_vertices, bundle.dirichlet.size());
    return f;
}

Eigen::MatrixXd reduced_vectors(const OperatorBundle& bundle, const Spectrum& s, std::size_t count) {
    Eigen::MatrixXd W(static_cast<Eigen::Index>(bundle.num_free()), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) {
        if (s.eigenvectors[j].mesh_fingerprint != bundle.mesh_fingerprint)
            throw Error(ErrorCode::MeshMismatch, "spectrum computed on a different mesh");
        W.col(static_cast<Eigen::Index>(j)) = restrict_vector(s.eigenvectors[j].values, bundle.free_vertices);
    }
    return W;
}

Eigen::VectorXd random_vector(CounterRng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

double quotient(const ReducedPencil& p, const Eigen::VectorXd& v) { return v.dot(p.A * v) / v.dot(p.B * v); }

/// Largest eigenvalue of the pencil restricted to span(V).
double max_on_span(const ReducedPencil& p, const Eigen::MatrixXd& V) {
    const Eigen::MatrixXd a = V.transpose() * (p.A * V);
    const Eigen::MatrixXd b = V.transpose() * (p.B * V);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), 0.5 * (b + b.transpose()),
                                                                 Eigen::EigenvaluesOnly);
    return es.eigenvalues()[es.eigenvalues().size() - 1];
}

}  // namespace

Spectrum solve_eigenproblem(const OperatorBundle& bundle, int k, std::uint64_t seed) {
    if (!bundle.shift) throw Error(ErrorCode::ShiftMissing, "compute the coercive shift before solving");
    const ReducedPencil p = reduce(bundle);
    LanczosOptions opts;
    opts.seed = seed;
    const PencilEigenpairs pairs = smallest_eigenpairs(p.A, p.B, *bundle.shift, k, opts);

    Spectrum s;
    s.shift_used = *bundle.shift;
    s.free_dimension = bundle.num_free();
    const Eigen::VectorXd ones_b = p.B * Eigen::VectorXd::Ones(p.B.rows());
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd w = pairs.vectors.col(j);
        const double mean = ones_b.dot(w);
        double sign = 1.0;
        if (std::abs(mean) > 1e-10 * ones_b.cwiseAbs().dot(w.cwiseAbs())) {
            sign = mean < 0 ? -1.0 : 1.0;
        } else {
            Eigen::Index at;
            w.cwiseAbs().maxCoeff(&at);
            sign = w[at] < 0 ? -1.0 : 1.0;
        }
        s.eigenvalues.push_back(pairs.values[j]);
        s.residuals.push_back(pairs.residuals[j]);
        s.eigenvectors.push_back(make_field(bundle, sign * w));
    }
    return s;
}

double zero_tolerance(const Spectrum& spectrum) {
    if (spectrum.eigenvalues.empty()) return 1e-9;
    return 1e-9 * (1.0 + std::abs(spectrum.eigenvalues.front()));
}

int morse_index(const Spectrum& spectrum) {
    const double tol = zero_tolerance(spectrum);
    int count = 0;
    bool reached = false;
    for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j) {
        const double l = spectrum.eigenvalues[j];
        if (std::abs(l) <= tol)
            throw Error(ErrorCode::Inconclusive, "eigenvalue " + std::to_string(j + 1) + " = " + std::to_string(l) +
                                                     " lies within the zero tolerance");
        if (l < 0)
            ++count;
        else
            reached = true;
    }
    if (!reached && spectrum.eigenvalues.size() < spectrum.free_dimension)
        throw Error(ErrorCode::Inconclusive, "all computed eigenvalues are negative; compute more eigenpairs");
    return count;
}

Spectrum morse_spectrum(const OperatorBundle& bundle, std::uint64_t seed) {
    const int n = static_cast<int>(bundle.num_free());
    int k = std::min(2, n);
    while (true) {
        Spectrum s = solve_eigenproblem(bundle, k, seed);
        if (s.eigenvalues.back() >= zero_tolerance(s) || k == n) return s;
        k = std::min(2 * k, n);
    }
}

double rayleigh_quotient(const OperatorBundle& bundle, const ScalarField& v) {
    const double denom = product_inner(bundle, v, v);
    if (!(denom > 0.0)) throw Error(ErrorCode::NonFiniteValue, "Rayleigh quotient of a zero field");
    return bilinear_value(bundle, v, v) / denom;
}

MinMaxReport verify_minmax(const OperatorBundle& bundle, const Spectrum& spectrum, int trials, std::uint64_t seed) {
    const ReducedPencil p = reduce(bundle);
    const Eigen::Index n = p.A.rows();
    const std::size_t kk = spectrum.size();
    const Eigen::MatrixXd W = reduced_vectors(bundle, spectrum, kk);
    const Eigen::MatrixXd BW = p.B * W;
    CounterRng rng(seed, 0x3117);

    MinMaxReport rep;
    rep.trials = trials;
    constexpr double inf = std::numeric_limits<double>::infinity();
    rep.slack_min = rep.slack_complement = rep.slack_minmax = rep.slack_maxmin = inf;

    auto record = [&](double& slot, double slack, double tol, const std::string& what, std::size_t m, int trial) {
        ++rep.checks;
        slot = std::min(slot, slack);
        if (slack < -tol) {
            ++rep.violations;
            throw Error(ErrorCode::ViolationFound, what + " fails for m = " + std::to_string(m) + " (trial " +
                                                       std::to_string(trial) + ", margin " + std::to_string(slack) +
                                                       ")");
        }
    };

    for (std::size_t m = 1; m <= kk; ++m) {
        const double lm = spectrum.eigenvalues[m - 1];
        const double tol = 1e-8 * std::max(1.0, std::abs(lm));
        const Eigen::Index mi = static_cast<Eigen::Index>(m);
        rep.achieved_error = std::max(rep.achieved_error, std::abs(max_on_span(p, W.leftCols(mi)) - lm));
        if (rep.achieved_error > tol)
            throw Error(ErrorCode::ViolationFound,
                        "max of R over span(w_1..w_" + std::to_string(m) + ") differs from lambda_" + std::to_string(m));
        for (int t = 0; t < trials; ++t) {
            if (m == 1) record(rep.slack_min, quotient(p, random_vector(rng, n)) - lm, tol, "minimum principle", m, t);

            Eigen::VectorXd v = random_vector(rng, n);
            for (int pass = 0; pass < 2; ++pass) v -= W.leftCols(mi - 1) * (BW.leftCols(mi - 1).transpose() * v);
            record(rep.slack_complement, quotient(p, v) - lm, tol, "minimum over the orthogonal complement", m, t);

            if (mi <= n) {
                Eigen::MatrixXd V(n, mi);
                for (Eigen::Index j = 0; j < mi; ++j) V.col(j) = random_vector(rng, n);
                record(rep.slack_minmax, max_on_span(p, V) - lm, tol, "min-max characterization", m, t);
            }

            // v in span(w_1..w_m) B-orthogonal to a random (m-1)-dimensional subspace
            Eigen::VectorXd coeff;
            if (m == 1) {
                coeff = Eigen::VectorXd::Ones(1);
            } else {
                Eigen::MatrixXd U(n, mi - 1);
                for (Eigen::Index j = 0; j < mi - 1; ++j) U.col(j) = random_vector(rng, n);
                const Eigen::MatrixXd C = U.transpose() * BW.leftCols(mi);  // (m-1) x m
                Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
                const Eigen::MatrixXd kernel = lu.kernel();
                coeff = kernel.col(0);
            }
            const Eigen::VectorXd w = W.leftCols(mi) * coeff;
            record(rep.slack_maxmin, lm - quotient(p, w), tol, "max-min characterization", m, t);
        }
    }
    if (rep.slack_min == inf) rep.slack_min = 0.0;
    return rep;
}

FirstEigenReport first_eigen_properties(const Spectrum& spectrum, const OperatorBundle& bundle, std::uint64_t seed) {
    if (spectrum.size() < 2)
        throw Error(ErrorCode::ConfigError, "the first-eigenpair check needs at least two eigenpairs");
    const ReducedPencil p = reduce(bundle);
    const Eigen::MatrixXd W = reduced_vectors(bundle, spectrum, 2);
    const Eigen::VectorXd w1 = W.col(0);
    FirstEigenReport rep;

    const double top = w1.maxCoeff();
    rep.min_ratio = top > 0 ? w1.minCoeff() / top : -1.0;
    if (!(rep.min_ratio > 0.0))
        throw Error(ErrorCode::SignViolation,
                    "first eigenvector changes sign (min/max ratio " + std::to_string(rep.min_ratio) + ")");

    rep.gap = spectrum.eigenvalues[1] - spectrum.eigenvalues[0];
    if (!(rep.gap > zero_tolerance(spectrum)))
        throw Error(ErrorCode::MultiplicityViolation, "lambda_1 is not simple (gap " + std::to_string(rep.gap) + ")");

    CounterRng rng(seed, 0x7e57);
    const Eigen::VectorXd Bw1 = p.B * w1;
    const double l1 = spectrum.eigenvalues[0];
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        for (int t = 0; t < 8; ++t) {
            Eigen::VectorXd z = random_vector(rng, w1.size());
            z /= std::sqrt(z.dot(p.B * z));
            const Eigen::VectorXd v = w1 + eps * z;
            if (quotient(p, v) > l1 + 1e-12 * std::max(1.0, std::abs(l1))) continue;
            ++rep.near_minimizers;
            const Eigen::VectorXd perp = v - Bw1.dot(v) * w1;
            const double sin2 = perp.dot(p.B * perp) / v.dot(p.B * v);
            const double angle = std::asin(std::sqrt(std::clamp(sin2, 0.0, 1.0)));
            rep.max_angle = std::max(rep.max_angle, angle);
        }
    }
    if (rep.max_angle > 1e-4)
        throw Error(ErrorCode::MultiplicityViolation,
                    "a near-minimizer of R is not aligned with w_1 (angle " + std::to_string(rep.max_angle) + ")");
    return rep;
}

WeightOrdering compare_weights(const OperatorBundle& first, const OperatorBundle& second) {
    if (first.mesh_fingerprint != second.mesh_fingerprint)
        throw Error(ErrorCode::MeshMismatch, "weights live on different meshes");
    if (first.c.values.size() != second.c.values.size() || first.d.values.size() != second.d.values.size())
        throw Error(ErrorCode::MeshMismatch, "weight sample counts differ");
    bool ge = true, le = true;
    auto scan = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] < b[i]) ge = false;
            if (a[i] > b[i]) le = false;
        }
    };
    scan(first.c.values, second.c.values);
    scan(first.d.values, second.d.values);
    if (!ge && !le) throw Error(ErrorCode::NotComparable, "weights are not ordered pointwise");

    auto lambda1 = [](OperatorBundle b) {
        coercive_shift(b);
        return solve_eigenproblem(b, 1).eigenvalues.front();
    };
    WeightOrdering out;
    out.first_dominates = ge;
    out.identical = ge && le;
    out.lambda1_first = lambda1(first);
    out.lambda1_second = lambda1(second);
    const double hi = ge ? out.lambda1_first : out.lambda1_second;
    const double lo = ge ? out.lambda1_second : out.lambda1_first;
    const double tol = 1e-10 * (1.0 + std::abs(lo));
    if (hi < lo - tol)
        throw Error(ErrorCode::ViolationFound, "lambda_1 decreased although the weights increased");
    return out;
}

}  // namespace mixsym
