#include <doctest.h>

#include <cmath>

#include "mixsym/errors.hpp"
#include "mixsym/rng.hpp"
#include "mixsym/spectral.hpp"
#include "oracles.hpp"

using namespace mixsym;

namespace {

Mesh interval(double h) { return generate_mesh(build_domain(DomainKind::Interval1d, {{"L", 1}}), h); }
Mesh unit_square(double h) { return generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), h); }

OperatorBundle shifted(const Mesh& m, const WeightFunction& c = {}, const WeightFunction& d = {}) {
    auto b = make_bundle(m, c, d);
    coercive_shift(b);
    return b;
}

Eigen::VectorXd dense_eigs(const OperatorBundle& b) {
    return oracle::dense_pencil(restrict_matrix(b.form(), b.free_vertices),
                                restrict_matrix(b.product_mass(), b.free_vertices));
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("1D dual-measure eigenvalue converges to the transcendental root") {
    const double s = oracle::interval_root();
    CHECK(s == doctest::Approx(0.8603335890).epsilon(1e-9));
    const double exact = s * s;
    double prev_err = 0.0;
    for (int n : {16, 32, 64}) {
        const auto b = shifted(interval(1.0 / n));
        const auto sp = solve_eigenproblem(b, 2);
        const double err = std::abs(sp.eigenvalues[0] - exact);
        if (prev_err > 0.0) CHECK(oracle::order(prev_err, err) >= 1.9);
        prev_err = err;
        // w_1 proportional to sin(s(1 - x)) at the nodes
        const auto& w = sp.eigenvectors[0].values;
        const double scale = w[0] / std::sin(s);
        for (int i = 0; i <= n; ++i)
            CHECK(w[i] == doctest::Approx(scale * std::sin(s * (1.0 - static_cast<double>(i) / n))).epsilon(2e-3));
    }
    CHECK(prev_err <= 1e-4);
}

TEST_CASE("unit square dual-measure eigenvalue matches separation of variables") {
    const double exact = oracle::square_dual_lambda1();
    // mode k = 1 root, verified against the residual sign change
    CHECK(oracle::square_mode_residual(1, exact) == doctest::Approx(0.0).epsilon(1e-9));
    const auto sp = solve_eigenproblem(shifted(unit_square(1.0 / 32)), 3);
    CHECK(std::abs(sp.eigenvalues[0] - exact) / exact <= 5e-3);
}

TEST_CASE("eigenpairs match the dense oracle on small meshes") {
    const Mesh m = generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.3);
    const auto b = shifted(m, [](const Point& x) { return -6.0 * (1 + x[0]); }, [](const Point& x) { return x[0] - 1; });
    const auto ref = dense_eigs(b);
    const int n = static_cast<int>(b.num_free());
    REQUIRE(n <= 60);
    const auto sp = solve_eigenproblem(b, n, 3);
    for (int j = 0; j < n; ++j) CHECK(sp.eigenvalues[j] == doctest::Approx(ref[j]).epsilon(1e-9));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(product_inner(b, sp.eigenvectors[i], sp.eigenvectors[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("constant weight translation shifts the spectrum") {
    const Mesh m = unit_square(0.125);
    const auto base = solve_eigenproblem(shifted(m, [](const Point& x) { return x[1]; }), 5);
    const double t = 2.75;
    const auto moved =
        solve_eigenproblem(shifted(m, [t](const Point& x) { return x[1] + t; }, [t](const Point&) { return t; }), 5);
    for (int j = 0; j < 5; ++j) CHECK(moved.eigenvalues[j] == doctest::Approx(base.eigenvalues[j] + t).epsilon(1e-10));
}

TEST_CASE("Morse index") {
    const Mesh m = unit_square(0.25);
    CHECK(morse_index(morse_spectrum(shifted(m))) == 0);

    auto dense_negative = [](const Eigen::VectorXd& ref) {
        int negative = 0;
        for (Eigen::Index i = 0; i < ref.size(); ++i) negative += ref[i] < 0;
        return negative;
    };
    // c = -(l1 + l2)/2 on the volume only: the boundary part of the product
    // norm damps the shift and lambda_1 stays positive (about 1.88)
    const auto base = dense_eigs(shifted(m));
    const double c = -(base[0] + base[1]) / 2.0;
    const auto vol = shifted(m, [c](const Point&) { return c; });
    CHECK(morse_index(morse_spectrum(vol)) == dense_negative(dense_eigs(vol)));
    CHECK(dense_negative(dense_eigs(vol)) == 0);
    // the same constant on both weights translates the spectrum exactly
    const auto both = shifted(m, [c](const Point&) { return c; }, [c](const Point&) { return c; });
    CHECK(morse_index(morse_spectrum(both)) == dense_negative(dense_eigs(both)));
    CHECK(dense_negative(dense_eigs(both)) == 1);

    // tune a constant weight so lambda_1 vanishes: with t = -lambda_1 on both
    // weights the spectrum moves by exactly t
    const double l1 = base[0];
    const auto zeroed = shifted(m, [l1](const Point&) { return -l1; }, [l1](const Point&) { return -l1; });
    CHECK(code_of([&] { morse_index(morse_spectrum(zeroed)); }) == ErrorCode::Inconclusive);

    Spectrum truncated;
    truncated.eigenvalues = {-3.0, -2.0};
    truncated.free_dimension = 10;
    CHECK(code_of([&] { morse_index(truncated); }) == ErrorCode::Inconclusive);

    auto unshifted = make_bundle(m);
    CHECK(code_of([&] { solve_eigenproblem(unshifted, 1); }) == ErrorCode::ShiftMissing);
}

TEST_CASE("variational characterizations") {
    const Mesh m = unit_square(1.0 / 6);
    const auto b = shifted(m, [](const Point& x) { return -10.0 * x[1]; }, [](const Point& x) { return x[0]; });
    const auto sp = solve_eigenproblem(b, 5);
    const auto rep = verify_minmax(b, sp, 200, 7);
    CHECK(rep.violations == 0);
    CHECK(rep.slack_min >= 0.0);
    CHECK(rep.slack_minmax >= -1e-8);
    CHECK(rep.achieved_error <= 1e-8);
    CHECK(rep.checks == 200 * (1 + 5 * 3));

    // a corrupted eigenvalue must be caught
    Spectrum bad = sp;
    bad.eigenvalues[2] += 0.5;
    CHECK(code_of([&] { verify_minmax(b, bad, 20, 1); }) == ErrorCode::ViolationFound);
}

TEST_CASE("first eigenpair properties") {
    const Mesh line = interval(1.0 / 32);
    const auto b1 = shifted(line);
    const auto sp1 = solve_eigenproblem(b1, 2);
    const auto r1 = first_eigen_properties(sp1, b1);
    CHECK(r1.min_ratio > 0.0);
    CHECK(r1.gap > 0.0);
    CHECK(r1.max_angle <= 1e-4);

    const Mesh sq = unit_square(0.125);
    const auto b2 = shifted(sq);
    const auto sp2 = solve_eigenproblem(b2, 3);
    const auto r2 = first_eigen_properties(sp2, b2);
    CHECK(r2.min_ratio > 0.0);
    CHECK(r2.near_minimizers > 0);

    // w_1 + 1e-6 w_2
    ScalarField v = sp2.eigenvectors[0];
    v.values += 1e-6 * sp2.eigenvectors[1].values;
    CHECK(rayleigh_quotient(b2, v) > sp2.eigenvalues[0]);
    ScalarField p = v;
    p.values -= product_inner(b2, v, sp2.eigenvectors[0]) * sp2.eigenvectors[0].values;
    CHECK(rayleigh_quotient(b2, p) > sp2.eigenvalues[1] - 1e-6);

    Spectrum flipped = sp2;
    flipped.eigenvectors[0] = sp2.eigenvectors[1];
    CHECK(code_of([&] { first_eigen_properties(flipped, b2); }) == ErrorCode::SignViolation);
    Spectrum twin = sp2;
    twin.eigenvalues[1] = twin.eigenvalues[0];
    CHECK(code_of([&] { first_eigen_properties(twin, b2); }) == ErrorCode::MultiplicityViolation);
}

TEST_CASE("weight comparison") {
    const Mesh m = unit_square(0.125);
    auto c = [](const Point& x) { return 2.0 * x[0]; };
    auto d = [](const Point& x) { return x[0] * x[0]; };
    const auto hi = make_bundle(m, c, d);
    const auto lo = make_bundle(m, [&](const Point& x) { return c(x) - 1.0; }, d);
    const auto ord = compare_weights(hi, lo);
    CHECK(ord.first_dominates);
    CHECK_FALSE(ord.identical);
    const double diff = ord.lambda1_first - ord.lambda1_second;
    CHECK(diff >= 0.0);
    CHECK(diff <= 1.0);

    const auto same = compare_weights(hi, hi);
    CHECK(same.identical);
    CHECK(same.lambda1_first == same.lambda1_second);

    const auto cross = make_bundle(m, [](const Point& x) { return 4.0 * x[0]; }, d);
    CHECK(code_of([&] { compare_weights(hi, cross); }) == ErrorCode::NotComparable);
}
