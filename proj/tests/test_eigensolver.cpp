#include <doctest.h>

#include <cmath>

#include "mixsym/assembly.hpp"
#include "mixsym/eigensolver.hpp"
#include "mixsym/errors.hpp"
#include "oracles.hpp"

using namespace mixsym;

namespace {

struct Pencil {
    SparseMatrix A, B;
    double shift;
};

Pencil pencil_for(const Mesh& m, const WeightFunction& c = {}, const WeightFunction& d = {}) {
    auto b = make_bundle(m, c, d);
    const double L = coercive_shift(b);
    return {restrict_matrix(b.form(), b.free_vertices), restrict_matrix(b.product_mass(), b.free_vertices), L};
}

}  // namespace

TEST_CASE("Lanczos matches the dense pencil") {
    const Mesh m = generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.15);
    const auto p = pencil_for(m, [](const Point& x) { return -8.0 + 3.0 * x[1]; }, [](const Point& x) { return x[0]; });
    const Eigen::VectorXd ref = oracle::dense_pencil(p.A, p.B);
    for (int k : {1, 3, 7}) {
        const auto pairs = smallest_eigenpairs(p.A, p.B, p.shift, k);
        for (int j = 0; j < k; ++j) {
            CHECK(pairs.values[j] == doctest::Approx(ref[j]).epsilon(1e-10));
            CHECK(pairs.residuals[j] <= 1e-12);
        }
        const Eigen::MatrixXd G = pairs.vectors.transpose() * (p.B * pairs.vectors);
        CHECK((G - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("full spectrum of a tiny pencil") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), 0.25);
    const auto p = pencil_for(m);
    const Eigen::VectorXd ref = oracle::dense_pencil(p.A, p.B);
    const int n = static_cast<int>(p.A.rows());
    const auto pairs = smallest_eigenpairs(p.A, p.B, p.shift, n);
    for (int j = 0; j < n; ++j) CHECK(pairs.values[j] == doctest::Approx(ref[j]).epsilon(1e-9));
}

TEST_CASE("restarted Lanczos on a larger pencil") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), 1.0 / 24);
    const auto p = pencil_for(m);
    const auto pairs = smallest_eigenpairs(p.A, p.B, p.shift, 20);
    const Eigen::VectorXd ref = oracle::dense_pencil(p.A, p.B);
    for (int j = 0; j < 20; ++j) CHECK(pairs.values[j] == doctest::Approx(ref[j]).epsilon(1e-9));
}

TEST_CASE("inertia counts eigenvalues below a shift") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), 0.125);
    const auto p = pencil_for(m, [](const Point&) { return -30.0; });
    const Eigen::VectorXd ref = oracle::dense_pencil(p.A, p.B);
    for (double sigma : {-20.0, 0.0, 15.0, 60.0}) {
        int below = 0;
        for (Eigen::Index i = 0; i < ref.size(); ++i) below += ref[i] < sigma;
        CHECK(pencil_inertia(p.A, p.B, sigma).negative == below);
    }
}

TEST_CASE("solver preconditions") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Interval1d, {{"L", 1}}), 0.25);
    const auto p = pencil_for(m, [](const Point&) { return -50.0; });
    CHECK(p.shift > 0.0);
    try {
        smallest_eigenpairs(p.A, p.B, 0.0, 1);
        FAIL("expected ShiftMissing");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShiftMissing);
    }
    CHECK_THROWS_AS(smallest_eigenpairs(p.A, p.B, p.shift, 10), Error);
}
