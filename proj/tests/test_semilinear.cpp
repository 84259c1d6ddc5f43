#include <doctest.h>

#include <cmath>

#include "mixsym/errors.hpp"
#include "mixsym/rng.hpp"
#include "mixsym/semilinear.hpp"
#include "oracles.hpp"

using namespace mixsym;

namespace {

Mesh unit_square(double h) { return generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), h); }

ScalarField random_free_field(const Mesh& m, std::uint64_t seed, double scale = 1.0) {
    CounterRng rng(seed);
    const auto dir = m.dirichlet_mask();
    Eigen::VectorXd v(m.num_vertices());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dir[i] ? 0.0 : scale * rng.normal();
    return ScalarField(m, v);
}

// u* = (1/4 - x^2)(1 - y) vanishes on x = +-1/2 and y = 1; -Lap u* = 2(1 - y),
// -du*/dy at y = 0 is (1/4 - x^2).
double ustar(double x, double y) { return (0.25 - x * x) * (1 - y); }

NonlinearityPair manufactured() {
    NonlinearityPair nl;
    nl.f = [](double r, double y, double s) { const double u = ustar(r, y); return s * s * s + 2 * (1 - y) - u * u * u; };
    nl.f_s = [](double, double, double s) { return 3 * s * s; };
    nl.g = [](double r, double s) { const double u = ustar(r, 0); return s * s + u - u * u; };
    nl.g_s = [](double, double s) { return 2 * s; };
    return nl;
}

}  // namespace

TEST_CASE("nonlinearity parser") {
    const auto p = parse_nonlinearity("power:p=3,a=2");
    CHECK(p.value(2.0) == 16.0);
    CHECK(p.derivative(2.0) == 24.0);
    CHECK(parse_nonlinearity("exp").value(0.0) == 1.0);
    CHECK(parse_nonlinearity("exp:mu=2").derivative(0.0) == 2.0);
    CHECK(parse_nonlinearity("poly:c1=1,c3=2").value(2.0) == 18.0);
    CHECK(parse_nonlinearity("abspower:p=1.5").value(-4.0) == doctest::Approx(8.0));
    CHECK(parse_nonlinearity("zero").value(5.0) == 0.0);
    CHECK(parse_nonlinearity("const:a=3").value(5.0) == 3.0);
    for (const char* bad : {"cube", "power:p=2.5", "linear:b=1", "exp:mu=x", "abspower:p=1", "linear:a"})
        CHECK_THROWS_AS(parse_nonlinearity(bad), Error);
}

TEST_CASE("residual basics") {
    const Mesh m = unit_square(0.25);
    const auto zero = make_nonlinearity("zero", "zero");
    CHECK(residual(m, zero, ScalarField::zeros(m)).cwiseAbs().maxCoeff() == 0.0);

    const auto one = make_nonlinearity("const:a=1", "zero");
    const Eigen::VectorXd r = residual(m, one, ScalarField::zeros(m));
    // -int phi_i: row sums of the mass matrix
    const SparseMatrix M = assemble_mass(m, {}, Support::Volume);
    const Eigen::VectorXd load = M * Eigen::VectorXd::Ones(M.rows());
    const auto dir = m.dirichlet_mask();
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < load.size(); ++i)
        if (!dir[i]) CHECK(r[j++] == doctest::Approx(-load[i]).epsilon(1e-14));

    ScalarField bad = ScalarField::zeros(m);
    bad.values.setOnes();
    CHECK_THROWS_AS(residual(m, zero, bad), Error);

    NonlinearityPair nan = zero;
    nan.f = [](double, double, double) { return std::nan(""); };
    try {
        residual(m, nan, ScalarField::zeros(m));
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteValue);
    }
}

TEST_CASE("linearization") {
    const Mesh m = unit_square(0.25);
    const auto sq = make_nonlinearity("power:p=2", "zero");
    const auto at0 = linearize(m, sq, ScalarField::zeros(m));
    for (double c : at0.c.values) CHECK(c == 0.0);

    const auto lin = make_nonlinearity("linear:a=3", "zero");
    const auto b1 = linearize(m, lin, ScalarField::zeros(m));
    const auto b2 = linearize(m, lin, random_free_field(m, 4));
    const SparseMatrix expected = assemble_stiffness(m) - 3.0 * assemble_mass(m, {}, Support::Volume);
    CHECK((b1.form() - expected).norm() <= 1e-13);
    CHECK((b2.form() - expected).norm() <= 1e-13);
}

TEST_CASE("finite-difference Jacobian") {
    const Mesh m = generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.25);
    const auto nl = make_nonlinearity("poly:c1=1,c2=0.5,c3=-0.3", "exp:mu=0.7,a=0.4");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ScalarField u = random_free_field(m, 2 * seed, 0.5), v = random_free_field(m, 2 * seed + 1);
        const auto b = linearize(m, nl, u);
        const double eps = 1e-6;
        ScalarField up = u;
        up.values += eps * v.values;
        const Eigen::VectorXd fd = (residual(m, nl, up) - residual(m, nl, u)) / eps;
        const Eigen::VectorXd jv = restrict_matrix(b.form(), b.free_vertices) * restrict_vector(v.values, b.free_vertices);
        CHECK((fd - jv).norm() / jv.norm() <= 1e-5);
    }
}

TEST_CASE("Newton on a linear problem takes one step") {
    const Mesh m = unit_square(0.125);
    const auto trace = newton_solve(m, make_nonlinearity("const:a=1", "zero"), ScalarField::zeros(m), 1e-10, 10);
    CHECK(trace.converged);
    CHECK(trace.iterates.size() == 2);
    CHECK(trace.iterates.back().damping == 1.0);
}

TEST_CASE("manufactured nonlinear solution converges at second order") {
    std::vector<double> errors;
    for (int n : {8, 16, 32}) {
        const Mesh m = unit_square(1.0 / n);
        const auto trace = newton_solve(m, manufactured(), ScalarField::zeros(m), 1e-12, 30);
        REQUIRE(trace.converged);
        for (std::size_t k = 2; k < trace.iterates.size(); ++k)
            CHECK(trace.iterates[k].residual_norm < trace.iterates[k - 1].residual_norm);
        const ScalarField exact = ScalarField::from_function(m, [](const Point& p) { return ustar(p[0], p[1]); });
        const Eigen::VectorXd e = trace.final.values - exact.values;
        errors.push_back(std::sqrt(e.dot(assemble_mass(m, {}, Support::Volume) * e)));
    }
    CHECK(oracle::order(errors[0], errors[1]) >= 1.9);
    CHECK(oracle::order(errors[1], errors[2]) >= 1.9);
}

TEST_CASE("Newton reports failure past the blow-up scale") {
    const Mesh m = unit_square(0.125);
    // -Lap u = 40 e^u has no solution on the unit square
    const auto trace = newton_solve(m, make_nonlinearity("exp:a=40", "zero"), ScalarField::zeros(m), 1e-10, 25);
    CHECK_FALSE(trace.converged);
    CHECK(trace.iterates.size() <= 26);
}

TEST_CASE("Newton iterates keep the mirror symmetry") {
    const Mesh m = unit_square(0.125);
    const auto refl = reflection_map(m, {1, 0, 0});
    const auto nl = make_nonlinearity("poly:c0=1,c1=2,c2=1", "power:p=2");
    const auto trace = newton_solve(m, nl, ScalarField::zeros(m), 1e-12, 20);
    CHECK(trace.converged);
    const auto& u = trace.final.values;
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        CHECK(std::abs(u[v] - u[refl.node_pairing[v]]) <= 1e-12 * u.cwiseAbs().maxCoeff());
}

TEST_CASE("continuation reaches the full load") {
    const Mesh m = unit_square(0.125);
    auto family = [](double t) { return make_nonlinearity("poly:c0=" + std::to_string(8 * t) + ",c2=1", "zero"); };
    const auto trace = continuation_solve(m, family, ScalarField::zeros(m), 4, 1e-11, 20);
    CHECK(trace.converged);
    CHECK(residual(m, family(1.0), trace.final).norm() <= 1e-11);
}

TEST_CASE("strict convexity gate") {
    const auto sq = make_nonlinearity("power:p=2", "power:p=2");
    const auto rep = check_strict_convexity(sq, -1, 1, 21);
    CHECK(rep.passed);
    CHECK(rep.f_margin == doctest::Approx(2 * 0.1));

    const auto lin = make_nonlinearity("linear", "power:p=2");
    const auto r2 = check_strict_convexity(lin, -1, 1, 21);
    CHECK_FALSE(r2.passed);
    CHECK(r2.failing == "f");

    const auto cube = make_nonlinearity("power:p=3", "power:p=2");
    const auto r3 = check_strict_convexity(cube, -1, 1, 21);
    CHECK_FALSE(r3.passed);
    REQUIRE(r3.witness.has_value());
    CHECK((*r3.witness)[0] == doctest::Approx(-1.0));
    CHECK((*r3.witness)[1] == doctest::Approx(1.0));

    // affine g fails only when Gamma_2 matters
    const auto fonly = make_nonlinearity("power:p=2", "zero");
    CHECK_FALSE(check_strict_convexity(fonly, -1, 1, 11).passed);
    CHECK(check_strict_convexity(fonly, -1, 1, 11, {{0.0, 0.0}}, false).passed);
}
