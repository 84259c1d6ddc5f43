#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mixsym/errors.hpp"
#include "mixsym/geometry.hpp"

using namespace mixsym;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoFailure;
}

Mesh unit_square(double h) { return generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}}), h); }

void check_boundary_invariants(const Mesh& m) {
    // every cell positive, tag-2 facets flat, both tags present
    for (std::size_t c = 0; c < m.num_cells(); ++c) CHECK(m.cell_volume(c) > 0.0);
    int ones = 0, twos = 0;
    const int axial = m.dimension() - 1;
    for (const auto& f : m.facets()) {
        if (f.tag == 2) {
            ++twos;
            for (int i = 0; i < m.dimension(); ++i) CHECK(std::abs(m.vertices()[f.vertices[i]][axial]) <= 1e-12);
        } else {
            CHECK(f.tag == 1);
            ++ones;
        }
    }
    CHECK(ones > 0);
    CHECK(twos > 0);
}

}  // namespace

TEST_CASE("build_domain validates parameters") {
    const auto ball = build_domain(DomainKind::HalfBall, {{"R", 1}});
    CHECK(ball.dimension == 3);
    CHECK(ball.mixed());
    CHECK(build_domain(DomainKind::Interval1d, {{"L", 1}}).dimension == 1);
    CHECK(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}).dimension == 2);

    CHECK(code_of([] { build_domain(DomainKind::AnnularCylinder, {{"R1", 1}, {"R2", 0.5}, {"b", 1}}); }) ==
          ErrorCode::RadiiOrder);
    CHECK(code_of([] { build_domain(DomainKind::Cylinder, {{"R", 1}}); }) == ErrorCode::MissingParam);
    CHECK(code_of([] { build_domain(DomainKind::Cone, {{"R", 1}, {"b", -2}}); }) == ErrorCode::NonPositiveParam);
    CHECK(parse_domain_kind("annular_cylinder") == DomainKind::AnnularCylinder);
    CHECK(to_string(DomainKind::HalfDisc2d) == "half_disc2d");
}

TEST_CASE("structured counts") {
    const Mesh sq = unit_square(0.5);
    CHECK(sq.num_cells() == 8);
    CHECK(sq.num_vertices() == 9);
    CHECK(sq.measure() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sq.gamma2_measure() == doctest::Approx(1.0).epsilon(1e-14));

    const Mesh line = generate_mesh(build_domain(DomainKind::Interval1d, {{"L", 1}}), 0.25);
    CHECK(line.num_cells() == 4);
    CHECK(line.num_vertices() == 5);
    const auto g2 = line.gamma2_mask();
    const auto g1 = line.dirichlet_mask();
    CHECK(g2[0]);
    CHECK(g1[4]);
    CHECK_FALSE(g1[0]);
}

TEST_CASE("boundary tagging on every domain kind") {
    check_boundary_invariants(generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.2));
    check_boundary_invariants(unit_square(0.25));
    check_boundary_invariants(generate_mesh(build_domain(DomainKind::HalfBall, {{"R", 1}}), 0.5));
    check_boundary_invariants(generate_mesh(build_domain(DomainKind::Cylinder, {{"R", 1}, {"b", 1}}), 0.5));
    check_boundary_invariants(
        generate_mesh(build_domain(DomainKind::AnnularCylinder, {{"R1", 0.5}, {"R2", 1.5}, {"b", 1}}), 0.25));
    check_boundary_invariants(generate_mesh(build_domain(DomainKind::Cone, {{"R", 1}, {"b", 1}}), 0.5));
    check_boundary_invariants(generate_mesh(build_domain(DomainKind::HalfAnnulus, {{"R1", 1}, {"R2", 2}}), 0.5));
}

TEST_CASE("pure Dirichlet analog has no Gamma_2") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Rectangle2d, {{"Lx", 1}, {"Ly", 1}, {"dirichlet", 1}}), 0.25);
    for (const auto& f : m.facets()) CHECK(f.tag == 1);
    CHECK(m.gamma2_measure() == 0.0);
}

TEST_CASE("volumes approach the exact measures") {
    const double pi = std::numbers::pi;
    const Mesh ball = generate_mesh(build_domain(DomainKind::HalfBall, {{"R", 1}}), 0.125);
    CHECK(ball.measure() == doctest::Approx(2.0 * pi / 3.0).epsilon(0.02));
    CHECK(ball.gamma2_measure() == doctest::Approx(pi).epsilon(0.02));
    const Mesh cyl = generate_mesh(build_domain(DomainKind::Cylinder, {{"R", 1}, {"b", 2}}), 0.25);
    CHECK(cyl.measure() == doctest::Approx(2.0 * pi).epsilon(0.02));
    const Mesh disc = generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.05);
    CHECK(disc.measure() == doctest::Approx(pi / 2).epsilon(0.005));
    CHECK(disc.gamma2_measure() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("refinement at least doubles the nodes across a thickness") {
    auto count = [](double h) { return generate_mesh(build_domain(DomainKind::Interval1d, {{"L", 1}}), h).num_vertices(); };
    CHECK(count(0.125) - 1 >= 2 * (count(0.25) - 1));
    CHECK(unit_square(0.125).num_vertices() >= 4 * (unit_square(0.25).num_vertices() - 1) / 2);
}

TEST_CASE("too coarse mesh is rejected") {
    CHECK(code_of([] { generate_mesh(build_domain(DomainKind::Interval1d, {{"L", 1}}), 0.75); }) ==
          ErrorCode::Unmeshable);
    CHECK(code_of([] {
              generate_mesh(build_domain(DomainKind::AnnularCylinder, {{"R1", 1}, {"R2", 1.1}, {"b", 1}}), 0.1);
          }) == ErrorCode::Unmeshable);
}

TEST_CASE("reflection of the unit square") {
    const Mesh sq = unit_square(0.25);
    const auto r = reflection_map(sq, {1, 0, 0});
    for (std::size_t v = 0; v < sq.num_vertices(); ++v) {
        const int w = r.node_pairing[v];
        CHECK(r.node_pairing[w] == static_cast<int>(v));
        CHECK(sq.vertices()[w][0] == doctest::Approx(-sq.vertices()[v][0]));
        CHECK(sq.vertices()[w][1] == sq.vertices()[v][1]);
        if (sq.vertices()[v][0] == 0.0) CHECK(w == static_cast<int>(v));
    }
}

TEST_CASE("perturbed vertex breaks the reflection") {
    const Mesh sq = unit_square(0.25);
    auto verts = sq.vertices();
    // an interior vertex off the mirror line
    for (auto& p : verts)
        if (std::abs(p[0] - 0.25) < 1e-12 && std::abs(p[1] - 0.5) < 1e-12) p[0] += 1e-3;
    const Mesh bent(2, verts, sq.cells(), sq.facets(), sq.mesh_size(), sq.sectors());
    CHECK(code_of([&] { reflection_map(bent, {1, 0, 0}); }) == ErrorCode::AsymmetricMesh);
}

TEST_CASE("reflections of revolved meshes are involutions") {
    const Mesh disc = generate_mesh(build_domain(DomainKind::HalfDisc2d, {{"R", 1}}), 0.2);
    const auto r = reflection_map(disc, {1, 0, 0});
    for (std::size_t v = 0; v < disc.num_vertices(); ++v) CHECK(r.node_pairing[r.node_pairing[v]] == static_cast<int>(v));

    const Mesh ball = generate_mesh(build_domain(DomainKind::HalfBall, {{"R", 1}, {"n_theta", 16}}), 0.5);
    CHECK(ball.sectors() == 16);
    for (int k = 0; k < 16; ++k) {
        const auto e = direction_at(3, 2.0 * std::numbers::pi * k / 16);
        const auto rk = reflection_map(ball, e);
        std::set<int> image(rk.node_pairing.begin(), rk.node_pairing.end());
        CHECK(image.size() == ball.num_vertices());
        for (std::size_t v = 0; v < ball.num_vertices(); ++v)
            CHECK(rk.node_pairing[rk.node_pairing[v]] == static_cast<int>(v));
    }
}

TEST_CASE("mesh text format round-trips exactly") {
    const Mesh m = generate_mesh(build_domain(DomainKind::Cone, {{"R", 1}, {"b", 1.3}}), 0.5);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh back = read_mesh(ss);
    CHECK(back.fingerprint() == m.fingerprint());
    CHECK(back.num_cells() == m.num_cells());
    CHECK(back.facets().size() == m.facets().size());
    for (std::size_t v = 0; v < m.num_vertices(); ++v) CHECK(back.vertices()[v] == m.vertices()[v]);

    std::stringstream bad("N 2 3 1 0\n0 0 0\n1 1 0\n");
    CHECK(code_of([&] { read_mesh(bad); }) == ErrorCode::IoFailure);
}
