// Structured generators. Every kind is built so that reflections through the
// axis map cells to cells: quads are split around a center node instead of
// along a diagonal, and 3D cells are coned from their centroid over
// center-split faces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "mixsym/errors.hpp"
#include "mixsym/geometry.hpp"
#include "simplex.hpp"

namespace mixsym {

namespace {

constexpr double kPi = std::numbers::pi;

int cells_across(double thickness, double h) {
    if (thickness / h < 2.0 - 1e-9)
        throw Error(ErrorCode::Unmeshable, "h too large: fewer than 2 cells across a thickness of " +
                                               std::to_string(thickness));
    return static_cast<int>(std::ceil(thickness / h - 1e-9));
}

/// Maps the reference square (a, t) in [0,1]^2 to the meridional half plane
/// (rho, z). Column a = 0 lies on the axis when `axis` is true.
struct MeridionalMap {
    std::function<std::array<double, 2>(double, double)> map;
    int na = 2;
    int nt = 2;
    bool axis = false;
};

// Square -> quarter disc of radius 1, a = 0 on the axis, t = 0 on the bottom.
std::array<double, 2> concentric(double a, double t) {
    const double s = std::max(a, t);
    if (s == 0.0) return {0.0, 0.0};
    const double phi = a >= t ? (kPi / 4.0) * (t / a) : kPi / 2.0 - (kPi / 4.0) * (a / t);
    return {s * std::cos(phi), s * std::sin(phi)};
}

MeridionalMap meridional(const DomainSpec& spec, double h) {
    MeridionalMap m;
    switch (spec.kind) {
        case DomainKind::Cylinder: {
            const double R = spec.param("R"), b = spec.param("b");
            m.na = cells_across(R, h);
            m.nt = cells_across(b, h);
            m.axis = true;
            m.map = [R, b](double a, double t) { return std::array<double, 2>{R * a, b * t}; };
            break;
        }
        case DomainKind::AnnularCylinder: {
            const double R1 = spec.param("R1"), R2 = spec.param("R2"), b = spec.param("b");
            m.na = cells_across(R2 - R1, h);
            m.nt = cells_across(b, h);
            m.map = [R1, R2, b](double a, double t) { return std::array<double, 2>{R1 + (R2 - R1) * a, b * t}; };
            break;
        }
        case DomainKind::HalfBall:
        case DomainKind::HalfDisc2d: {
            const double R = spec.param("R");
            m.na = m.nt = cells_across(R, h);
            m.axis = true;
            m.map = [R](double a, double t) {
                auto p = concentric(a, t);
                return std::array<double, 2>{R * p[0], R * p[1]};
            };
            break;
        }
        case DomainKind::Cone: {
            const double R = spec.param("R"), b = spec.param("b");
            cells_across(std::min(R, b), h);
            m.na = m.nt = cells_across(std::max(R, b), h);
            m.axis = true;
            m.map = [R, b](double a, double t) {
                auto p = concentric(a, t);
                const double s = std::hypot(p[0], p[1]);
                if (s == 0.0) return std::array<double, 2>{0.0, 0.0};
                const double c = p[0] / s, sn = p[1] / s;
                const double reach = 1.0 / (c / R + sn / b);
                return std::array<double, 2>{reach * p[0], reach * p[1]};
            };
            break;
        }
        case DomainKind::HalfAnnulus: {
            const double R1 = spec.param("R1"), R2 = spec.param("R2");
            m.nt = cells_across(R2 - R1, h);
            m.na = std::max(2, static_cast<int>(std::ceil(0.5 * kPi * R2 / h - 1e-9)));
            m.axis = true;
            // a: polar angle from the axis, t: radius
            m.map = [R1, R2](double a, double t) {
                const double s = R1 + (R2 - R1) * t;
                const double phi = 0.5 * kPi * a;
                return std::array<double, 2>{s * std::sin(phi), s * std::cos(phi)};
            };
            break;
        }
        default: throw Error(ErrorCode::ConfigError, "no meridional map for this kind");
    }
    return m;
}

using FacetKey = std::array<int, 3>;

std::vector<Facet> boundary_facets(int dim, const std::vector<Point>& verts, const std::vector<Cell>& cells,
                                   bool mixed, double scale) {
    std::map<FacetKey, std::pair<int, FacetKey>> count;  // sorted key -> (multiplicity, oriented)
    for (const auto& c : cells) {
        for (int skip = 0; skip <= dim; ++skip) {
            FacetKey f{-1, -1, -1};
            int k = 0;
            for (int i = 0; i <= dim; ++i)
                if (i != skip) f[k++] = c[i];
            FacetKey key = f;
            std::sort(key.begin(), key.begin() + dim);
            auto [it, inserted] = count.try_emplace(key, 0, f);
            it->second.first += 1;
        }
    }
    const double tol = 1e-12 * scale;
    std::vector<Facet> facets;
    for (const auto& [key, entry] : count) {
        if (entry.first != 1) continue;
        Facet f;
        f.vertices = key;
        bool bottom = true;
        for (int i = 0; i < dim; ++i) bottom = bottom && std::abs(verts[key[i]][dim - 1]) <= tol;
        f.tag = (bottom && mixed) ? 2 : 1;
        facets.push_back(f);
    }
    return facets;
}

void orient(int dim, const std::vector<Point>& verts, Cell& c) {
    std::array<Point, 4> p{};
    for (int i = 0; i <= dim; ++i) p[i] = verts[c[i]];
    if (detail::signed_volume(dim, std::span<const Point>(p.data(), dim + 1)) < 0) std::swap(c[0], c[1]);
}

Mesh finish(int dim, std::vector<Point> verts, std::vector<Cell> cells, bool mixed, double h, int sectors) {
    double scale = 1.0;
    for (const auto& p : verts)
        for (double x : p) scale = std::max(scale, std::abs(x));
    for (auto& c : cells) orient(dim, verts, c);
    auto facets = boundary_facets(dim, verts, cells, mixed, scale);
    return Mesh(dim, std::move(verts), std::move(cells), std::move(facets), h, sectors);
}

Mesh interval_mesh(const DomainSpec& spec, double h) {
    const double L = spec.param("L");
    const int n = cells_across(L, h);
    std::vector<Point> verts;
    std::vector<Cell> cells;
    for (int i = 0; i <= n; ++i) verts.push_back({L * i / n, 0, 0});
    for (int i = 0; i < n; ++i) cells.push_back({i, i + 1, -1, -1});
    return finish(1, std::move(verts), std::move(cells), spec.mixed(), h, 0);
}

Mesh rectangle_mesh(const DomainSpec& spec, double h) {
    const double Lx = spec.param("Lx"), Ly = spec.param("Ly");
    int nx = cells_across(Lx, h);
    if (nx % 2) ++nx;  // x = 0 must be a grid line
    const int ny = cells_across(Ly, h);
    std::vector<Point> verts;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) verts.push_back({-0.5 * Lx + Lx * i / nx, Ly * j / ny, 0});
    std::vector<Cell> cells;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            // alternating diagonals keep the mesh mirror symmetric about x = 0
            if ((i + j) % 2 == 0) {
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
                cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
            } else {
                cells.push_back({id(i, j), id(i + 1, j), id(i, j + 1), -1});
                cells.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), -1});
            }
        }
    return finish(2, std::move(verts), std::move(cells), spec.mixed(), h, 2);
}

Mesh half_disc_mesh(const DomainSpec& spec, double h) {
    const auto m = meridional(spec, h);
    std::vector<Point> verts;
    // node[side][i][j], side 0: x = +rho, side 1: x = -rho
    std::vector<std::vector<std::array<int, 2>>> node(m.na + 1, std::vector<std::array<int, 2>>(m.nt + 1));
    for (int i = 0; i <= m.na; ++i)
        for (int j = 0; j <= m.nt; ++j) {
            const auto rz = m.map(static_cast<double>(i) / m.na, static_cast<double>(j) / m.nt);
            if (i == 0 && m.axis) {
                node[i][j] = {static_cast<int>(verts.size()), static_cast<int>(verts.size())};
                verts.push_back({0.0, rz[1], 0});
            } else {
                node[i][j][0] = static_cast<int>(verts.size());
                verts.push_back({rz[0], rz[1], 0});
                node[i][j][1] = static_cast<int>(verts.size());
                verts.push_back({-rz[0], rz[1], 0});
            }
        }
    std::vector<Cell> cells;
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < m.na; ++i)
            for (int j = 0; j < m.nt; ++j) {
                const std::array<int, 4> q{node[i][j][side], node[i + 1][j][side], node[i + 1][j + 1][side],
                                           node[i][j + 1][side]};
                Point c{0, 0, 0};
                for (int v : q)
                    for (int d = 0; d < 2; ++d) c[d] += 0.25 * verts[v][d];
                const int center = static_cast<int>(verts.size());
                verts.push_back(c);
                for (int e = 0; e < 4; ++e) cells.push_back({q[e], q[(e + 1) % 4], center, -1});
            }
    return finish(2, std::move(verts), std::move(cells), spec.mixed(), h, 2);
}

Mesh revolved_mesh(const DomainSpec& spec, double h) {
    const auto m = meridional(spec, h);
    double outer = 0.0;
    for (int j = 0; j <= m.nt; ++j) outer = std::max(outer, m.map(1.0, static_cast<double>(j) / m.nt)[0]);
    for (int i = 0; i <= m.na; ++i) outer = std::max(outer, m.map(static_cast<double>(i) / m.na, 1.0)[0]);
    int nth = static_cast<int>(spec.param_or("n_theta", 0.0));
    if (nth == 0) nth = std::max(8, 4 * static_cast<int>(std::ceil(2.0 * kPi * outer / (4.0 * h) - 1e-9)));
    if (nth % 4 != 0) throw Error(ErrorCode::Unmeshable, "n_theta must be a multiple of 4");

    std::vector<Point> verts;
    auto rz_at = [&](int i, int j) { return m.map(static_cast<double>(i) / m.na, static_cast<double>(j) / m.nt); };
    // node(i, j, k)
    std::vector<int> node((m.na + 1) * (m.nt + 1) * nth);
    auto nid = [&](int i, int j, int k) -> int& { return node[(i * (m.nt + 1) + j) * nth + ((k % nth) + nth) % nth]; };
    for (int i = 0; i <= m.na; ++i)
        for (int j = 0; j <= m.nt; ++j) {
            const auto rz = rz_at(i, j);
            if (i == 0 && m.axis) {
                const int id = static_cast<int>(verts.size());
                verts.push_back({0.0, 0.0, rz[1]});
                for (int k = 0; k < nth; ++k) nid(i, j, k) = id;
            } else {
                for (int k = 0; k < nth; ++k) {
                    const double th = 2.0 * kPi * k / nth;
                    nid(i, j, k) = static_cast<int>(verts.size());
                    verts.push_back({rz[0] * std::cos(th), rz[0] * std::sin(th), rz[1]});
                }
            }
        }

    std::map<std::array<int, 4>, int> face_centers;
    std::vector<Cell> cells;
    auto average = [&](const std::vector<int>& ids) {
        Point c{0, 0, 0};
        for (int v : ids)
            for (int d = 0; d < 3; ++d) c[d] += verts[v][d] / static_cast<double>(ids.size());
        return c;
    };
    for (int i = 0; i < m.na; ++i)
        for (int j = 0; j < m.nt; ++j)
            for (int k = 0; k < nth; ++k) {
                const std::array<std::array<int, 2>, 4> q{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
                std::vector<std::vector<int>> faces;
                for (int side = 0; side < 2; ++side) {
                    std::vector<int> f;
                    for (const auto& c : q) f.push_back(nid(c[0], c[1], k + side));
                    faces.push_back(f);
                }
                for (int e = 0; e < 4; ++e) {
                    const auto& a = q[e];
                    const auto& b = q[(e + 1) % 4];
                    faces.push_back({nid(a[0], a[1], k), nid(b[0], b[1], k), nid(b[0], b[1], k + 1),
                                     nid(a[0], a[1], k + 1)});
                }
                std::vector<int> corners;
                for (const auto& f : faces)
                    for (int v : f)
                        if (std::find(corners.begin(), corners.end(), v) == corners.end()) corners.push_back(v);
                const int centroid = static_cast<int>(verts.size());
                verts.push_back(average(corners));
                for (auto f : faces) {
                    // drop consecutive duplicates (collapsed axis edges)
                    std::vector<int> ring;
                    for (std::size_t s = 0; s < f.size(); ++s)
                        if (f[s] != f[(s + 1) % f.size()]) ring.push_back(f[s]);
                    if (ring.size() < 3) continue;
                    if (ring.size() == 3) {
                        cells.push_back({ring[0], ring[1], ring[2], centroid});
                        continue;
                    }
                    std::array<int, 4> key{ring[0], ring[1], ring[2], ring[3]};
                    std::sort(key.begin(), key.end());
                    auto it = face_centers.find(key);
                    if (it == face_centers.end()) {
                        it = face_centers.emplace(key, static_cast<int>(verts.size())).first;
                        verts.push_back(average(ring));
                    }
                    for (int s = 0; s < 4; ++s) cells.push_back({ring[s], ring[(s + 1) % 4], it->second, centroid});
                }
            }
    return finish(3, std::move(verts), std::move(cells), spec.mixed(), h, nth);
}

}  // namespace

Mesh generate_mesh(const DomainSpec& spec, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::NonPositiveParam, "mesh size h must be positive");
    switch (spec.kind) {
        case DomainKind::Interval1d: return interval_mesh(spec, h);
        case DomainKind::Rectangle2d: return rectangle_mesh(spec, h);
        case DomainKind::HalfDisc2d: return half_disc_mesh(spec, h);
        default: return revolved_mesh(spec, h);
    }
}

}  // namespace mixsym
