#pragma once

// Simplex geometry and quadrature shared by the mesh and assembly code.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "mixsym/geometry.hpp"

namespace mixsym::detail {

inline double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Signed volume of a dim-simplex given its dim+1 vertices.
inline double signed_volume(int dim, std::span<const Point> p) {
    switch (dim) {
        case 1: return p[1][0] - p[0][0];
        case 2:
            return 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                          (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        default: {
            std::array<std::array<double, 3>, 3> m{};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) m[r][c] = p[r + 1][c] - p[0][c];
            return det3(m) / 6.0;
        }
    }
}

/// (dim-1)-measure of a facet given its dim vertices (a point has measure 1).
inline double facet_measure(int dim, std::span<const Point> p) {
    switch (dim) {
        case 1: return 1.0;
        case 2: return std::hypot(p[1][0] - p[0][0], p[1][1] - p[0][1]);
        default: {
            const double ax = p[1][0] - p[0][0], ay = p[1][1] - p[0][1], az = p[1][2] - p[0][2];
            const double bx = p[2][0] - p[0][0], by = p[2][1] - p[0][1], bz = p[2][2] - p[0][2];
            const double cx = ay * bz - az * by, cy = az * bx - ax * bz, cz = ax * by - ay * bx;
            return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
        }
    }
}

/// Gradients of the dim+1 barycentric coordinates of a simplex (constant).
inline std::array<Point, 4> barycentric_gradients(int dim, std::span<const Point> p) {
    std::array<Point, 4> g{};
    if (dim == 1) {
        const double len = p[1][0] - p[0][0];
        g[0] = {-1.0 / len, 0, 0};
        g[1] = {1.0 / len, 0, 0};
        return g;
    }
    // Rows of J^{-T} where J has columns p_i - p_0.
    std::array<std::array<double, 3>, 3> jac{};
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) jac[r][c] = p[c + 1][r] - p[0][r];
    if (dim == 2) {
        const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        // inverse of J, row i = gradient of lambda_{i+1}
        g[1] = {jac[1][1] / det, -jac[0][1] / det, 0};
        g[2] = {-jac[1][0] / det, jac[0][0] / det, 0};
    } else {
        const double det = det3(jac);
        std::array<std::array<double, 3>, 3> inv{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
                const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
                inv[i][j] = (jac[i1][j1] * jac[i2][j2] - jac[i1][j2] * jac[i2][j1]) / det;
            }
        }
        for (int i = 0; i < 3; ++i) g[i + 1] = {inv[i][0], inv[i][1], inv[i][2]};
    }
    for (int d = 0; d < 3; ++d) g[0][d] = -(g[1][d] + (dim > 1 ? g[2][d] : 0.0) + (dim > 2 ? g[3][d] : 0.0));
    return g;
}

struct QuadraturePoint {
    std::array<double, 4> bary{};  // barycentric coordinates (first n used)
    double weight = 0.0;           // fraction of the simplex measure
};

/// Symmetric rule exact for quadratics on an n-vertex simplex (n = 1..4).
inline const std::vector<QuadraturePoint>& quadrature(int nverts) {
    static const std::vector<QuadraturePoint> point{{{1.0, 0, 0, 0}, 1.0}};
    static const std::vector<QuadraturePoint> segment = [] {
        const double a = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
        return std::vector<QuadraturePoint>{{{a, 1.0 - a, 0, 0}, 0.5}, {{1.0 - a, a, 0, 0}, 0.5}};
    }();
    static const std::vector<QuadraturePoint> triangle{
        {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 0}, 1.0 / 3.0},
        {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0}, 1.0 / 3.0},
        {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 0}, 1.0 / 3.0}};
    static const std::vector<QuadraturePoint> tetrahedron = [] {
        const double a = 0.58541019662496845446, b = 0.13819660112501051518;
        return std::vector<QuadraturePoint>{{{a, b, b, b}, 0.25},
                                            {{b, a, b, b}, 0.25},
                                            {{b, b, a, b}, 0.25},
                                            {{b, b, b, a}, 0.25}};
    }();
    switch (nverts) {
        case 1: return point;
        case 2: return segment;
        case 3: return triangle;
        default: return tetrahedron;
    }
}

inline Point interpolate(std::span<const Point> p, const std::array<double, 4>& bary) {
    Point x{0, 0, 0};
    for (std::size_t i = 0; i < p.size(); ++i)
        for (int d = 0; d < 3; ++d) x[d] += bary[i] * p[i][d];
    return x;
}

/// |x'| for a point of an N-dimensional domain (x' excludes the last axis).
inline double radial_coordinate(int dim, const Point& x) {
    if (dim == 1) return 0.0;
    if (dim == 2) return std::abs(x[0]);
    return std::hypot(x[0], x[1]);
}

inline double axial_coordinate(int dim, const Point& x) { return x[dim - 1]; }

}  // namespace mixsym::detail
