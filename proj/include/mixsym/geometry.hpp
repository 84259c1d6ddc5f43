#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mixsym {

/// Cylindrically symmetric domain families. The last coordinate is the axial
/// one (x_N); the flat bottom x_N = 0 carries the nonlinear boundary part
/// Gamma_2, the rest of the boundary is Dirichlet (Gamma_1).
enum class DomainKind {
    HalfBall,
    HalfAnnulus,
    Cylinder,
    AnnularCylinder,
    Cone,
    Rectangle2d,
    HalfDisc2d,
    Interval1d,
};

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

struct DomainSpec {
    DomainKind kind = DomainKind::Interval1d;
    std::map<std::string, double> params;
    int dimension = 1;

    double param(const std::string& name) const;
    double param_or(const std::string& name, double fallback) const;
    /// False when the bottom is Dirichlet too (the pure Dirichlet analog).
    bool mixed() const { return param_or("dirichlet", 0.0) == 0.0; }
};

/// Validates parameters for `kind`. Required keys:
///   half_ball {R}, half_annulus {R1,R2}, cylinder {R,b},
///   annular_cylinder {R1,R2,b}, cone {R,b}, rectangle2d {Lx,Ly},
///   half_disc2d {R}, interval1d {L}.
/// Optional: `n_theta` (3D kinds, multiple of 4), `dirichlet` (1 = no Gamma_2).
DomainSpec build_domain(DomainKind kind, const std::map<std::string, double>& params);

using Point = std::array<double, 3>;
using Cell = std::array<int, 4>;

struct Facet {
    std::array<int, 3> vertices{-1, -1, -1};
    int tag = 1;  // 1 = Gamma_1 (Dirichlet), 2 = Gamma_2
};

class Mesh {
public:
    Mesh() = default;
    /// Unused trailing coordinates / indices must be 0 / -1. Throws
    /// DegenerateCell if a cell has non-positive signed volume.
    Mesh(int dimension, std::vector<Point> vertices, std::vector<Cell> cells,
         std::vector<Facet> facets, double mesh_size, int sectors = 0);

    int dimension() const { return dimension_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Facet>& facets() const { return facets_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_cells() const { return cells_.size(); }
    double mesh_size() const { return mesh_size_; }
    /// Number of equal angular sectors for rotationally structured meshes
    /// (2 for the mirror-symmetric planar kinds), 0 when unstructured.
    int sectors() const { return sectors_; }
    std::uint64_t fingerprint() const { return fingerprint_; }

    /// Vertices lying on a tag-1 facet.
    std::vector<bool> dirichlet_mask() const;
    /// Vertices lying on a tag-2 facet.
    std::vector<bool> gamma2_mask() const;
    double measure() const;
    double gamma2_measure() const;
    double cell_volume(std::size_t c) const;
    double facet_measure(std::size_t f) const;
    double max_cell_diameter() const;
    /// Largest coordinate magnitude, at least 1; used to scale tolerances.
    double coordinate_scale() const;

private:
    int dimension_ = 1;
    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<Facet> facets_;
    double mesh_size_ = 0.0;
    int sectors_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Structured simplicial mesh. Tag-2 facets are exactly the boundary facets in
/// x_N = 0 (for mixed domains). Planar and 3D kinds are mirror symmetric
/// cell by cell across every hyperplane through the axis whose normal angle is
/// a multiple of 2*pi/sectors, so reflections map nodes to nodes and caps are
/// unions of cells.
Mesh generate_mesh(const DomainSpec& spec, double h);

struct ReflectionMap {
    Point direction{};               // unit, last component zero
    std::vector<int> node_pairing;   // involution on vertex indices
    double tolerance = 1e-9;
};

/// sigma_e(x) = x - 2 (x.e) e as a vertex permutation. Throws AsymmetricMesh
/// if some vertex has no mirror within `tolerance` (scaled by coordinate size).
ReflectionMap reflection_map(const Mesh& mesh, const Point& e, double tolerance = 1e-9);

/// Unit direction with polar angle theta in the x' plane. For N = 2 only
/// theta = 0 and pi are meaningful; N = 1 yields the zero vector.
Point direction_at(int dimension, double theta);

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

}  // namespace mixsym
