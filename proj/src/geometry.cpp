#include "mixsym/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "mixsym/errors.hpp"
#include "simplex.hpp"

namespace mixsym {

namespace {

struct KindInfo {
    DomainKind kind;
    std::string_view name;
    int dimension;
    std::vector<std::string> required;
};

const std::vector<KindInfo>& kind_table() {
    static const std::vector<KindInfo> table{
        {DomainKind::HalfBall, "half_ball", 3, {"R"}},
        {DomainKind::HalfAnnulus, "half_annulus", 3, {"R1", "R2"}},
        {DomainKind::Cylinder, "cylinder", 3, {"R", "b"}},
        {DomainKind::AnnularCylinder, "annular_cylinder", 3, {"R1", "R2", "b"}},
        {DomainKind::Cone, "cone", 3, {"R", "b"}},
        {DomainKind::Rectangle2d, "rectangle2d", 2, {"Lx", "Ly"}},
        {DomainKind::HalfDisc2d, "half_disc2d", 2, {"R"}},
        {DomainKind::Interval1d, "interval1d", 1, {"L"}},
    };
    return table;
}

const KindInfo& info(DomainKind kind) {
    for (const auto& k : kind_table())
        if (k.kind == kind) return k;
    throw Error(ErrorCode::ConfigError, "unknown domain kind");
}

class Fnv1a {
public:
    void add(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            hash_ ^= (v >> (8 * i)) & 0xffu;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string_view to_string(DomainKind kind) { return info(kind).name; }

DomainKind parse_domain_kind(std::string_view name) {
    for (const auto& k : kind_table())
        if (k.name == name) return k.kind;
    throw Error(ErrorCode::ConfigError, "unknown domain kind '" + std::string(name) + "'");
}

double DomainSpec::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw Error(ErrorCode::MissingParam, "domain parameter '" + name + "'");
    return it->second;
}

double DomainSpec::param_or(const std::string& name, double fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

DomainSpec build_domain(DomainKind kind, const std::map<std::string, double>& params) {
    const auto& k = info(kind);
    for (const auto& key : k.required) {
        auto it = params.find(key);
        if (it == params.end())
            throw Error(ErrorCode::MissingParam, std::string(k.name) + " requires '" + key + "'");
        if (!(it->second > 0.0) || !std::isfinite(it->second))
            throw Error(ErrorCode::NonPositiveParam, "'" + key + "' must be positive and finite");
    }
    if (params.contains("R1") && params.contains("R2") && params.at("R1") >= params.at("R2"))
        throw Error(ErrorCode::RadiiOrder, "R1 must be smaller than R2");
    if (auto it = params.find("n_theta"); it != params.end()) {
        const double n = it->second;
        if (!(n > 0.0) || n != std::floor(n))
            throw Error(ErrorCode::NonPositiveParam, "n_theta must be a positive integer");
    }
    DomainSpec spec;
    spec.kind = kind;
    spec.params = params;
    spec.dimension = k.dimension;
    return spec;
}

Mesh::Mesh(int dimension, std::vector<Point> vertices, std::vector<Cell> cells,
           std::vector<Facet> facets, double mesh_size, int sectors)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      facets_(std::move(facets)),
      mesh_size_(mesh_size),
      sectors_(sectors) {
    if (dimension_ < 1 || dimension_ > 3) throw Error(ErrorCode::ConfigError, "mesh dimension must be 1, 2 or 3");
    const auto nv = static_cast<int>(vertices_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        for (int i = 0; i <= dimension_; ++i)
            if (cells_[c][i] < 0 || cells_[c][i] >= nv)
                throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(c) + " has an invalid vertex index");
        if (!(cell_volume(c) > 0.0))
            throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(c) + " has non-positive volume");
    }
    for (const auto& f : facets_) {
        for (int i = 0; i < dimension_; ++i)
            if (f.vertices[i] < 0 || f.vertices[i] >= nv)
                throw Error(ErrorCode::DegenerateCell, "facet with invalid vertex index");
        if (f.tag != 1 && f.tag != 2) throw Error(ErrorCode::ConfigError, "facet tags must be 1 or 2");
    }
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(dimension_));
    h.add(static_cast<std::uint64_t>(vertices_.size()));
    for (const auto& p : vertices_)
        for (int d = 0; d < dimension_; ++d) h.add(p[d]);
    h.add(static_cast<std::uint64_t>(cells_.size()));
    for (const auto& c : cells_)
        for (int i = 0; i <= dimension_; ++i) h.add(static_cast<std::uint64_t>(c[i]));
    for (const auto& f : facets_) {
        for (int i = 0; i < dimension_; ++i) h.add(static_cast<std::uint64_t>(f.vertices[i]));
        h.add(static_cast<std::uint64_t>(f.tag));
    }
    fingerprint_ = h.value();
}

std::vector<bool> Mesh::dirichlet_mask() const {
    std::vector<bool> mask(vertices_.size(), false);
    for (const auto& f : facets_)
        if (f.tag == 1)
            for (int i = 0; i < dimension_; ++i) mask[f.vertices[i]] = true;
    return mask;
}

std::vector<bool> Mesh::gamma2_mask() const {
    std::vector<bool> mask(vertices_.size(), false);
    for (const auto& f : facets_)
        if (f.tag == 2)
            for (int i = 0; i < dimension_; ++i) mask[f.vertices[i]] = true;
    return mask;
}

double Mesh::cell_volume(std::size_t c) const {
    std::array<Point, 4> p{};
    for (int i = 0; i <= dimension_; ++i) p[i] = vertices_[cells_[c][i]];
    return detail::signed_volume(dimension_, std::span<const Point>(p.data(), dimension_ + 1));
}

double Mesh::facet_measure(std::size_t f) const {
    std::array<Point, 3> p{};
    for (int i = 0; i < dimension_; ++i) p[i] = vertices_[facets_[f].vertices[i]];
    return detail::facet_measure(dimension_, std::span<const Point>(p.data(), dimension_));
}

double Mesh::measure() const {
    double total = 0.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) total += cell_volume(c);
    return total;
}

double Mesh::gamma2_measure() const {
    double total = 0.0;
    for (std::size_t f = 0; f < facets_.size(); ++f)
        if (facets_[f].tag == 2) total += facet_measure(f);
    return total;
}

double Mesh::max_cell_diameter() const {
    double best = 0.0;
    for (const auto& c : cells_)
        for (int i = 0; i <= dimension_; ++i)
            for (int j = i + 1; j <= dimension_; ++j) {
                const auto& a = vertices_[c[i]];
                const auto& b = vertices_[c[j]];
                best = std::max(best, std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]));
            }
    return best;
}

double Mesh::coordinate_scale() const {
    double s = 1.0;
    for (const auto& p : vertices_)
        for (double x : p) s = std::max(s, std::abs(x));
    return s;
}

Point direction_at(int dimension, double theta) {
    if (dimension == 1) return {0, 0, 0};
    if (dimension == 2) return {std::cos(theta) >= 0.0 ? 1.0 : -1.0, 0, 0};
    return {std::cos(theta), std::sin(theta), 0};
}

ReflectionMap reflection_map(const Mesh& mesh, const Point& e, double tolerance) {
    const int dim = mesh.dimension();
    const double tol = tolerance * mesh.coordinate_scale();
    const double cell = std::max(tol, 1e-300);
    auto key_of = [&](const Point& p, std::array<long long, 3> offset) {
        std::array<long long, 3> k{};
        for (int d = 0; d < 3; ++d) k[d] = static_cast<long long>(std::floor(p[d] / cell)) + offset[d];
        return k;
    };
    struct KeyHash {
        std::size_t operator()(const std::array<long long, 3>& k) const {
            std::size_t h = 1469598103934665603ULL;
            for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    std::unordered_map<std::array<long long, 3>, std::vector<int>, KeyHash> buckets;
    const auto& verts = mesh.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) buckets[key_of(verts[i], {0, 0, 0})].push_back(static_cast<int>(i));

    ReflectionMap map;
    map.direction = e;
    map.tolerance = tolerance;
    map.node_pairing.assign(verts.size(), -1);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const Point& x = verts[i];
        const double xe = x[0] * e[0] + x[1] * e[1] + x[2] * e[2];
        const Point y{x[0] - 2 * xe * e[0], x[1] - 2 * xe * e[1], x[2] - 2 * xe * e[2]};
        int found = -1;
        double best = tol;
        for (long long a = -1; a <= 1 && dim >= 1; ++a)
            for (long long b = (dim >= 2 ? -1 : 0); b <= (dim >= 2 ? 1 : 0); ++b)
                for (long long c = (dim >= 3 ? -1 : 0); c <= (dim >= 3 ? 1 : 0); ++c) {
                    auto it = buckets.find(key_of(y, {a, b, c}));
                    if (it == buckets.end()) continue;
                    for (int j : it->second) {
                        const auto& z = verts[j];
                        const double dist = std::hypot(z[0] - y[0], z[1] - y[1], z[2] - y[2]);
                        if (dist <= best) {
                            best = dist;
                            found = j;
                        }
                    }
                }
        if (found < 0)
            throw Error(ErrorCode::AsymmetricMesh, "vertex " + std::to_string(i) + " has no mirror image");
        map.node_pairing[i] = found;
    }
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (map.node_pairing[map.node_pairing[i]] != static_cast<int>(i))
            throw Error(ErrorCode::AsymmetricMesh, "reflection pairing is not an involution");
    return map;
}

}  // namespace mixsym
