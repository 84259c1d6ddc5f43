#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mixsym/errors.hpp"
#include "mixsym/geometry.hpp"

namespace mixsym {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
T read_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) throw Error(ErrorCode::IoFailure, std::string("malformed mesh file while reading ") + what);
    return v;
}

double read_real(std::istream& in) {
    std::string token = read_value<std::string>(in, "coordinate");
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::IoFailure, "bad coordinate literal '" + token + "'");
    }
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
    const int dim = mesh.dimension();
    out << "N " << dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.facets().size() << '\n';
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        out << i;
        for (int d = 0; d < dim; ++d) out << ' ' << format_real(mesh.vertices()[i][d]);
        out << '\n';
    }
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        out << c;
        for (int i = 0; i <= dim; ++i) out << ' ' << mesh.cells()[c][i];
        out << '\n';
    }
    for (std::size_t f = 0; f < mesh.facets().size(); ++f) {
        const auto& facet = mesh.facets()[f];
        out << f << ' ' << facet.tag;
        for (int i = 0; i < dim; ++i) out << ' ' << facet.vertices[i];
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing mesh");
}

Mesh read_mesh(std::istream& in) {
    if (read_value<std::string>(in, "header") != "N") throw Error(ErrorCode::IoFailure, "mesh header must start with N");
    const int dim = read_value<int>(in, "dimension");
    const auto nv = read_value<std::size_t>(in, "vertex count");
    const auto nc = read_value<std::size_t>(in, "cell count");
    const auto nf = read_value<std::size_t>(in, "facet count");
    if (dim < 1 || dim > 3) throw Error(ErrorCode::IoFailure, "mesh dimension must be 1..3");
    std::vector<Point> verts(nv, Point{0, 0, 0});
    for (std::size_t i = 0; i < nv; ++i) {
        if (read_value<std::size_t>(in, "vertex id") != i) throw Error(ErrorCode::IoFailure, "vertex ids must be sequential");
        for (int d = 0; d < dim; ++d) verts[i][d] = read_real(in);
    }
    std::vector<Cell> cells(nc, Cell{-1, -1, -1, -1});
    for (std::size_t c = 0; c < nc; ++c) {
        if (read_value<std::size_t>(in, "cell id") != c) throw Error(ErrorCode::IoFailure, "cell ids must be sequential");
        for (int i = 0; i <= dim; ++i) cells[c][i] = read_value<int>(in, "cell vertex");
    }
    std::vector<Facet> facets(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        if (read_value<std::size_t>(in, "facet id") != f) throw Error(ErrorCode::IoFailure, "facet ids must be sequential");
        facets[f].tag = read_value<int>(in, "facet tag");
        for (int i = 0; i < dim; ++i) facets[f].vertices[i] = read_value<int>(in, "facet vertex");
    }
    double h = 0.0;
    Mesh probe(dim, verts, cells, facets, 1.0);
    h = probe.max_cell_diameter();
    return Mesh(dim, std::move(verts), std::move(cells), std::move(facets), h);
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    return read_mesh(in);
}

}  // namespace mixsym
