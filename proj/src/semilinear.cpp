#include "mixsym/semilinear.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "mixsym/errors.hpp"
#include "simplex.hpp"

namespace mixsym {

namespace {

std::map<std::string, double> parse_params(std::string_view text, std::string_view name,
                                           const std::map<std::string, double>& defaults) {
    std::map<std::string, double> out = defaults;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ConfigError, "parameter '" + std::string(item) + "' of " + std::string(name) +
                                                    " is not key=value");
        const std::string key(item.substr(0, eq));
        const std::string_view val = item.substr(eq + 1);
        if (!out.contains(key))
            throw Error(ErrorCode::ConfigError, "unknown parameter '" + key + "' for " + std::string(name));
        double v = 0.0;
        const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
        if (res.ec != std::errc{} || res.ptr != val.data() + val.size() || !std::isfinite(v))
            throw Error(ErrorCode::ConfigError, "bad value '" + std::string(val) + "' for " + key);
        out[key] = v;
    }
    return out;
}

void check_field(const Mesh& mesh, const ScalarField& u) {
    if (u.mesh_fingerprint != mesh.fingerprint() || u.size() != mesh.num_vertices())
        throw Error(ErrorCode::MeshMismatch, "field does not belong to the mesh");
    const auto dir = mesh.dirichlet_mask();
    for (std::size_t v = 0; v < dir.size(); ++v)
        if (dir[v] && u.values[static_cast<Eigen::Index>(v)] != 0.0)
            throw Error(ErrorCode::ConfigError, "field does not vanish on Gamma_1 (vertex " + std::to_string(v) + ")");
}

double finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, std::string(what) + " returned a non-finite value");
    return v;
}

double norm(const Eigen::VectorXd& v) { return v.norm(); }

}  // namespace

ScalarNonlinearity parse_nonlinearity(std::string_view text) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    ScalarNonlinearity out;
    out.name = std::string(text);
    if (name == "zero") {
        parse_params(rest, name, {});
        out.value = [](double) { return 0.0; };
        out.derivative = [](double) { return 0.0; };
    } else if (name == "const") {
        const double a = parse_params(rest, name, {{"a", 1.0}}).at("a");
        out.value = [a](double) { return a; };
        out.derivative = [](double) { return 0.0; };
    } else if (name == "linear") {
        const double a = parse_params(rest, name, {{"a", 1.0}}).at("a");
        out.value = [a](double s) { return a * s; };
        out.derivative = [a](double) { return a; };
    } else if (name == "power") {
        const auto p = parse_params(rest, name, {{"p", 2.0}, {"a", 1.0}});
        const double a = p.at("a");
        const double e = p.at("p");
        if (e < 1.0 || e != std::floor(e) || e > 64)
            throw Error(ErrorCode::ConfigError, "power: p must be a positive integer");
        const int n = static_cast<int>(e);
        out.value = [a, n](double s) { return a * std::pow(s, n); };
        out.derivative = [a, n](double s) { return a * n * std::pow(s, n - 1); };
    } else if (name == "abspower") {
        const auto p = parse_params(rest, name, {{"p", 2.0}, {"a", 1.0}});
        const double a = p.at("a"), e = p.at("p");
        if (!(e > 1.0)) throw Error(ErrorCode::ConfigError, "abspower: p must exceed 1");
        out.value = [a, e](double s) { return a * std::pow(std::abs(s), e); };
        out.derivative = [a, e](double s) { return a * e * std::pow(std::abs(s), e - 1.0) * (s < 0 ? -1.0 : 1.0); };
    } else if (name == "exp") {
        const auto p = parse_params(rest, name, {{"mu", 1.0}, {"a", 1.0}});
        const double a = p.at("a"), mu = p.at("mu");
        out.value = [a, mu](double s) { return a * std::exp(mu * s); };
        out.derivative = [a, mu](double s) { return a * mu * std::exp(mu * s); };
    } else if (name == "poly") {
        const auto p = parse_params(rest, name, {{"c0", 0.0}, {"c1", 0.0}, {"c2", 0.0}, {"c3", 0.0}});
        const double c0 = p.at("c0"), c1 = p.at("c1"), c2 = p.at("c2"), c3 = p.at("c3");
        out.value = [=](double s) { return c0 + s * (c1 + s * (c2 + s * c3)); };
        out.derivative = [=](double s) { return c1 + s * (2 * c2 + s * 3 * c3); };
    } else {
        throw Error(ErrorCode::ConfigError, "unknown nonlinearity '" + name + "'");
    }
    return out;
}

NonlinearityPair make_nonlinearity(std::string_view f_text, std::string_view g_text) {
    const auto f = parse_nonlinearity(f_text);
    const auto g = parse_nonlinearity(g_text);
    NonlinearityPair nl;
    nl.f = [v = f.value](double, double, double s) { return v(s); };
    nl.f_s = [d = f.derivative](double, double, double s) { return d(s); };
    nl.g = [v = g.value](double, double s) { return v(s); };
    nl.g_s = [d = g.derivative](double, double s) { return d(s); };
    nl.f_name = f.name;
    nl.g_name = g.name;
    return nl;
}

Eigen::VectorXd residual(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& u) {
    check_field(mesh, u);
    const int dim = mesh.dimension();
    Eigen::VectorXd full = assemble_stiffness(mesh) * u.values;
    auto load = [&](const int* ids, int nverts, double measure, bool boundary) {
        std::array<Point, 4> p{};
        for (int i = 0; i < nverts; ++i) p[i] = mesh.vertices()[ids[i]];
        for (const auto& q : detail::quadrature(nverts)) {
            const Point x = detail::interpolate(std::span<const Point>(p.data(), nverts), q.bary);
            double s = 0.0;
            for (int i = 0; i < nverts; ++i) s += q.bary[i] * u.values[ids[i]];
            const double r = detail::radial_coordinate(dim, x);
            const double val = boundary ? finite(nl.g(r, s), "g") : finite(nl.f(r, detail::axial_coordinate(dim, x), s), "f");
            for (int i = 0; i < nverts; ++i) full[ids[i]] -= q.weight * measure * val * q.bary[i];
        }
    };
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) load(mesh.cells()[c].data(), dim + 1, mesh.cell_volume(c), false);
    for (std::size_t f = 0; f < mesh.facets().size(); ++f)
        if (mesh.facets()[f].tag == 2) load(mesh.facets()[f].vertices.data(), dim, mesh.facet_measure(f), true);

    const auto dir = mesh.dirichlet_mask();
    std::vector<int> keep;
    for (std::size_t v = 0; v < dir.size(); ++v)
        if (!dir[v]) keep.push_back(static_cast<int>(v));
    return restrict_vector(full, keep);
}

OperatorBundle linearize(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& u) {
    check_field(mesh, u);
    const int dim = mesh.dimension();
    auto c = sample_weight(
        mesh, Support::Volume,
        [&](const Point& x, double s) {
            return -finite(nl.f_s(detail::radial_coordinate(dim, x), detail::axial_coordinate(dim, x), s), "f_s");
        },
        &u.values);
    auto d = sample_weight(
        mesh, Support::BoundaryGamma2,
        [&](const Point& x, double s) { return -finite(nl.g_s(detail::radial_coordinate(dim, x), s), "g_s"); },
        &u.values);
    OperatorBundle b = make_bundle(mesh, std::move(c), std::move(d));
    coercive_shift(b);
    return b;
}

SolveTrace newton_solve(const Mesh& mesh, const NonlinearityPair& nl, const ScalarField& init, double tol,
                        int max_iter) {
    if (!(tol > 0.0) || max_iter < 0) throw Error(ErrorCode::ConfigError, "Newton needs tol > 0 and max_iter >= 0");
    SolveTrace trace;
    ScalarField u = init;
    Eigen::VectorXd r = residual(mesh, nl, u);
    trace.iterates.push_back({norm(r), 0.0, 1.0});
    const auto dir = mesh.dirichlet_mask();
    std::vector<int> keep;
    for (std::size_t v = 0; v < dir.size(); ++v)
        if (!dir[v]) keep.push_back(static_cast<int>(v));

    for (int it = 0; it < max_iter && !(norm(r) <= tol); ++it) {
        OperatorBundle lin;
        try {
            lin = linearize(mesh, nl, u);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonFiniteValue || e.code() == ErrorCode::ShiftOverflow) break;
            throw;
        }
        const SparseMatrix J = restrict_matrix(lin.form(), keep);
        Eigen::SimplicialLDLT<SparseMatrix> solver(J);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorCode::SingularJacobian, "Jacobian factorization failed at iteration " + std::to_string(it));
        const Eigen::VectorXd step = -solver.solve(r);
        if (!step.allFinite())
            throw Error(ErrorCode::SingularJacobian, "Jacobian is singular at iteration " + std::to_string(it));

        const double r0 = norm(r);
        bool accepted = false;
        for (double t = 1.0; t >= 0x1p-30; t *= 0.5) {
            ScalarField trial = u;
            trial.values += extend_by_zero(t * step, keep, mesh.num_vertices());
            Eigen::VectorXd rt;
            try {
                rt = residual(mesh, nl, trial);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NonFiniteValue) throw;
                continue;
            }
            if (norm(rt) < r0) {
                u = std::move(trial);
                r = std::move(rt);
                trace.iterates.push_back({norm(r), t * norm(step), t});
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    trace.converged = norm(r) <= tol;
    trace.final = std::move(u);
    return trace;
}

SolveTrace continuation_solve(const Mesh& mesh, const std::function<NonlinearityPair(double)>& family,
                              const ScalarField& init, int steps, double tol, int max_iter) {
    if (steps < 1) throw Error(ErrorCode::ConfigError, "continuation needs at least one step");
    SolveTrace trace;
    ScalarField u = init;
    for (int i = 1; i <= steps; ++i) {
        SolveTrace stage = newton_solve(mesh, family(static_cast<double>(i) / steps), u, tol, max_iter);
        trace.iterates.insert(trace.iterates.end(), stage.iterates.begin(), stage.iterates.end());
        u = stage.final;
        trace.converged = stage.converged;
        if (!stage.converged) break;
    }
    trace.final = std::move(u);
    return trace;
}

ConvexityReport check_strict_convexity(const NonlinearityPair& nl, double s_lo, double s_hi, int samples,
                                       const std::vector<std::array<double, 2>>& positions, bool require_g) {
    if (!(s_hi > s_lo) || samples < 2 || !std::isfinite(s_lo) || !std::isfinite(s_hi))
        throw Error(ErrorCode::ConfigError, "convexity check needs a finite range and at least two samples");
    ConvexityReport rep;
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) grid[i] = s_lo + (s_hi - s_lo) * i / (samples - 1);

    // smallest increase of d between neighbours; witness pairs (a, b), a < b,
    // with d(a) >= d(b), b as far right as possible
    auto scan = [&](const std::function<double(double)>& d, double& margin) -> std::optional<std::array<double, 2>> {
        std::vector<double> vals(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = finite(d(grid[i]), "derivative");
        margin = std::numeric_limits<double>::infinity();
        std::optional<std::array<double, 2>> witness;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            margin = std::min(margin, vals[i + 1] - vals[i]);
            if (!witness && vals[i + 1] <= vals[i]) {
                std::size_t j = i + 1;
                for (std::size_t k = grid.size() - 1; k > i; --k)
                    if (vals[k] <= vals[i]) {
                        j = k;
                        break;
                    }
                witness = std::array<double, 2>{grid[i], grid[j]};
            }
        }
        return witness;
    };

    rep.f_margin = rep.g_margin = std::numeric_limits<double>::infinity();
    std::optional<std::array<double, 2>> fw, gw;
    for (const auto& pos : positions) {
        double m = 0.0;
        auto w = scan([&](double s) { return nl.f_s(pos[0], pos[1], s); }, m);
        rep.f_margin = std::min(rep.f_margin, m);
        if (w && !fw) fw = w;
        w = scan([&](double s) { return nl.g_s(pos[0], s); }, m);
        rep.g_margin = std::min(rep.g_margin, m);
        if (w && !gw) gw = w;
    }
    rep.f_strict = rep.f_margin > 0.0;
    rep.g_strict = rep.g_margin > 0.0;
    rep.passed = rep.f_strict && (rep.g_strict || !require_g);
    if (!rep.f_strict) {
        rep.failing = "f";
        rep.witness = fw;
    } else if (!rep.g_strict && require_g) {
        rep.failing = "g";
        rep.witness = gw;
    }
    return rep;
}

}  // namespace mixsym
