#include "mixsym/reports.hpp"

#include <json.hpp>

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixsym/inequalities.hpp"
#include "mixsym/rng.hpp"
#include "mixsym/semilinear.hpp"
#include "mixsym/spectral.hpp"
#include "mixsym/symmetry.hpp"

namespace mixsym {

namespace {

using ojson = nlohmann::ordered_json;

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t{{"newton", 1e-10}, {"residual", 1e-8}};
    return t;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& key, const std::string& value) {
    double x = 0.0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x))
        throw Error(ErrorCode::ConfigError, "'" + key + "' expects a number, got '" + value + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& value) {
    long long x = 0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end)
        throw Error(ErrorCode::ConfigError, "'" + key + "' expects an integer, got '" + value + "'");
    return x;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

OperatorBundle constant_bundle(const Mesh& mesh, double c, double d) {
    WeightFunction wc, wd;
    if (c != 0.0) wc = [c](const Point&) { return c; };
    if (d != 0.0) wd = [d](const Point&) { return d; };
    OperatorBundle b = make_bundle(mesh, wc, wd);
    coercive_shift(b);
    return b;
}

NonlinearityPair scaled(const NonlinearityPair& nl, double t) {
    NonlinearityPair out = nl;
    out.f = [f = nl.f, t](double r, double z, double s) { return t * f(r, z, s); };
    out.f_s = [f = nl.f_s, t](double r, double z, double s) { return t * f(r, z, s); };
    out.g = [g = nl.g, t](double r, double s) { return t * g(r, s); };
    out.g_s = [g = nl.g_s, t](double r, double s) { return t * g(r, s); };
    return out;
}

void store_spectrum(Report& r, const Spectrum& sp) {
    r.shift = sp.shift_used;
    r.eigenvalues = sp.eigenvalues;
    r.residuals = sp.residuals;
    r.tol_zero = zero_tolerance(sp);
}

VerdictSummary summarize(const SymmetryVerdict& v) {
    VerdictSummary s;
    s.classification = std::string(to_string(v.classification));
    s.axis_theta = v.axis_theta;
    s.tolerance = v.tolerance;
    s.max_monotonicity_violation = v.max_monotonicity_violation;
    for (const auto& ev : v.evidence) {
        s.thetas.push_back(ev.theta);
        s.statuses.emplace_back(to_string(ev.status));
        if (ev.cap_lambda) s.cap_lambdas.push_back(*ev.cap_lambda);
    }
    s.angular_derivative_single_signed = v.angular_derivative_single_signed;
    s.note = v.note;
    return s;
}

void run_task(const PipelineConfig& cfg, const Mesh& mesh, Report& r) {
    switch (cfg.task) {
        case Task::Eig: {
            const OperatorBundle b = constant_bundle(mesh, cfg.weight_c, cfg.weight_d);
            const int k = std::min<int>(cfg.eig_k, static_cast<int>(b.num_free()));
            store_spectrum(r, solve_eigenproblem(b, k, cfg.seed));
            return;
        }
        case Task::Morse: {
            const Spectrum sp = morse_spectrum(constant_bundle(mesh, cfg.weight_c, cfg.weight_d), cfg.seed);
            store_spectrum(r, sp);
            r.morse_index = morse_index(sp);
            return;
        }
        case Task::Poincare: {
            r.constants.push_back({"poincare_volume", poincare_constant(mesh).value});
            if (mesh.gamma2_measure() > 0.0) r.constants.push_back({"poincare_trace", trace_poincare_constant(mesh).value});
            r.constants.push_back({"small_domain_delta", small_domain_threshold(cfg.poincare_M, mesh)});
            return;
        }
        default: break;
    }

    const NonlinearityPair nl = make_nonlinearity(cfg.f, cfg.g);
    const bool full = cfg.task == Task::Full;
    const int N = mesh.dimension();
    if (full) {
        const bool need_g = mesh.gamma2_measure() > 0.0;
        const ConvexityReport cv =
            check_strict_convexity(nl, cfg.s_min, cfg.s_max, cfg.convexity_samples, {{0.0, 0.0}}, need_g);
        std::string detail = "f margin " + fmt6(cv.f_margin) + ", g margin " + fmt6(cv.g_margin) +
                             (need_g ? "" : " (g not required)");
        if (cv.witness)
            detail += "; " + cv.failing + "' not increasing between " + fmt6((*cv.witness)[0]) + " and " +
                      fmt6((*cv.witness)[1]);
        r.checklist.push_back({"convexity", cv.passed, detail});
    }

    ScalarField init = ScalarField::zeros(mesh);
    if (cfg.init == "random") {
        CounterRng rng(cfg.seed, 1);
        const auto dir = mesh.dirichlet_mask();
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
            if (!dir[v]) init.values[static_cast<Eigen::Index>(v)] = cfg.init_scale * rng.normal();
    }
    const double tol = cfg.tolerance("newton");
    const SolveTrace trace =
        cfg.continuation > 0
            ? continuation_solve(mesh, [&](double t) { return scaled(nl, t); }, init, cfg.continuation, tol, cfg.max_iter)
            : newton_solve(mesh, nl, init, tol, cfg.max_iter);
    SolveSummary ss;
    ss.converged = trace.converged;
    ss.iterations = static_cast<int>(trace.iterates.size()) - 1;
    ss.residual_norm = trace.iterates.back().residual_norm;
    ss.tolerance = tol;
    ss.max_abs = trace.final.values.size() ? trace.final.values.cwiseAbs().maxCoeff() : 0.0;
    r.solve = ss;
    if (full) r.checklist.push_back({"newton_converged", trace.converged, "residual " + fmt6(ss.residual_norm)});
    if (!trace.converged)
        throw Error(ErrorCode::NotConverged, "Newton stopped at residual " + fmt6(ss.residual_norm) + " after " +
                                                 std::to_string(ss.iterations) + " iterations");
    const ScalarField& u = trace.final;
    const OperatorBundle lin = linearize(mesh, nl, u);
    const Spectrum sp = morse_spectrum(lin, cfg.seed);
    store_spectrum(r, sp);
    const int mu = morse_index(sp);
    r.morse_index = mu;
    if (cfg.task == Task::Solve) return;

    if (full) {
        r.checklist.push_back({"morse_index", true, "mu(u) = " + std::to_string(mu)});
        const bool low = mu <= N - 1;
        r.checklist.push_back({"morse_index_at_most_n_minus_1", low,
                               std::to_string(mu) + (low ? " <= " : " > ") + std::to_string(N - 1)});
        if (low) {
            try {
                const DirectionSearch d = find_nonnegative_direction(mesh, lin, sp, cfg.n_dirs);
                DirectionSummary ds;
                ds.theta = d.theta;
                ds.lambda_e = d.lambda_e;
                ds.used_odd_map = d.used_odd_map;
                ds.zero_theta = d.zero_theta;
                for (const auto& s : d.profile) {
                    ds.thetas.push_back(s.theta);
                    ds.lambdas.push_back(s.lambda);
                }
                r.direction = ds;
                r.checklist.push_back({"nonnegative_direction", true,
                                       "theta " + fmt6(d.theta) + ", lambda_1^e " + fmt6(d.lambda_e)});
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NotFound) throw;
                r.checklist.push_back({"nonnegative_direction", false, e.what()});
            }
        } else {
            r.checklist.push_back({"nonnegative_direction", false, "skipped: Morse index too large"});
        }
    }
    const SymmetryVerdict v = foliated_schwarz_check(mesh, u, cfg.n_dirs, &lin);
    r.verdict = summarize(v);
    if (full) {
        const bool ok = v.classification != SymmetryClass::Asymmetric;
        r.checklist.push_back({"verdict_not_asymmetric", ok, std::string(to_string(v.classification))});
        r.note = "Discrete check of the hypothesis chain and of the reflection mechanism on one mesh; "
                 "it does not prove the continuum statement.";
    }
}

// ---- JSON ----

ojson opt(const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); }

ojson payload_object(const Report& r) {
    ojson p;
    p["task"] = r.task;
    p["seed"] = r.seed;
    p["config"] = ojson::object();
    for (const auto& [k, v] : r.config) p["config"][k] = v;
    const auto& m = r.mesh;
    p["mesh"] = {{"dimension", m.dimension}, {"vertices", m.vertices},       {"cells", m.cells},
                 {"free_vertices", m.free_vertices}, {"sectors", m.sectors}, {"h", m.h},
                 {"measure", m.measure},     {"gamma2_measure", m.gamma2_measure}, {"fingerprint", m.fingerprint}};
    p["shift"] = opt(r.shift);
    p["eigenvalues"] = r.eigenvalues;
    p["residuals"] = r.residuals;
    p["residual_tolerance"] = r.residual_tolerance;
    p["morse_index"] = r.morse_index ? ojson(*r.morse_index) : ojson(nullptr);
    p["tol_zero"] = opt(r.tol_zero);
    p["constants"] = ojson::array();
    for (const auto& c : r.constants) p["constants"].push_back({{"name", c.name}, {"value", c.value}});
    if (r.solve) {
        const auto& s = *r.solve;
        p["solve"] = {{"converged", s.converged}, {"iterations", s.iterations}, {"residual_norm", s.residual_norm},
                      {"tolerance", s.tolerance}, {"max_abs", s.max_abs}};
    } else {
        p["solve"] = nullptr;
    }
    if (r.direction) {
        const auto& d = *r.direction;
        p["direction"] = {{"theta", d.theta},   {"lambda_e", d.lambda_e}, {"used_odd_map", d.used_odd_map},
                          {"zero_theta", opt(d.zero_theta)}, {"thetas", d.thetas}, {"lambdas", d.lambdas}};
    } else {
        p["direction"] = nullptr;
    }
    if (r.verdict) {
        const auto& v = *r.verdict;
        p["verdict"] = {{"classification", v.classification},
                        {"axis_theta", opt(v.axis_theta)},
                        {"tolerance", v.tolerance},
                        {"max_monotonicity_violation", v.max_monotonicity_violation},
                        {"thetas", v.thetas},
                        {"statuses", v.statuses},
                        {"cap_lambdas", v.cap_lambdas},
                        {"angular_derivative_single_signed",
                         v.angular_derivative_single_signed ? ojson(*v.angular_derivative_single_signed) : ojson(nullptr)},
                        {"note", v.note}};
    } else {
        p["verdict"] = nullptr;
    }
    p["checklist"] = ojson::array();
    for (const auto& c : r.checklist)
        p["checklist"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    p["note"] = r.note;
    return p;
}

void emit(std::string& out, const ojson& j, int indent) {
    const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
    switch (j.type()) {
        case ojson::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "report contains a non-finite number");
            out += fmt17(x);
            return;
        }
        case ojson::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // short numeric arrays stay on one line
            bool flat = std::all_of(j.begin(), j.end(), [](const ojson& x) { return x.is_primitive(); });
            out += flat ? "[" : "[\n";
            bool first = true;
            for (const auto& x : j) {
                if (!first) out += flat ? ", " : ",\n";
                if (!flat) out += pad;
                emit(out, x, indent + 1);
                first = false;
            }
            out += flat ? "]" : "\n" + close + "]";
            return;
        }
        case ojson::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ",\n";
                out += pad + ojson(k).dump() + ": ";
                emit(out, v, indent + 1);
                first = false;
            }
            out += "\n" + close + "}";
            return;
        }
        default: out += j.dump(); return;
    }
}

std::optional<double> read_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

Report from_payload(const nlohmann::json& p) {
    Report r;
    r.task = p.at("task").get<std::string>();
    r.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : p.at("config").items()) r.config[k] = v.get<std::string>();
    const auto& m = p.at("mesh");
    r.mesh.dimension = m.at("dimension").get<int>();
    r.mesh.vertices = m.at("vertices").get<std::size_t>();
    r.mesh.cells = m.at("cells").get<std::size_t>();
    r.mesh.free_vertices = m.at("free_vertices").get<std::size_t>();
    r.mesh.sectors = m.at("sectors").get<int>();
    r.mesh.h = m.at("h").get<double>();
    r.mesh.measure = m.at("measure").get<double>();
    r.mesh.gamma2_measure = m.at("gamma2_measure").get<double>();
    r.mesh.fingerprint = m.at("fingerprint").get<std::string>();
    r.shift = read_opt(p.at("shift"));
    r.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
    r.residuals = p.at("residuals").get<std::vector<double>>();
    r.residual_tolerance = p.at("residual_tolerance").get<double>();
    if (!p.at("morse_index").is_null()) r.morse_index = p.at("morse_index").get<int>();
    r.tol_zero = read_opt(p.at("tol_zero"));
    for (const auto& c : p.at("constants")) r.constants.push_back({c.at("name"), c.at("value").get<double>()});
    if (const auto& s = p.at("solve"); !s.is_null())
        r.solve = SolveSummary{s.at("converged"), s.at("iterations"), s.at("residual_norm").get<double>(),
                               s.at("tolerance").get<double>(), s.at("max_abs").get<double>()};
    if (const auto& d = p.at("direction"); !d.is_null()) {
        DirectionSummary ds;
        ds.theta = d.at("theta").get<double>();
        ds.lambda_e = d.at("lambda_e").get<double>();
        ds.used_odd_map = d.at("used_odd_map");
        ds.zero_theta = read_opt(d.at("zero_theta"));
        ds.thetas = d.at("thetas").get<std::vector<double>>();
        ds.lambdas = d.at("lambdas").get<std::vector<double>>();
        r.direction = ds;
    }
    if (const auto& v = p.at("verdict"); !v.is_null()) {
        VerdictSummary vs;
        vs.classification = v.at("classification");
        vs.axis_theta = read_opt(v.at("axis_theta"));
        vs.tolerance = v.at("tolerance").get<double>();
        vs.max_monotonicity_violation = v.at("max_monotonicity_violation").get<double>();
        vs.thetas = v.at("thetas").get<std::vector<double>>();
        vs.statuses = v.at("statuses").get<std::vector<std::string>>();
        vs.cap_lambdas = v.at("cap_lambdas").get<std::vector<double>>();
        if (!v.at("angular_derivative_single_signed").is_null())
            vs.angular_derivative_single_signed = v.at("angular_derivative_single_signed").get<bool>();
        vs.note = v.at("note");
        r.verdict = vs;
    }
    for (const auto& c : p.at("checklist")) r.checklist.push_back({c.at("name"), c.at("passed"), c.at("detail")});
    r.note = p.at("note");
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(Task task) {
    switch (task) {
        case Task::Eig: return "eig";
        case Task::Morse: return "morse";
        case Task::Poincare: return "poincare";
        case Task::Solve: return "solve";
        case Task::Symmetry: return "symmetry";
        case Task::Full: return "full";
    }
    return "unknown";
}

Task parse_task(std::string_view name) {
    for (Task t : {Task::Eig, Task::Morse, Task::Poincare, Task::Solve, Task::Symmetry, Task::Full})
        if (to_string(t) == name) return t;
    throw Error(ErrorCode::ConfigError, "unknown task '" + std::string(name) + "'");
}

double PipelineConfig::tolerance(const std::string& name) const {
    if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
    return default_tolerances().at(name);
}

PipelineConfig parse_config(std::string_view text) {
    std::map<std::string, std::string> raw;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(no) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(no) + ": empty key or value");
        if (!raw.emplace(key, value).second)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(no) + ": duplicate key '" + key + "'");
    }

    PipelineConfig cfg;
    std::string kind;
    std::map<std::string, double> params;
    bool have_h = false, have_task = false;
    for (const auto& [key, value] : raw) {
        if (key != "output_dir") cfg.entries[key] = value;
        auto integer = [&](long long lo) {
            const long long x = to_integer(key, value);
            if (x < lo) throw Error(ErrorCode::ConfigError, "'" + key + "' must be at least " + std::to_string(lo));
            return static_cast<int>(x);
        };
        if (key == "domain.kind") {
            kind = value;
        } else if (key.rfind("domain.", 0) == 0) {
            params[key.substr(7)] = to_number(key, value);
        } else if (key == "mesh.h") {
            cfg.mesh_size = to_number(key, value);
            have_h = true;
        } else if (key == "task") {
            cfg.task = parse_task(value);
            have_task = true;
        } else if (key == "nonlinearity.f") {
            cfg.f = value;
        } else if (key == "nonlinearity.g") {
            cfg.g = value;
        } else if (key == "weights.c") {
            cfg.weight_c = to_number(key, value);
        } else if (key == "weights.d") {
            cfg.weight_d = to_number(key, value);
        } else if (key == "eig.k") {
            cfg.eig_k = integer(1);
        } else if (key == "poincare.M") {
            cfg.poincare_M = to_number(key, value);
        } else if (key == "solve.init") {
            if (value != "zero" && value != "random")
                throw Error(ErrorCode::ConfigError, "solve.init must be zero or random");
            cfg.init = value;
        } else if (key == "solve.init_scale") {
            cfg.init_scale = to_number(key, value);
        } else if (key == "solve.continuation") {
            cfg.continuation = integer(0);
        } else if (key == "solve.max_iter") {
            cfg.max_iter = integer(1);
        } else if (key == "symmetry.n_dirs") {
            cfg.n_dirs = integer(0);
        } else if (key == "convexity.s_min") {
            cfg.s_min = to_number(key, value);
        } else if (key == "convexity.s_max") {
            cfg.s_max = to_number(key, value);
        } else if (key == "convexity.samples") {
            cfg.convexity_samples = integer(3);
        } else if (key.rfind("tolerances.", 0) == 0) {
            const std::string name = key.substr(11);
            if (!default_tolerances().count(name)) throw Error(ErrorCode::ConfigError, "unknown tolerance '" + name + "'");
            const double x = to_number(key, value);
            if (!(x > 0.0)) throw Error(ErrorCode::ConfigError, "tolerance '" + name + "' must be positive");
            cfg.tolerances[name] = x;
        } else if (key == "seed") {
            std::uint64_t s = 0;
            const auto* end = value.data() + value.size();
            const auto res = std::from_chars(value.data(), end, s);
            if (res.ec != std::errc() || res.ptr != end)
                throw Error(ErrorCode::ConfigError, "seed must be a nonnegative integer");
            cfg.seed = s;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
        }
    }
    if (kind.empty()) throw Error(ErrorCode::ConfigError, "missing domain.kind");
    if (!have_h) throw Error(ErrorCode::ConfigError, "missing mesh.h");
    if (!have_task) throw Error(ErrorCode::ConfigError, "missing task");
    if (!(cfg.mesh_size > 0.0)) throw Error(ErrorCode::ConfigError, "mesh.h must be positive");
    if (!(cfg.poincare_M > 0.0)) throw Error(ErrorCode::ConfigError, "poincare.M must be positive");
    if (!(cfg.init_scale > 0.0)) throw Error(ErrorCode::ConfigError, "solve.init_scale must be positive");
    if (!(cfg.s_min < cfg.s_max)) throw Error(ErrorCode::ConfigError, "convexity.s_min must be below convexity.s_max");
    cfg.domain = build_domain(parse_domain_kind(kind), params);
    if ((cfg.task == Task::Symmetry || cfg.task == Task::Full) && cfg.domain.dimension < 2)
        throw Error(ErrorCode::ConfigError, "task " + std::string(to_string(cfg.task)) + " needs a 2D or 3D domain");
    make_nonlinearity(cfg.f, cfg.g);   // validates the names
    return cfg;
}

PipelineConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

Report run_pipeline(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Report r;
    r.task = std::string(to_string(config.task));
    r.config = config.entries;
    r.seed = config.seed;
    r.residual_tolerance = config.tolerance("residual");
    try {
        const Mesh mesh = generate_mesh(config.domain, config.mesh_size);
        r.mesh.dimension = mesh.dimension();
        r.mesh.vertices = mesh.num_vertices();
        r.mesh.cells = mesh.num_cells();
        const auto dir = mesh.dirichlet_mask();
        r.mesh.free_vertices = static_cast<std::size_t>(std::count(dir.begin(), dir.end(), false));
        r.mesh.sectors = mesh.sectors();
        r.mesh.h = mesh.mesh_size();
        r.mesh.measure = mesh.measure();
        r.mesh.gamma2_measure = mesh.gamma2_measure();
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(mesh.fingerprint()));
        r.mesh.fingerprint = hex;
        run_task(config, mesh, r);
    } catch (const Error& e) {
        throw Error(e.code(), "task " + r.task + ": " + e.what());
    }
    r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string payload_json(const Report& report) {
    std::string out;
    emit(out, payload_object(report), 0);
    return out;
}

std::string report_json(const Report& report) {
    ojson j;
    j["version"] = report.version;
    j["payload"] = payload_object(report);
    j["timing"] = {{"wall_time_seconds", report.wall_time_seconds}};
    std::string out;
    emit(out, j, 0);
    return out + "\n";
}

Report parse_report(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        const std::string version = j.at("version").get<std::string>();
        if (version.substr(0, version.find('.')) != "1")
            throw Error(ErrorCode::ConfigError, "unsupported report version " + version);
        Report r = from_payload(j.at("payload"));
        r.version = version;
        if (j.contains("timing")) r.wall_time_seconds = j["timing"].at("wall_time_seconds").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("malformed report: ") + e.what());
    }
}

Report load_report(const std::string& path) { return parse_report(read_file(path)); }

std::string report_csv(const Report& report) {
    std::string out = "quantity,index,value\n";
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
        out += "eigenvalue," + std::to_string(i + 1) + "," + fmt17(report.eigenvalues[i]) + "\n";
    for (const auto& c : report.constants) out += c.name + ",1," + fmt17(c.value) + "\n";
    return out;
}

std::string export_report(const Report& report, ReportFormat format, const std::string& output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create '" + output_dir + "': " + ec.message());
    const bool json = format == ReportFormat::Json;
    const std::string path = (std::filesystem::path(output_dir) / (json ? "report.json" : "report.csv")).string();
    write_file(path, json ? report_json(report) : report_csv(report));
    return path;
}

std::vector<std::string> verify_report(const Report& r) {
    std::vector<std::string> bad;
    if (r.version.substr(0, r.version.find('.')) != "1") bad.push_back("unsupported version " + r.version);
    try {
        payload_json(r);
    } catch (const Error&) {
        bad.push_back("non-finite number in the payload");
    }
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i)
        if (r.eigenvalues[i] < r.eigenvalues[i - 1]) bad.push_back("eigenvalues not ascending at " + std::to_string(i + 1));
    if (r.residuals.size() != r.eigenvalues.size()) bad.push_back("residual count differs from eigenvalue count");
    for (std::size_t i = 0; i < r.residuals.size(); ++i)
        if (!(r.residuals[i] <= r.residual_tolerance))
            bad.push_back("residual " + std::to_string(i + 1) + " = " + fmt6(r.residuals[i]) + " exceeds " +
                          fmt6(r.residual_tolerance));
    if (r.morse_index) {
        if (!r.tol_zero) {
            bad.push_back("Morse index without tol_zero");
        } else {
            int count = 0;
            for (double l : r.eigenvalues) {
                if (l < -*r.tol_zero) ++count;
                if (std::abs(l) <= *r.tol_zero) bad.push_back("eigenvalue " + fmt6(l) + " inside the zero band");
            }
            if (count != *r.morse_index) bad.push_back("stored Morse index differs from the stored eigenvalues");
        }
    }
    if (r.solve && r.solve->converged && !(r.solve->residual_norm <= r.solve->tolerance))
        bad.push_back("converged solve with residual above its tolerance");
    for (const auto& c : r.checklist) {
        if (c.name == "morse_index_at_most_n_minus_1" && r.morse_index &&
            c.passed != (*r.morse_index <= r.mesh.dimension - 1))
            bad.push_back("checklist entry for mu <= N - 1 contradicts the Morse index");
        if (c.name == "verdict_not_asymmetric" && r.verdict && c.passed != (r.verdict->classification != "asymmetric"))
            bad.push_back("checklist entry for the verdict contradicts the classification");
    }
    if (r.verdict) {
        const auto& v = r.verdict->classification;
        if (v != "sectionally_radial" && v != "foliated_schwarz" && v != "asymmetric" && v != "inconclusive")
            bad.push_back("unknown classification " + v);
    }
    return bad;
}

int exit_code(ErrorCode code) {
    switch (category(code)) {
        case ErrorCategory::Validation: return 1;
        case ErrorCategory::Numerical: return 2;
        case ErrorCategory::Io: return 3;
    }
    return 2;
}

}  // namespace mixsym
