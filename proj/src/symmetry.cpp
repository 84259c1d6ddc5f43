#include "mixsym/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "mixsym/eigensolver.hpp"
#include "mixsym/errors.hpp"

namespace mixsym {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double wrap(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    return t;
}

double circular_distance(double a, double b) {
    const double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, kTwoPi - d);
}

double sector_angle(const Mesh& mesh) {
    if (mesh.sectors() < 2) throw Error(ErrorCode::UnstructuredMesh, "mesh has no angular sector structure");
    return kTwoPi / mesh.sectors();
}

/// Integer k with theta = k * step, or throws.
long long commensurate(double theta, double step, const char* what) {
    const double k = theta / step;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 * std::max(1.0, std::abs(k)))
        throw Error(ErrorCode::StepNotCommensurate, std::string(what) + " is not a multiple of the sector angle");
    return static_cast<long long>(r);
}

/// Half-circle scan angles: every `stride`-th sector direction in [0, pi).
std::vector<double> half_circle(const Mesh& mesh, int n_dirs) {
    const double step = sector_angle(mesh);
    const int half = mesh.sectors() / 2;
    int stride = 1;
    if (n_dirs > 0) {
        if (half % n_dirs != 0)
            throw Error(ErrorCode::StepNotCommensurate, std::to_string(n_dirs) + " directions do not divide the " +
                                                            std::to_string(half) + " half-circle sector directions");
        stride = half / n_dirs;
    } else if (n_dirs < 0) {
        throw Error(ErrorCode::ConfigError, "n_dirs must be nonnegative");
    }
    std::vector<double> out;
    for (int k = 0; k < half; k += stride) out.push_back(k * step);
    return out;
}

struct Ring {
    std::vector<int> nodes;       // sorted by angle
    std::vector<double> angles;
};

struct RingSet {
    std::vector<Ring> rings;
    std::vector<int> axis_nodes;
};

/// Groups vertices into rings of equal (r, x_N). Every ring must carry one
/// node per sector.
RingSet rings_of(const Mesh& mesh) {
    if (mesh.dimension() < 2 || mesh.sectors() < 2)
        throw Error(ErrorCode::UnstructuredMesh, "rings need a rotationally structured mesh");
    const double scale = mesh.coordinate_scale();
    const double q = 1e-7 * scale;
    std::map<std::pair<long long, long long>, Ring> groups;
    RingSet out;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const Point& x = mesh.vertices()[v];
        double r, z, ang;
        if (mesh.dimension() == 2) {
            r = std::abs(x[0]);
            z = x[1];
            ang = x[0] >= 0 ? 0.0 : std::numbers::pi;
        } else {
            r = std::hypot(x[0], x[1]);
            z = x[2];
            ang = wrap(std::atan2(x[1], x[0]));
        }
        if (r <= 1e-12 * scale) {
            out.axis_nodes.push_back(static_cast<int>(v));
            continue;
        }
        auto& ring = groups[{std::llround(r / q), std::llround(z / q)}];
        ring.nodes.push_back(static_cast<int>(v));
        ring.angles.push_back(ang);
    }
    for (auto& [key, ring] : groups) {
        if (static_cast<int>(ring.nodes.size()) != mesh.sectors())
            throw Error(ErrorCode::UnstructuredMesh, "a ring carries " + std::to_string(ring.nodes.size()) +
                                                         " nodes instead of " + std::to_string(mesh.sectors()));
        std::vector<std::size_t> order(ring.nodes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ring.angles[a] < ring.angles[b]; });
        Ring sorted;
        for (auto i : order) {
            sorted.nodes.push_back(ring.nodes[i]);
            sorted.angles.push_back(ring.angles[i]);
        }
        out.rings.push_back(std::move(sorted));
    }
    return out;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void check_same_mesh(std::uint64_t a, std::uint64_t b) {
    if (a != b) throw Error(ErrorCode::MeshMismatch, "objects belong to different meshes");
}

}  // namespace

std::string_view to_string(ReflectionStatus s) {
    switch (s) {
        case ReflectionStatus::Leq: return "leq";
        case ReflectionStatus::Geq: return "geq";
        case ReflectionStatus::Equal: return "equal";
        case ReflectionStatus::Neither: return "neither";
    }
    return "unknown";
}

std::string_view to_string(RotatingStatus s) {
    switch (s) {
        case RotatingStatus::SymmetricAxisFound: return "symmetric_axis_found";
        case RotatingStatus::DiscreteGap: return "discrete_gap";
        case RotatingStatus::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

std::string_view to_string(SymmetryClass c) {
    switch (c) {
        case SymmetryClass::SectionallyRadial: return "sectionally_radial";
        case SymmetryClass::FoliatedSchwarz: return "foliated_schwarz";
        case SymmetryClass::Asymmetric: return "asymmetric";
        case SymmetryClass::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

Point cap_direction(const Mesh& mesh, double theta) { return direction_at(mesh.dimension(), theta); }

CapDecomposition cap_restrict(const Mesh& mesh, const Point& e) {
    CapDecomposition cap;
    cap.mesh_fingerprint = mesh.fingerprint();
    cap.direction = e;
    const int dim = mesh.dimension();
    if (dim == 1) {
        // no horizontal directions: every vertex is on T(e), the cap is empty
        cap.reflection.direction = e;
        cap.reflection.node_pairing.resize(mesh.num_vertices());
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            cap.reflection.node_pairing[v] = static_cast<int>(v);
            cap.hyperplane_vertices.push_back(static_cast<int>(v));
        }
        return cap;
    }
    const double len = std::sqrt(dot(e, e));
    if (std::abs(len - 1.0) > 1e-12 || std::abs(e[dim - 1]) > 1e-12 || (dim == 2 && e[2] != 0.0))
        throw Error(ErrorCode::ConfigError, "cap direction must be a unit vector orthogonal to the axis");
    cap.reflection = reflection_map(mesh, e);

    const double tol = 1e-12 * mesh.coordinate_scale();
    std::vector<int> side(mesh.num_vertices());
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const double s = dot(mesh.vertices()[v], e);
        side[v] = s > tol ? 1 : (s < -tol ? -1 : 0);
        if (side[v] == 1) cap.cap_vertices.push_back(static_cast<int>(v));
        if (side[v] == 0) cap.hyperplane_vertices.push_back(static_cast<int>(v));
    }
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        bool pos = false, neg = false;
        for (int i = 0; i <= dim; ++i) {
            pos = pos || side[mesh.cells()[c][i]] > 0;
            neg = neg || side[mesh.cells()[c][i]] < 0;
        }
        if (pos && neg) throw Error(ErrorCode::AsymmetricMesh, "cell " + std::to_string(c) + " crosses T(e)");
        if (pos) cap.cap_cells.push_back(static_cast<int>(c));
    }
    std::vector<bool> constrained(mesh.num_vertices(), false);
    for (std::size_t f = 0; f < mesh.facets().size(); ++f) {
        const auto& facet = mesh.facets()[f];
        bool pos = false;
        for (int i = 0; i < dim; ++i) pos = pos || side[facet.vertices[i]] > 0;
        if (facet.tag == 1)
            for (int i = 0; i < dim; ++i) constrained[facet.vertices[i]] = true;
        if (!pos) continue;
        (facet.tag == 2 ? cap.gamma2_facets : cap.gamma1_facets).push_back(static_cast<int>(f));
    }
    for (int v : cap.cap_vertices)
        if (!constrained[v]) cap.free_vertices.push_back(v);
    return cap;
}

ScalarField reflect_field(const ScalarField& u, const CapDecomposition& cap) {
    check_same_mesh(u.mesh_fingerprint, cap.mesh_fingerprint);
    if (u.size() != cap.reflection.node_pairing.size())
        throw Error(ErrorCode::MeshMismatch, "field length differs from the mesh");
    ScalarField out = u;
    for (std::size_t v = 0; v < u.size(); ++v)
        out.values[static_cast<Eigen::Index>(v)] = u.values[cap.reflection.node_pairing[v]];
    return out;
}

CapEigenpair cap_eigenvalue(const OperatorBundle& bundle, const CapDecomposition& cap) {
    check_same_mesh(bundle.mesh_fingerprint, cap.mesh_fingerprint);
    if (cap.free_vertices.empty()) throw Error(ErrorCode::EmptyCap, "the cap has no free vertices");
    const SparseMatrix A = restrict_matrix(bundle.form(), cap.free_vertices);
    const SparseMatrix B = restrict_matrix(bundle.product_mass(), cap.free_vertices);
    double shift = 0.0;
    if (bundle.shift) {
        shift = *bundle.shift;
    } else {
        while (!positive_definite(A + shift * B, 1e-10)) {
            shift = shift == 0.0 ? 1.0 : 2.0 * shift;
            if (shift > std::ldexp(1.0, 60)) throw Error(ErrorCode::ShiftOverflow, "cap pencil");
        }
    }
    const auto pairs = smallest_eigenpairs(A, B, shift, 1);
    Eigen::VectorXd phi = pairs.vectors.col(0);
    if (phi.sum() < 0) phi = -phi;
    CapEigenpair out;
    out.lambda = pairs.values[0];
    out.phi.mesh_fingerprint = bundle.mesh_fingerprint;
    out.phi.values = extend_by_zero(phi, cap.free_vertices, bundle.dirichlet.size());
    return out;
}

ReflectionComparison reflection_inequality(const ScalarField& u, const CapDecomposition& cap, double tolerance_factor) {
    const ScalarField r = reflect_field(u, cap);
    ReflectionComparison out;
    out.tolerance = tolerance_factor * max_abs(u.values);
    double hi = 0.0, lo = 0.0;
    for (int v : cap.cap_vertices) {
        const double d = u.values[v] - r.values[v];
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    out.max_difference = hi;
    out.min_difference = lo;
    const double tol = out.tolerance;
    if (hi <= tol && lo >= -tol)
        out.status = ReflectionStatus::Equal;
    else if (hi <= tol)
        out.status = ReflectionStatus::Leq;
    else if (lo >= -tol)
        out.status = ReflectionStatus::Geq;
    else
        out.status = ReflectionStatus::Neither;
    return out;
}

DirectionSearch find_nonnegative_direction(const Mesh& mesh, const OperatorBundle& linearization,
                                           const Spectrum& spectrum, int n_dirs) {
    check_same_mesh(mesh.fingerprint(), linearization.mesh_fingerprint);
    DirectionSearch out;
    out.morse_index = morse_index(spectrum);
    out.tol_zero = zero_tolerance(spectrum);
    const int N = mesh.dimension();
    if (out.morse_index > N - 1)
        throw Error(ErrorCode::HypothesisFailed, "Morse index " + std::to_string(out.morse_index) +
                                                     " exceeds N - 1 = " + std::to_string(N - 1));
    if (N == 1) {
        // the only candidate cap is empty
        cap_eigenvalue(linearization, cap_restrict(mesh, {0, 0, 0}));
    }
    const auto half = half_circle(mesh, n_dirs);
    std::vector<double> angles = half;
    for (double t : half) angles.push_back(t + std::numbers::pi);
    std::sort(angles.begin(), angles.end());

    std::vector<CapEigenpair> caps;
    for (double t : angles) {
        DirectionSample s;
        s.theta = t;
        s.e = cap_direction(mesh, t);
        caps.push_back(cap_eigenvalue(linearization, cap_restrict(mesh, s.e)));
        s.lambda = caps.back().lambda;
        out.profile.push_back(s);
    }
    const std::size_t n = angles.size();
    auto opposite = [&](std::size_t i) { return (i + n / 2) % n; };

    if (out.morse_index >= 2) {
        if (spectrum.size() < 2) throw Error(ErrorCode::ConfigError, "the odd map needs w_1 and w_2");
        const ScalarField& w1 = spectrum.eigenvectors[0];
        const ScalarField& w2 = spectrum.eigenvectors[1];
        out.used_odd_map = true;
        double hmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pp = caps[i].phi;
            const auto& pm = caps[opposite(i)].phi;
            const double ap = product_inner(linearization, pp, w1);
            const double am = product_inner(linearization, pm, w1);
            if (!(ap > 0.0) || !(am > 0.0))
                throw Error(ErrorCode::Inconclusive, "cap eigenfunction orthogonal to w_1; the odd map is undefined");
            ScalarField psi = pp;
            psi.values = std::sqrt(am / ap) * pp.values - std::sqrt(ap / am) * pm.values;
            out.profile[i].h = product_inner(linearization, psi, w2);
            hmax = std::max(hmax, std::abs(out.profile[i].h));
        }
        for (std::size_t i = 0; i < n; ++i)
            out.oddness_error = std::max(out.oddness_error, std::abs(out.profile[i].h + out.profile[opposite(i)].h));
        const double flat = 1e-10 * std::max(1.0, hmax);
        if (hmax <= flat) {
            out.zero_theta = 0.0;   // h vanishes identically
        } else {
            for (std::size_t i = 0; i < n && !out.zero_theta; ++i) {
                const double a = out.profile[i].h, b = out.profile[(i + 1) % n].h;
                if (std::abs(a) <= flat) {
                    out.zero_theta = angles[i];
                } else if ((a < 0) != (b < 0) && std::abs(b) > flat) {
                    const double t1 = angles[i];
                    double t2 = angles[(i + 1) % n];
                    if (t2 <= t1) t2 += kTwoPi;
                    out.zero_theta = wrap(t1 + (t2 - t1) * a / (a - b));
                }
            }
        }
    }

    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.profile[i].lambda < -out.tol_zero) continue;
        if (!pick) {
            pick = i;
            if (!out.zero_theta) break;
            continue;
        }
        if (circular_distance(angles[i], *out.zero_theta) < circular_distance(angles[*pick], *out.zero_theta) - 1e-12)
            pick = i;
    }
    if (!pick) {
        std::ostringstream msg;
        msg << "no direction with lambda_1^e >= " << -out.tol_zero << "; profile:";
        for (const auto& s : out.profile) msg << " (" << s.theta << ", " << s.lambda << ")";
        throw Error(ErrorCode::NotFound, msg.str());
    }
    out.theta = angles[*pick];
    out.e = out.profile[*pick].e;
    out.lambda_e = out.profile[*pick].lambda;
    return out;
}

DirectionSearch find_nonnegative_direction(const Mesh& mesh, const ScalarField& u, const NonlinearityPair& nl,
                                           int n_dirs, std::uint64_t seed) {
    const OperatorBundle lin = linearize(mesh, nl, u);
    const Spectrum sp = morse_spectrum(lin, seed);
    return find_nonnegative_direction(mesh, lin, sp, n_dirs);
}

RotatingPlaneResult rotating_plane(const Mesh& mesh, const ScalarField& u, double theta0, double angular_step) {
    const double sector = sector_angle(mesh);
    if (!(angular_step > 0.0)) throw Error(ErrorCode::StepNotCommensurate, "angular step must be positive");
    commensurate(angular_step, sector, "angular step");
    commensurate(theta0, sector, "start angle");

    RotatingPlaneResult out;
    auto status_at = [&](double t) {
        const auto s = reflection_inequality(u, cap_restrict(mesh, cap_direction(mesh, t))).status;
        out.path.emplace_back(t, s);
        return s;
    };
    const ReflectionStatus first = status_at(theta0);
    out.theta1 = out.last_strict = theta0;
    if (first == ReflectionStatus::Equal) {
        out.status = RotatingStatus::SymmetricAxisFound;
        return out;
    }
    if (first != ReflectionStatus::Leq) {
        out.status = RotatingStatus::NotApplicable;
        return out;
    }
    const long long steps = commensurate(std::numbers::pi, angular_step, "half turn");
    for (long long k = 1; k <= steps; ++k) {
        const double t = theta0 + k * angular_step;
        const ReflectionStatus s = status_at(t);
        out.theta1 = t;
        if (s == ReflectionStatus::Leq) {
            out.last_strict = t;
            continue;
        }
        out.status = s == ReflectionStatus::Equal ? RotatingStatus::SymmetricAxisFound : RotatingStatus::DiscreteGap;
        return out;
    }
    // at theta0 + pi the comparison is reversed, so the loop always returns
    out.status = RotatingStatus::DiscreteGap;
    return out;
}

ScalarField angular_derivative(const Mesh& mesh, const ScalarField& u) {
    check_same_mesh(mesh.fingerprint(), u.mesh_fingerprint);
    if (mesh.dimension() != 3 || mesh.sectors() < 4)
        throw Error(ErrorCode::UnstructuredMesh, "angular derivative needs at least 4 sectors");
    const RingSet rs = rings_of(mesh);
    const double dtheta = kTwoPi / mesh.sectors();
    ScalarField v = ScalarField::zeros(mesh);
    for (const auto& ring : rs.rings) {
        const std::size_t m = ring.nodes.size();
        for (std::size_t i = 0; i < m; ++i) {
            const int next = ring.nodes[(i + 1) % m], prev = ring.nodes[(i + m - 1) % m];
            v.values[ring.nodes[i]] = (u.values[next] - u.values[prev]) / (2.0 * dtheta);
        }
    }
    return v;
}

SymmetryVerdict foliated_schwarz_check(const Mesh& mesh, const ScalarField& u, int n_dirs,
                                       const OperatorBundle* linearization) {
    check_same_mesh(mesh.fingerprint(), u.mesh_fingerprint);
    const RingSet rs = rings_of(mesh);
    const auto half = half_circle(mesh, n_dirs);
    SymmetryVerdict out;
    out.tolerance = 1e-9 * max_abs(u.values);
    const double tol = out.tolerance;

    std::vector<std::pair<double, ReflectionStatus>> full;   // whole circle
    for (double t : half) {
        DirectionEvidence ev;
        ev.theta = t;
        ev.e = cap_direction(mesh, t);
        const CapDecomposition cap = cap_restrict(mesh, ev.e);
        ev.status = reflection_inequality(u, cap).status;
        if (linearization) ev.cap_lambda = cap_eigenvalue(*linearization, cap).lambda;
        out.evidence.push_back(ev);
        full.emplace_back(t, ev.status);
        ReflectionStatus flipped = ev.status;
        if (flipped == ReflectionStatus::Leq) flipped = ReflectionStatus::Geq;
        else if (flipped == ReflectionStatus::Geq) flipped = ReflectionStatus::Leq;
        full.emplace_back(t + std::numbers::pi, flipped);
    }
    std::sort(full.begin(), full.end());

    auto ring_spread = [&] {
        double spread = 0.0;
        for (const auto& ring : rs.rings) {
            double lo = u.values[ring.nodes[0]], hi = lo;
            for (int v : ring.nodes) {
                lo = std::min(lo, u.values[v]);
                hi = std::max(hi, u.values[v]);
            }
            spread = std::max(spread, hi - lo);
        }
        return spread;
    };

    if (std::any_of(full.begin(), full.end(), [](const auto& p) { return p.second == ReflectionStatus::Neither; })) {
        out.classification = SymmetryClass::Asymmetric;
        out.note = "some reflection comparison is neither leq nor geq";
        return out;
    }
    if (std::all_of(full.begin(), full.end(), [](const auto& p) { return p.second == ReflectionStatus::Equal; })) {
        const double spread = ring_spread();
        out.max_monotonicity_violation = spread;
        if (spread <= tol) {
            out.classification = SymmetryClass::SectionallyRadial;
            out.angular_monotone = true;
            out.axis_theta = 0.0;
            out.axis = cap_direction(mesh, 0.0);
        } else {
            out.classification = SymmetryClass::Inconclusive;
            out.note = "all sampled reflections are equalities but rings are not constant";
        }
        return out;
    }

    // directions whose cap is on the axis side: u >= u o sigma_e strictly
    const std::size_t n = full.size();
    std::vector<bool> geq(n);
    for (std::size_t i = 0; i < n; ++i) geq[i] = full[i].second == ReflectionStatus::Geq;
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
        if (geq[i] && !geq[(i + n - 1) % n]) {
            if (start != n) {
                out.classification = SymmetryClass::Inconclusive;
                out.note = "directions with u >= u o sigma_e do not form one arc";
                return out;
            }
            start = i;
        }
    std::size_t len = 0;
    while (len < n && geq[(start + len) % n]) ++len;
    const double t_begin = full[start].first;
    double t_end = full[(start + len - 1) % n].first;
    if (t_end < t_begin) t_end += kTwoPi;
    double axis = wrap(0.5 * (t_begin + t_end));
    // an equality direction pins the axis at right angles to it
    for (const auto& [t, s] : full) {
        if (s != ReflectionStatus::Equal) continue;
        const double c1 = wrap(t + 0.5 * std::numbers::pi), c2 = wrap(t - 0.5 * std::numbers::pi);
        axis = circular_distance(c1, axis) <= circular_distance(c2, axis) ? c1 : c2;
        break;
    }
    if (mesh.dimension() == 2) axis = std::cos(axis) >= 0 ? 0.0 : std::numbers::pi;
    out.axis_theta = axis;
    out.axis = cap_direction(mesh, axis);

    // values nonincreasing in angular distance from the axis on every ring
    double worst = 0.0;
    for (const auto& ring : rs.rings) {
        std::vector<std::pair<double, double>> dv;
        for (std::size_t i = 0; i < ring.nodes.size(); ++i)
            dv.emplace_back(circular_distance(ring.angles[i], axis), u.values[ring.nodes[i]]);
        std::sort(dv.begin(), dv.end());
        double running_min = std::numeric_limits<double>::infinity();
        std::size_t i = 0;
        while (i < dv.size()) {
            std::size_t j = i;
            double group_max = -std::numeric_limits<double>::infinity(), group_min = -group_max;
            while (j < dv.size() && dv[j].first - dv[i].first <= 1e-9) {
                group_max = std::max(group_max, dv[j].second);
                group_min = std::min(group_min, dv[j].second);
                ++j;
            }
            if (std::isfinite(running_min)) worst = std::max(worst, group_max - running_min);
            running_min = std::min(running_min, group_min);
            i = j;
        }
    }
    out.max_monotonicity_violation = worst;
    if (worst <= tol) {
        out.angular_monotone = true;
        out.classification = SymmetryClass::FoliatedSchwarz;
    } else if (worst <= 10.0 * tol) {
        out.angular_monotone = false;
        out.classification = SymmetryClass::Inconclusive;
        out.note = "angular monotonicity fails inside the tolerance band";
    } else {
        out.angular_monotone = false;
        out.classification = SymmetryClass::Asymmetric;
        out.note = "values increase with the angular distance from the axis";
    }

    // sign of the angular derivative on the open cap of an equality direction
    if (mesh.dimension() == 3 && mesh.sectors() >= 4) {
        for (const auto& ev : out.evidence) {
            if (ev.status != ReflectionStatus::Equal) continue;
            const ScalarField v = angular_derivative(mesh, u);
            const double vmax = max_abs(v.values);
            if (vmax <= tol) break;
            const double band = 1e-9 * vmax;
            bool pos = false, neg = false;
            for (int x : cap_restrict(mesh, ev.e).cap_vertices) {
                pos = pos || v.values[x] > band;
                neg = neg || v.values[x] < -band;
            }
            out.angular_derivative_single_signed = !(pos && neg);
            break;
        }
    }
    return out;
}

}  // namespace mixsym
