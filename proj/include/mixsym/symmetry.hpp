#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixsym/assembly.hpp"
#include "mixsym/semilinear.hpp"
#include "mixsym/spectral.hpp"

namespace mixsym {

/// Omega(e) = {x . e > 0} with its boundary pieces and the reflection sigma_e.
struct CapDecomposition {
    std::uint64_t mesh_fingerprint = 0;
    Point direction{};
    std::vector<int> cap_vertices;          // x . e > 0
    std::vector<int> hyperplane_vertices;   // on T(e)
    std::vector<int> cap_cells;
    std::vector<int> gamma1_facets;         // tag-1 facets inside the cap
    std::vector<int> gamma2_facets;         // tag-2 facets inside the cap
    std::vector<int> free_vertices;         // cap vertices off Gamma_1(e) and T(e)
    ReflectionMap reflection;
};

/// Exact node classification (|x . e| <= 1e-12 * scale lies on T(e)). In 1D
/// the section x' is empty and so is every cap. Throws AsymmetricMesh when
/// the mesh is not mirror symmetric for e or a cell crosses T(e), and
/// ConfigError for a direction that is not a unit vector with e_N = 0.
CapDecomposition cap_restrict(const Mesh& mesh, const Point& e);

/// u o sigma_e.
ScalarField reflect_field(const ScalarField& u, const CapDecomposition& cap);

struct CapEigenpair {
    double lambda = 0.0;
    ScalarField phi;   // zero outside the cap, positive inside, unit product norm
};

/// First eigenpair of the bundle's pencil restricted to fields supported in
/// the cap (Dirichlet on Gamma_1(e) and T(e)). Throws EmptyCap.
CapEigenpair cap_eigenvalue(const OperatorBundle& bundle, const CapDecomposition& cap);

enum class ReflectionStatus { Leq, Geq, Equal, Neither };
std::string_view to_string(ReflectionStatus s);

struct ReflectionComparison {
    ReflectionStatus status = ReflectionStatus::Equal;
    double max_difference = 0.0;   // max of u - u o sigma_e over cap vertices
    double min_difference = 0.0;
    double tolerance = 0.0;
};

/// Compares u with u o sigma_e on the cap vertices, tolerance
/// tolerance_factor * max |u|.
ReflectionComparison reflection_inequality(const ScalarField& u, const CapDecomposition& cap,
                                           double tolerance_factor = 1e-9);

/// Direction with polar angle theta (mesh dimension aware).
Point cap_direction(const Mesh& mesh, double theta);

struct DirectionSample {
    double theta = 0.0;
    Point e{};
    double lambda = 0.0;   // first cap eigenvalue
    double h = 0.0;        // Borsuk-Ulam map value (0 when not evaluated)
};

struct DirectionSearch {
    Point e{};
    double theta = 0.0;
    double lambda_e = 0.0;
    int morse_index = 0;
    double tol_zero = 0.0;
    std::vector<DirectionSample> profile;   // every scanned direction on the full circle, by angle
    bool used_odd_map = false;
    std::optional<double> zero_theta;       // located zero of the odd map
    double oddness_error = 0.0;             // max |h(e) + h(-e)|
};

/// Scans n_dirs equispaced directions on the half circle (each with its
/// opposite; n_dirs = 0 scans every sector direction) and returns a
/// direction with lambda_1^e >= -tol_zero: the first by angle when the Morse
/// index is at most 1, otherwise the passing direction closest to the zero of
/// h(e) = (psi^e, w_2). Throws HypothesisFailed when the Morse index exceeds
/// N - 1, NotFound with the profile when nothing passes, StepNotCommensurate
/// when n_dirs does not divide the sector grid.
DirectionSearch find_nonnegative_direction(const Mesh& mesh, const OperatorBundle& linearization,
                                           const Spectrum& spectrum, int n_dirs);

/// Linearizes at u and computes the Morse spectrum first.
DirectionSearch find_nonnegative_direction(const Mesh& mesh, const ScalarField& u, const NonlinearityPair& nl,
                                           int n_dirs, std::uint64_t seed = 0);

enum class RotatingStatus { SymmetricAxisFound, DiscreteGap, NotApplicable };
std::string_view to_string(RotatingStatus s);

struct RotatingPlaneResult {
    double theta1 = 0.0;             // angle where equality or failure was met
    double last_strict = 0.0;        // last angle with a strict `leq`
    RotatingStatus status = RotatingStatus::NotApplicable;
    std::vector<std::pair<double, ReflectionStatus>> path;
};

/// Rotates the plane from theta0 in steps of angular_step while
/// u <= u o sigma_e holds strictly on the cap. Throws StepNotCommensurate
/// unless theta0 and the step are multiples of the sector angle.
RotatingPlaneResult rotating_plane(const Mesh& mesh, const ScalarField& u, double theta0, double angular_step);

/// Central difference of u in the angular index on every ring of nodes with
/// equal (r, x_N); zero on the axis. Throws UnstructuredMesh for meshes
/// without at least 4 sectors.
ScalarField angular_derivative(const Mesh& mesh, const ScalarField& u);

enum class SymmetryClass { SectionallyRadial, FoliatedSchwarz, Asymmetric, Inconclusive };
std::string_view to_string(SymmetryClass c);

struct DirectionEvidence {
    double theta = 0.0;
    Point e{};
    ReflectionStatus status = ReflectionStatus::Equal;
    std::optional<double> cap_lambda;
};

struct SymmetryVerdict {
    SymmetryClass classification = SymmetryClass::Inconclusive;
    std::optional<Point> axis;
    std::optional<double> axis_theta;
    std::vector<DirectionEvidence> evidence;   // half circle, by angle
    std::optional<bool> angular_monotone;
    double tolerance = 0.0;
    double max_monotonicity_violation = 0.0;
    /// Sign of du/dtheta on the open cap of an `equal` direction.
    std::optional<bool> angular_derivative_single_signed;
    std::string note;
};

/// Reflection comparisons over n_dirs half-circle directions (0 = all sector
/// directions), axis estimation, and the ring-wise monotonicity test in the
/// angular distance from the axis. Cap eigenvalues are added to the evidence
/// when a linearization is supplied. Throws UnstructuredMesh.
SymmetryVerdict foliated_schwarz_check(const Mesh& mesh, const ScalarField& u, int n_dirs,
                                       const OperatorBundle* linearization = nullptr);

}  // namespace mixsym
