#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixsym/errors.hpp"
#include "mixsym/geometry.hpp"

namespace mixsym {

enum class Task { Eig, Morse, Poincare, Solve, Symmetry, Full };
std::string_view to_string(Task task);
Task parse_task(std::string_view name);

/// Flat `key = value` configuration, `#` starts a comment. Keys:
///   domain.kind, domain.<param>      geometry (see build_domain)
///   mesh.h                           target mesh size
///   task                             eig | morse | poincare | solve | symmetry | full
///   nonlinearity.f, nonlinearity.g   see parse_nonlinearity (default zero)
///   weights.c, weights.d             constant weights for eig / morse (default 0)
///   eig.k                            eigenpairs for eig (default 4)
///   poincare.M                       M in the small-domain threshold (default 1)
///   solve.init                       zero | random (default zero)
///   solve.init_scale                 amplitude of the random start (default 0.1)
///   solve.continuation               load steps, 0 = plain Newton (default 0)
///   solve.max_iter                   Newton iterations per solve (default 50)
///   symmetry.n_dirs                  half-circle directions, 0 = all (default 0)
///   convexity.s_min, .s_max, .samples  grid for the convexity gate (-10, 10, 401)
///   tolerances.newton                residual norm (default 1e-10)
///   tolerances.residual              eigenpair residual accepted by verify (default 1e-8)
///   seed, output_dir
struct PipelineConfig {
    DomainSpec domain;
    double mesh_size = 0.0;
    Task task = Task::Eig;
    std::string f = "zero", g = "zero";
    double weight_c = 0.0, weight_d = 0.0;
    int eig_k = 4;
    double poincare_M = 1.0;
    std::string init = "zero";
    double init_scale = 0.1;
    int continuation = 0;
    int max_iter = 50;
    int n_dirs = 0;
    double s_min = -10.0, s_max = 10.0;
    int convexity_samples = 401;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    /// Entries as read (output_dir excluded), echoed into the report.
    std::map<std::string, std::string> entries;

    double tolerance(const std::string& name) const;
};

/// Throws ConfigError (or the geometry validation codes) on bad input.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);

struct MeshStats {
    int dimension = 0;
    std::size_t vertices = 0, cells = 0, free_vertices = 0;
    int sectors = 0;
    double h = 0.0, measure = 0.0, gamma2_measure = 0.0;
    std::string fingerprint;   // hex
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct ChecklistItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SolveSummary {
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    double max_abs = 0.0;
};

struct DirectionSummary {
    double theta = 0.0;
    double lambda_e = 0.0;
    bool used_odd_map = false;
    std::optional<double> zero_theta;
    std::vector<double> thetas, lambdas;
};

struct VerdictSummary {
    std::string classification;
    std::optional<double> axis_theta;
    double tolerance = 0.0;
    double max_monotonicity_violation = 0.0;
    std::vector<double> thetas;
    std::vector<std::string> statuses;
    std::vector<double> cap_lambdas;
    std::optional<bool> angular_derivative_single_signed;
    std::string note;
};

struct Report {
    std::string version = "1.0.0";
    std::string task;
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    MeshStats mesh;
    std::optional<double> shift;
    std::vector<double> eigenvalues, residuals;
    double residual_tolerance = 0.0;
    std::optional<int> morse_index;
    std::optional<double> tol_zero;
    std::vector<NamedValue> constants;
    std::optional<SolveSummary> solve;
    std::optional<DirectionSummary> direction;
    std::optional<VerdictSummary> verdict;
    std::vector<ChecklistItem> checklist;
    std::string note;
    double wall_time_seconds = 0.0;   // not part of the payload
};

/// Deterministic in (config, seed) apart from wall_time_seconds. Module
/// errors are rethrown with the task name prefixed.
Report run_pipeline(const PipelineConfig& config);

/// Everything except timing, floats printed with 17 significant digits.
/// Throws NonFiniteValue.
std::string payload_json(const Report& report);
/// {"version": ..., "payload": {...}, "timing": {...}}
std::string report_json(const Report& report);
/// Throws ConfigError on malformed input or an unknown major version.
Report parse_report(std::string_view json);
Report load_report(const std::string& path);

/// Header `quantity,index,value`; one row per eigenvalue and per constant.
std::string report_csv(const Report& report);

enum class ReportFormat { Json, Csv };
/// Writes report.json or report.csv into output_dir (created if missing) and
/// returns the path. Throws IoFailure.
std::string export_report(const Report& report, ReportFormat format, const std::string& output_dir);

/// Re-checks stored invariants: finiteness, ascending eigenvalues, residuals
/// within the stored tolerance, Morse index against tol_zero, Newton residual,
/// checklist consistency. Returns the violations (empty when consistent).
std::vector<std::string> verify_report(const Report& report);

/// 1 validation, 2 numerical, 3 I/O.
int exit_code(ErrorCode code);

}  // namespace mixsym
