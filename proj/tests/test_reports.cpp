#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "mixsym/reports.hpp"
#include "oracles.hpp"

using namespace mixsym;

namespace {

const char* kInterval = R"(
# interval analog
domain.kind = interval1d
domain.L = 1
mesh.h = 0.015625
task = eig
eig.k = 3
)";

const char* kHalfDisc = R"(
domain.kind = half_disc2d
domain.R = 1
mesh.h = 0.2
task = full
nonlinearity.f = poly:c0=1,c2=1
nonlinearity.g = poly:c0=0.5,c2=0.5
seed = 5
)";

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoFailure;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("mixsym_reports_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const PipelineConfig c = parse_config(kInterval);
    CHECK(c.task == Task::Eig);
    CHECK(c.eig_k == 3);
    CHECK(c.seed == 0);
    CHECK(c.mesh_size == 0.015625);
    CHECK(c.domain.dimension == 1);
    CHECK(c.tolerance("newton") == 1e-10);
    CHECK(c.entries.at("domain.kind") == "interval1d");

    const std::string base = "domain.kind = rectangle2d\ndomain.Lx = 1\ndomain.Ly = 1\nmesh.h = 0.25\n";
    CHECK(parse_config(base + "task = morse\nweights.c = -3\n").weight_c == -3.0);
    CHECK(parse_config(base + "task = eig\noutput_dir = /tmp/x\n").entries.count("output_dir") == 0);
    CHECK(code_of([&] { parse_config(base); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\ncolour = red\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\ntask = morse\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\neig.k = 2.5\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\ntolerances.newton = 0\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\ntolerances.foo = 1\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = dance\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = solve\nnonlinearity.f = cube\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task = eig\nseed = -1\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config(base + "task eig\n"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_config("domain.kind = half_ball\nmesh.h = 0.5\ntask = eig\n"); }) ==
          ErrorCode::MissingParam);
    CHECK(code_of([&] { parse_config("domain.kind = interval1d\ndomain.L = 1\nmesh.h = 0.5\ntask = full\n"); }) ==
          ErrorCode::ConfigError);
}

TEST_CASE("eig task on the interval") {
    const Report r = run_pipeline(parse_config(kInterval));
    REQUIRE(r.eigenvalues.size() == 3);
    const double s = oracle::interval_root();
    CHECK(r.eigenvalues[0] == doctest::Approx(s * s).epsilon(1e-4));
    CHECK(r.eigenvalues[0] == doctest::Approx(0.7402).epsilon(1e-4));
    CHECK(r.mesh.vertices == 65);
    CHECK(verify_report(r).empty());
}

TEST_CASE("morse task") {
    const std::string base = "domain.kind = rectangle2d\ndomain.Lx = 1\ndomain.Ly = 1\nmesh.h = 0.125\ntask = morse\n";
    CHECK(run_pipeline(parse_config(base)).morse_index == 0);
    const Report r = run_pipeline(parse_config(base + "weights.c = -12\nweights.d = -12\n"));
    REQUIRE(r.morse_index.has_value());
    int below = 0;
    for (double l : r.eigenvalues) below += l < 0;
    CHECK(*r.morse_index == below);
    CHECK(*r.morse_index >= 1);
}

TEST_CASE("full task emits the checklist") {
    const Report r = run_pipeline(parse_config(kHalfDisc));
    std::vector<std::string> names;
    for (const auto& c : r.checklist) {
        names.push_back(c.name);
        CHECK(c.passed);
    }
    CHECK(names == std::vector<std::string>{"convexity", "newton_converged", "morse_index",
                                            "morse_index_at_most_n_minus_1", "nonnegative_direction",
                                            "verdict_not_asymmetric"});
    CHECK(!r.note.empty());
    REQUIRE(r.verdict.has_value());
    CHECK(r.verdict->classification != "asymmetric");
    CHECK(verify_report(r).empty());

    // an affine f fails the gate but the rest of the chain still runs
    std::string affine = kHalfDisc;
    affine.replace(affine.find("poly:c0=1,c2=1"), 14, "const:a=1");
    const Report a = run_pipeline(parse_config(affine));
    CHECK_FALSE(a.checklist.front().passed);
    CHECK(a.verdict.has_value());
}

TEST_CASE("failing solve is a numerical error with task context") {
    const std::string cfg =
        "domain.kind = rectangle2d\ndomain.Lx = 1\ndomain.Ly = 1\nmesh.h = 0.125\ntask = solve\n"
        "nonlinearity.f = exp:a=40\nsolve.max_iter = 10\n";
    try {
        run_pipeline(parse_config(cfg));
        FAIL("expected NotConverged");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotConverged);
        CHECK(std::string(e.what()).find("task solve") != std::string::npos);
        CHECK(exit_code(e.code()) == 2);
    }
    CHECK(exit_code(ErrorCode::ConfigError) == 1);
    CHECK(exit_code(ErrorCode::IoFailure) == 3);
}

TEST_CASE("determinism and lossless JSON") {
    const PipelineConfig cfg = parse_config(kHalfDisc);
    const Report a = run_pipeline(cfg), b = run_pipeline(cfg);
    CHECK(payload_json(a) == payload_json(b));

    const std::string text = report_json(a);
    const Report back = parse_report(text);
    CHECK(payload_json(back) == payload_json(a));
    CHECK(back.wall_time_seconds == a.wall_time_seconds);
    REQUIRE(back.eigenvalues.size() == a.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) CHECK(back.eigenvalues[i] == a.eigenvalues[i]);

    std::string v2 = text;
    v2.replace(v2.find("1.0.0"), 5, "2.0.0");
    CHECK(code_of([&] { parse_report(v2); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_report("{\"version\": \"1.0.0\"}"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { parse_report("not json"); }) == ErrorCode::ConfigError);
    CHECK(parse_report(std::string(text).replace(text.find("1.0.0"), 5, "1.4.2")).version == "1.4.2");

    Report bad = a;
    bad.eigenvalues[0] = std::nan("");
    CHECK(code_of([&] { payload_json(bad); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("empty spectrum, CSV and export") {
    const Report r = run_pipeline(parse_config(
        "domain.kind = rectangle2d\ndomain.Lx = 1\ndomain.Ly = 1\nmesh.h = 0.125\ntask = poincare\n"));
    CHECK(r.eigenvalues.empty());
    const auto j = nlohmann::json::parse(report_json(r));
    CHECK(j["payload"]["eigenvalues"].is_array());
    CHECK(j["payload"]["eigenvalues"].empty());
    REQUIRE(r.constants.size() == 3);
    CHECK(r.constants[2].name == "small_domain_delta");

    const std::string csv = report_csv(r);
    CHECK(csv.rfind("quantity,index,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);

    const Report e = run_pipeline(parse_config(kInterval));
    const std::string ecsv = report_csv(e);
    CHECK(std::count(ecsv.begin(), ecsv.end(), '\n') == 1 + static_cast<long>(e.eigenvalues.size()));

    const auto dir = scratch("export");
    const std::string path = export_report(e, ReportFormat::Json, dir.string());
    CHECK(payload_json(load_report(path)) == payload_json(e));
    const std::string cpath = export_report(e, ReportFormat::Csv, dir.string());
    std::ifstream in(cpath);
    std::string header;
    std::getline(in, header);
    CHECK(header == "quantity,index,value");

    // a regular file where a directory is expected
    const std::string blocked = (dir / "report.json" / "sub").string();
    CHECK(code_of([&] { export_report(e, ReportFormat::Json, blocked); }) == ErrorCode::IoFailure);
    CHECK(code_of([&] { load_report((dir / "missing.json").string()); }) == ErrorCode::IoFailure);
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify catches tampered reports") {
    const Report r = run_pipeline(parse_config(kHalfDisc));
    REQUIRE(verify_report(r).empty());

    Report a = r;
    a.morse_index = 1;
    CHECK(!verify_report(a).empty());

    Report b = r;
    b.residuals[0] = 1.0;
    CHECK(!verify_report(b).empty());

    Report c = r;
    std::swap(c.eigenvalues[0], c.eigenvalues[1]);
    CHECK(!verify_report(c).empty());

    Report d = r;
    d.verdict->classification = "asymmetric";
    CHECK(!verify_report(d).empty());

    Report e = r;
    e.solve->residual_norm = 1.0;
    CHECK(!verify_report(e).empty());
}
