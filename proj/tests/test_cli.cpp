// Drives the installed binary end to end: exit codes, report JSON, CSV
// shape, environment-variable flags, and deterministic output. The binary
// path and fixture directory arrive through BUNDLEALG_CLI_BIN and
// BUNDLEALG_FIXTURES (ctest sets both).
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "bundlealg/json_io.hpp"
#include "bundlealg/rng.hpp"

using namespace bundlealg;
using bundlealg::io::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& cli_bin() {
    static const std::string bin = [] {
        const char* v = std::getenv("BUNDLEALG_CLI_BIN");
        REQUIRE_MESSAGE(v != nullptr, "BUNDLEALG_CLI_BIN must point at the binary");
        return std::string(v);
    }();
    return bin;
}

const fs::path& fixture_dir() {
    static const fs::path dir = [] {
        const char* v = std::getenv("BUNDLEALG_FIXTURES");
        REQUIRE_MESSAGE(v != nullptr, "BUNDLEALG_FIXTURES must point at tests/fixtures");
        return fs::path(v);
    }();
    return dir;
}

std::string fixture(const char* name) { return (fixture_dir() / name).string(); }

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "bundlealg_cli_work";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// `env_prefix` is prepended verbatim, e.g. "BUNDLEALG_MODE=strict ".
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path out = work_dir() / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = work_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = env_prefix + "\"" + cli_bin() + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

// Deterministic inputs generated once per process.
struct Generated {
    std::string section_good;
    std::string section_bad_k;
    std::string section_norm;  // constant diagonal (2, 3): sup norm 3
    std::string tuple_a;
    std::string tuple_b_equiv;
    std::string tuple_c_inequiv;
    std::string bundle_r15;
    std::string bundle_r30;
};

const Generated& generated() {
    static const Generated g = [] {
        Generated out;
        const fs::path d = work_dir();

        Rng rng(11);
        const auto b = make_bundle(random_unitary(2, rng), 2.0);
        const Section good = random_section(b, 2, 11);
        out.section_good = (d / "section_good.json").string();
        io::save_json_file(out.section_good, io::section_to_json(good));

        json corrupted = io::section_to_json(good);
        const double k01 = corrupted["entries"][0][1]["K"].get<double>();
        corrupted["entries"][0][1]["K"] = k01 + 0.3;
        out.section_bad_k = (d / "section_bad_k.json").string();
        io::save_json_file(out.section_bad_k, corrupted);

        Vector diag(2);
        diag << cplx(2, 0), cplx(3, 0);
        out.section_norm = (d / "section_norm.json").string();
        io::save_json_file(out.section_norm, io::section_to_json(family_d(b, diag)));

        Rng trng(12);
        const Matrix u = random_unitary(2, trng);
        Vector d1(2), d2(2);
        d1 << trng.unimodular(), trng.unimodular();
        d2 << trng.unimodular(), trng.unimodular();
        CommutingTuple ta{{u * Matrix(d1.asDiagonal()) * u.adjoint(),
                           u * Matrix(d2.asDiagonal()) * u.adjoint()}};
        const Matrix w = random_unitary(2, trng);
        CommutingTuple tb;
        for (const Matrix& gen : ta.generators)
            tb.generators.push_back(w * (trng.unimodular() * gen) * w.adjoint());
        const Matrix id = Matrix::Identity(2, 2);
        Matrix dz = id;
        dz(1, 1) = cplx(-1, 0);
        CommutingTuple tc{{dz, id}};  // vs ta: different joint multiplicity pattern

        out.tuple_a = (d / "tuple_a.json").string();
        out.tuple_b_equiv = (d / "tuple_b.json").string();
        out.tuple_c_inequiv = (d / "tuple_c.json").string();
        io::save_json_file(out.tuple_a, io::tuple_to_json(ta));
        io::save_json_file(out.tuple_b_equiv, io::tuple_to_json(tb));
        io::save_json_file(out.tuple_c_inequiv, io::tuple_to_json(tc));

        Rng brng(13);
        const Matrix bm = random_unitary(2, brng);
        out.bundle_r15 = (d / "bundle_r15.json").string();
        out.bundle_r30 = (d / "bundle_r30.json").string();
        io::save_json_file(out.bundle_r15, io::bundle_to_json(*make_bundle(bm, 1.5)));
        io::save_json_file(out.bundle_r30, io::bundle_to_json(*make_bundle(bm, 3.0)));
        return out;
    }();
    return g;
}

} // namespace

TEST_CASE("classify: equivalent pair exits 0 with a full report") {
    const auto r = run_cli("classify --a \"" + fixture("id2.json") + "\" --b \"" +
                           fixture("id2.json") + "\" --grid 64");
    CHECK(r.exit_code == 0);
    const auto rep = io::classification_from_json(json::parse(r.out));
    CHECK(rep.equivalence.verdict == Verdict::equivalent);
    CHECK_FALSE(rep.strict_mode);
    REQUIRE_FALSE(rep.isometry_deviation.empty());
    for (double dev : rep.isometry_deviation) CHECK(dev <= 1e-8);
    CHECK(rep.center_residual <= 1e-9);
    CHECK(rep.mapped_concomitant_residual <= 1e-9);
}

TEST_CASE("classify: multiplicity mismatch exits 3 with a certificate") {
    const auto r = run_cli("classify --a \"" + fixture("id2.json") + "\" --b \"" +
                           fixture("d1m1.json") + "\" --grid 64");
    CHECK(r.exit_code == 3);
    const json j = json::parse(r.out);
    CHECK(j["equivalence"]["verdict"] == "not_equivalent");
    CHECK_FALSE(j.contains("residuals"));
    CHECK(j["equivalence"]["invariantB"][1].get<double>() ==
          doctest::Approx(3.14159265358979).epsilon(1e-9));
}

TEST_CASE("classify: mode flag and its environment fallback") {
    const std::string pair = "--a \"" + fixture("d1m1.json") + "\" --b \"" +
                             fixture("dIm.json") + "\" --grid 64";
    const auto pu = run_cli("classify " + pair);
    CHECK(pu.exit_code == 0);
    const json j = json::parse(pu.out);
    // V = I conjugates diag(1,-1) onto -i * diag(i,-i).
    CHECK(j["equivalence"]["lambda"][0].get<double>() == doctest::Approx(0.0));
    CHECK(j["equivalence"]["lambda"][1].get<double>() == doctest::Approx(-1.0));

    CHECK(run_cli("classify " + pair + " --mode strict").exit_code == 3);
    CHECK(run_cli("classify " + pair, "BUNDLEALG_MODE=strict ").exit_code == 3);
}

TEST_CASE("classify: input failures exit 1") {
    CHECK(run_cli("classify --a \"" + fixture("bad.json") + "\" --b \"" +
                  fixture("id2.json") + "\"")
              .exit_code == 1);
    CHECK(run_cli("classify --a /nonexistent/x.json --b \"" + fixture("id2.json") + "\"")
              .exit_code == 1);
    // Unitarity validation at the default tolerance.
    const auto rough = run_cli("classify --a \"" + fixture("rough.json") + "\" --b \"" +
                               fixture("rough.json") + "\"");
    CHECK(rough.exit_code == 1);
    // Conflicting stored radii need an explicit choice.
    const auto conflict = run_cli("classify --a \"" + generated().bundle_r15 + "\" --b \"" +
                                  generated().bundle_r30 + "\" --grid 64");
    CHECK(conflict.exit_code == 1);
    CHECK(conflict.err.find("r1") != std::string::npos);
    CHECK(run_cli("classify --a \"" + generated().bundle_r15 + "\" --b \"" +
                  generated().bundle_r30 + "\" --grid 64 --r1 2.0")
              .exit_code == 0);
}

TEST_CASE("classify: numerical breakdown past validation exits 2") {
    const auto r = run_cli("classify --a \"" + fixture("rough.json") + "\" --b \"" +
                           fixture("rough.json") + "\" --tol-unitarity 0.1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("numerical") != std::string::npos);
}

TEST_CASE("classify-tuple: verdict drives the exit code") {
    const auto eq = run_cli("classify-tuple --a \"" + generated().tuple_a + "\" --b \"" +
                            generated().tuple_b_equiv + "\"");
    CHECK(eq.exit_code == 0);
    const auto rep = io::tuple_report_from_json(json::parse(eq.out));
    CHECK(rep.verdict == Verdict::equivalent);
    CHECK(rep.lambdas.size() == 2);
    CHECK(rep.residual <= 1e-8);
    REQUIRE(rep.witness.has_value());

    const auto neq = run_cli("classify-tuple --a \"" + generated().tuple_a + "\" --b \"" +
                             generated().tuple_c_inequiv + "\"");
    CHECK(neq.exit_code == 3);
    CHECK(json::parse(neq.out)["verdict"] == "not_equivalent");
}

TEST_CASE("verify: a stored section passes, a corrupted exponent fails") {
    const auto good = run_cli("verify --section \"" + generated().section_good + "\"");
    CHECK(good.exit_code == 0);
    const auto rep = io::verify_report_from_json(json::parse(good.out));
    CHECK(rep.pass);
    CHECK(rep.winding == 1);
    CHECK(rep.concomitant_residual <= 1e-9);
    CHECK(rep.multiplier_residual <= 1e-9);
    CHECK(rep.chart_residual <= 1e-9);

    const auto bad = run_cli("verify --section \"" + generated().section_bad_k + "\"");
    CHECK(bad.exit_code == 3);
    const auto brep = io::verify_report_from_json(json::parse(bad.out));
    CHECK_FALSE(brep.pass);
    CHECK(brep.multiplier_residual > 1e-2);
    // The corruption shows up in the multiplier, not the modulus on the
    // outer boundary alone.
    CHECK(brep.winding == 1);

    CHECK(run_cli("verify --section \"" + fixture("bad.json") + "\"").exit_code == 1);
}

TEST_CASE("norm: diagonal embedding leaves the sup norm fixed") {
    const auto one = run_cli("norm --section \"" + generated().section_norm + "\" --grid 64");
    CHECK(one.exit_code == 0);
    const NormResult n1 = io::norm_result_from_json(json::parse(one.out));
    CHECK(n1.value == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(n1.converged);

    const auto two =
        run_cli("norm --section \"" + generated().section_norm + "\" --grid 64 --levels 2");
    CHECK(two.exit_code == 0);
    const NormResult n2 = io::norm_result_from_json(json::parse(two.out));
    CHECK(n2.value == doctest::Approx(n1.value).epsilon(1e-12));

    CHECK(run_cli("norm --section \"" + generated().section_norm + "\" --levels 0")
              .exit_code == 1);
}

TEST_CASE("export-grid: CSV shape and values") {
    const fs::path csv = work_dir() / "grid.csv";
    const auto r = run_cli("export-grid --section \"" + generated().section_norm +
                           "\" --nr 3 --ntheta 4 --out \"" + csv.string() + "\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    const std::string text = slurp(csv);
    CHECK(text.find('\r') == std::string::npos);

    std::istringstream lines(text);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "r,theta,opnorm,abs_f_11,abs_f_12,abs_f_21,abs_f_22");
    int rows = 0;
    bool first = true;
    while (std::getline(lines, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(fields, cell, ',')) vals.push_back(std::stod(cell));
        REQUIRE(vals.size() == 7);
        if (first) {
            CHECK(vals[0] == doctest::Approx(1.0));  // inner circle first
            CHECK(vals[1] == doctest::Approx(0.0));
            first = false;
        }
        CHECK(vals[2] == doctest::Approx(3.0).epsilon(1e-12));  // constant op norm
        CHECK(vals[3] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(vals[4] == doctest::Approx(0.0));
        CHECK(vals[6] == doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK(rows == 12);
    CHECK(text.back() == '\n');
}

TEST_CASE("demo: seeded runs are byte-identical and exit by verdict") {
    const std::string args = "demo --seed 7 --n 2 --grid 64";
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);

    const auto rep = io::demo_report_from_json(json::parse(first.out));
    CHECK(rep.seed == 7);
    CHECK(rep.mode == "both");
    CHECK(rep.exit_code == 0);
    REQUIRE(rep.equivalent_case.has_value());
    REQUIRE(rep.inequivalent_case.has_value());
    CHECK(rep.equivalent_case->equivalence.verdict == Verdict::equivalent);
    CHECK(rep.inequivalent_case->equivalence.verdict == Verdict::not_equivalent);

    CHECK(run_cli("demo --seed 7 --n 2 --grid 64 --case eq").exit_code == 0);
    CHECK(run_cli("demo --seed 7 --n 2 --grid 64 --case neq").exit_code == 3);

    // --out carries the same bytes as stdout.
    const fs::path out = work_dir() / "demo.json";
    const auto filed = run_cli(args + " --out \"" + out.string() + "\"");
    CHECK(filed.exit_code == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(out) == first.out);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("classify --a only-one.json").exit_code == 1);
    CHECK(run_cli("classify --a x --b y --mode sideways").exit_code == 1);
}
