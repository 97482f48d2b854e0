/*
 * Command-line front end.
 *
 * Verbs: classify, classify-tuple, verify, norm, export-grid, demo.
 * Inputs are JSON (matrices, bundles, sections, tuples); reports go to
 * stdout or --out as canonical JSON, grids as CSV. Every flag can also be
 * set through the environment with the BUNDLEALG_ prefix.
 *
 * Exit codes: 0 success / equivalent, 3 not equivalent (or failed
 * verification thresholds), 1 invalid input, 2 internal numerical failure.
 */

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bundlealg/isomorphism.hpp"
#include "bundlealg/json_io.hpp"
#include "bundlealg/multidomain.hpp"
#include "bundlealg/norms.hpp"
#include "bundlealg/rng.hpp"
#include "bundlealg/sections.hpp"

namespace {

using namespace bundlealg;
using io::json;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_numerical = 2;
constexpr int exit_not_equivalent = 3;

struct CommonOpts {
    double tol = defaults::decision_tol;
    double tol_unitarity = defaults::unitarity_tol;
    std::string mode = "pu";
    std::uint64_t seed = 0;
    double r1 = 2.0;
    int levels = 3;
    int grid = 512;
    std::string out;
};

void add_output_flag(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "write the report here instead of stdout")
        ->envname("BUNDLEALG_OUT");
}

void add_tolerance_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tol", o.tol, "decision tolerance")->envname("BUNDLEALG_TOL");
    cmd->add_option("--tol-unitarity", o.tol_unitarity, "unitarity tolerance for inputs")
        ->envname("BUNDLEALG_TOL_UNITARITY");
}

void add_mode_flag(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--mode", o.mode, "pu (scalar-free conjugacy) or strict")
        ->check(CLI::IsMember({"pu", "strict"}))
        ->envname("BUNDLEALG_MODE");
}

GridSpec grid_from_samples(int samples) {
    GridSpec g;
    g.boundary_samples = samples;
    g.validate();
    return g;
}

void emit(const CommonOpts& o, const json& j) {
    if (o.out.empty()) {
        std::cout << io::dump_canonical(j);
    } else {
        io::save_json_file(o.out, j);
    }
}

// Input files hold either a bare matrix (rows of [re, im] pairs) or a full
// bundle object; a bundle's own r1 wins unless --r1 was passed explicitly.
struct LoadedMatrix {
    Matrix m;
    bool has_r1 = false;
    double r1 = 0.0;
};

LoadedMatrix load_matrix_file(const std::string& path) {
    const json j = io::load_json_file(path);
    LoadedMatrix out;
    if (j.is_array()) {
        out.m = io::matrix_from_json(j, path);
    } else if (j.is_object() && j.contains("A")) {
        out.m = io::matrix_from_json(j["A"], path + ": A");
        if (j.contains("r1")) {
            if (!j["r1"].is_number())
                throw validation_error(path + ": r1: expected a number");
            out.has_r1 = true;
            out.r1 = j["r1"].get<double>();
        }
    } else {
        throw validation_error(path + ": expected a matrix or a bundle object");
    }
    if (out.m.rows() != out.m.cols())
        throw validation_error(path + ": matrix must be square");
    return out;
}

double resolve_r1(const CommonOpts& o, bool r1_flag_given, const LoadedMatrix& a,
                  const LoadedMatrix& b) {
    if (r1_flag_given) return o.r1;
    if (a.has_r1 && b.has_r1) {
        if (std::abs(a.r1 - b.r1) > 1e-12)
            throw validation_error(
                "inputs declare different r1 values; pass --r1 to choose one");
        return a.r1;
    }
    if (a.has_r1) return a.r1;
    if (b.has_r1) return b.r1;
    return o.r1;
}

int run_classify(const CommonOpts& o, bool r1_given, const std::string& path_a,
                 const std::string& path_b) {
    const LoadedMatrix a = load_matrix_file(path_a);
    const LoadedMatrix b = load_matrix_file(path_b);

    ClassifyOptions opts;
    opts.tol = o.tol;
    opts.unitarity_tol = o.tol_unitarity;
    opts.strict = o.mode == "strict";
    opts.seed = o.seed;
    opts.levels = o.levels;
    opts.grid = grid_from_samples(o.grid);

    const ClassificationReport report =
        classify_pair(a.m, b.m, resolve_r1(o, r1_given, a, b), opts);
    emit(o, io::classification_to_json(report));
    return report.equivalence.verdict == Verdict::equivalent ? exit_ok : exit_not_equivalent;
}

int run_classify_tuple(const CommonOpts& o, const std::string& path_a,
                       const std::string& path_b) {
    const CommutingTuple a = io::tuple_from_json(io::load_json_file(path_a));
    const CommutingTuple b = io::tuple_from_json(io::load_json_file(path_b));

    DecisionOptions opts;
    opts.tol = o.tol;
    opts.strict = o.mode == "strict";
    const TupleEquivalenceReport report = tuple_pu_equivalent(a, b, opts);
    emit(o, io::tuple_report_to_json(report));
    return report.verdict == Verdict::equivalent ? exit_ok : exit_not_equivalent;
}

// Atlas consistency: values computed through overlapping charts must agree
// up to the transition action Ad(A^k), and the clockwise-to-clockwise cycle
// of transitions must wind exactly once.
struct ChartCheck {
    double residual = 0.0;
    long winding = 0;
};

ChartCheck chart_consistency(const Section& s) {
    const Annulus& ann = s.bundle->annulus();
    const auto charts = atlas(ann, 4);
    const int m = static_cast<int>(charts.size());
    const std::vector<double> radii{1.0, std::sqrt(ann.r1), ann.r1};

    ChartCheck out;
    for (int q = 0; q < m; ++q) {
        const Chart& u = charts[static_cast<std::size_t>(q)];
        const Chart& v = charts[static_cast<std::size_t>((q + 1) % m)];
        // Midpoint of the (u, v) overlap sector, as an angle u covers.
        const double mid = std::numbers::pi * (2.0 * q + 1.0) / m;
        bool winding_counted = false;
        for (double r : radii) {
            const cplx w = std::polar(r, mid);
            const long k = transition(*s.bundle, u, v, w);
            if (!winding_counted) {
                out.winding += k;
                winding_counted = true;
            }
            const Matrix fu = eval_annulus(s, w, u);
            const Matrix fv = eval_annulus(s, w, v);
            const Matrix ak = s.bundle->deck_matrix(k);
            out.residual = std::max(out.residual, operator_norm(fu - ak * fv * ak.adjoint()));
        }
    }
    return out;
}

int run_verify(const CommonOpts& o, const std::string& path, double threshold) {
    const Section s = io::section_from_json(io::load_json_file(path), o.tol_unitarity);
    const int n = s.dim();
    const Vector& eigs = s.bundle->spectrum().eigenvalues;

    io::VerifyReport report;
    report.tol = threshold;
    report.concomitant_residual = concomitant_residual(s, 8, 8, 3);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const cplx expected = eigs(j) * std::conj(eigs(k));
            const MultiplierCheck mc =
                multiplier_check(s.entry(j, k), expected, s.bundle->annulus().log_r1());
            report.multiplier_residual = std::max(report.multiplier_residual, mc.residual);
            report.modulus_residual = std::max(report.modulus_residual, mc.modulus_residual);
        }
    const ChartCheck charts = chart_consistency(s);
    report.chart_residual = charts.residual;
    report.winding = charts.winding;
    report.pass = report.concomitant_residual <= threshold &&
                  report.multiplier_residual <= threshold &&
                  report.modulus_residual <= threshold &&
                  report.chart_residual <= threshold && report.winding == 1;

    emit(o, io::verify_report_to_json(report));
    return report.pass ? exit_ok : exit_not_equivalent;
}

int run_norm(const CommonOpts& o, const std::string& path, int levels) {
    const Section s = io::section_from_json(io::load_json_file(path), o.tol_unitarity);
    if (levels < 1) throw validation_error("--levels must be >= 1");

    NormResult result;
    if (levels == 1) {
        result = sup_norm(s, grid_from_samples(o.grid));
    } else {
        const Section zero = scale(s, 0.0);
        std::vector<std::vector<Section>> blocks(
            static_cast<std::size_t>(levels),
            std::vector<Section>(static_cast<std::size_t>(levels), zero));
        for (int i = 0; i < levels; ++i)
            blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = s;
        result = complete_norm(blocks, grid_from_samples(o.grid));
    }
    emit(o, io::norm_result_to_json(result));
    return exit_ok;
}

int run_export_grid(const CommonOpts& o, const std::string& path, int nr, int ntheta) {
    const Section s = io::section_from_json(io::load_json_file(path), o.tol_unitarity);
    if (nr < 1 || ntheta < 1) throw validation_error("grid counts must be positive");
    const int n = s.dim();
    const double r1 = s.bundle->annulus().r1;

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw validation_error("cannot open \"" + o.out + "\" for writing");
        out = &file;
    }

    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    *out << "r,theta,opnorm";
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k) *out << ",abs_f_" << j << k;
    *out << "\n";

    for (int i = 0; i < nr; ++i) {
        const double r = nr == 1 ? 1.0 : 1.0 + (r1 - 1.0) * i / (nr - 1.0);
        for (int t = 0; t < ntheta; ++t) {
            const double theta = 2.0 * std::numbers::pi * t / ntheta;
            // log r + i theta is already a strip point; entry moduli do not
            // depend on the branch of theta.
            const cplx z(std::log(r), theta);
            *out << fmt(r) << ',' << fmt(theta) << ',' << fmt(operator_norm(eval_strip(s, z)));
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) *out << ',' << fmt(std::abs(s.entry(j, k).eval(z)));
            *out << "\n";
        }
    }
    if (!o.out.empty() && !file) throw validation_error("failed writing \"" + o.out + "\"");
    return exit_ok;
}

int run_demo(const CommonOpts& o, int n, const std::string& which) {
    if (n < 1 || n > 8) throw validation_error("--n must be between 1 and 8");
    Rng rng(o.seed);

    ClassifyOptions opts;
    opts.tol = o.tol;
    opts.seed = o.seed;
    opts.levels = std::min(o.levels, 3);
    opts.grid = grid_from_samples(o.grid);

    io::DemoReport report;
    report.seed = o.seed;
    report.r1 = o.r1;
    report.n = n;
    report.mode = which;

    bool eq_ok = true;
    bool neq_ok = true;
    if (which == "eq" || which == "both") {
        const Matrix a = random_unitary(n, rng);
        const Matrix u = random_unitary(n, rng);
        const cplx lambda = rng.unimodular();
        const Matrix b = u * (lambda * a) * u.adjoint();
        report.equivalent_case = classify_pair(a, b, o.r1, opts);
        eq_ok = report.equivalent_case->equivalence.verdict == Verdict::equivalent;
    }
    if (which == "neq" || which == "both") {
        const Matrix a = random_unitary(n, rng);
        const Matrix b = random_unitary(n, rng);
        report.inequivalent_case = classify_pair(a, b, o.r1, opts);
        neq_ok = report.inequivalent_case->equivalence.verdict == Verdict::not_equivalent;
    }

    if (which == "eq")
        report.exit_code = eq_ok ? exit_ok : exit_not_equivalent;
    else if (which == "neq")
        report.exit_code = neq_ok ? exit_not_equivalent : exit_ok;
    else
        report.exit_code = eq_ok && neq_ok ? exit_ok : exit_not_equivalent;

    emit(o, io::demo_report_to_json(report));
    return report.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flat-bundle section algebras over an annulus: classification, "
                 "verification, norms, grid export"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string path_a, path_b, section_path;
    int levels = 1;
    int nr = 8, ntheta = 16;
    int demo_n = 3;
    double verify_tol = 1e-9;
    std::string demo_case = "both";

    auto* classify = app.add_subcommand("classify", "decide equivalence of two bundles and "
                                                    "verify the induced isomorphism");
    classify->add_option("--a", path_a, "first matrix or bundle JSON")->required();
    classify->add_option("--b", path_b, "second matrix or bundle JSON")->required();
    auto* r1_opt =
        classify->add_option("--r1", opts.r1, "outer radius")->envname("BUNDLEALG_R1");
    add_tolerance_flags(classify, opts);
    add_mode_flag(classify, opts);
    classify->add_option("--seed", opts.seed, "seed for verification sections")
        ->envname("BUNDLEALG_SEED");
    classify->add_option("--levels", opts.levels, "matrix levels checked for isometry")
        ->envname("BUNDLEALG_LEVELS");
    classify->add_option("--grid", opts.grid, "boundary samples per circle")
        ->envname("BUNDLEALG_GRID");
    add_output_flag(classify, opts);

    auto* classify_tuple =
        app.add_subcommand("classify-tuple", "decide simultaneous equivalence of two "
                                             "commuting unitary tuples");
    classify_tuple->add_option("--a", path_a, "first tuple JSON")->required();
    classify_tuple->add_option("--b", path_b, "second tuple JSON")->required();
    add_tolerance_flags(classify_tuple, opts);
    add_mode_flag(classify_tuple, opts);
    add_output_flag(classify_tuple, opts);

    auto* verify = app.add_subcommand("verify", "check a stored section: concomitant "
                                                "identity, deck multipliers, atlas consistency");
    verify->add_option("--section", section_path, "section JSON")->required();
    verify->add_option("--tol", verify_tol, "pass/fail residual threshold")
        ->envname("BUNDLEALG_TOL");
    verify->add_option("--tol-unitarity", opts.tol_unitarity, "unitarity tolerance for inputs")
        ->envname("BUNDLEALG_TOL_UNITARITY");
    add_output_flag(verify, opts);

    auto* norm = app.add_subcommand("norm", "sup-norm of a section (matrix level m embeds "
                                            "it diagonally)");
    norm->add_option("--section", section_path, "section JSON")->required();
    norm->add_option("--levels", levels, "matrix level")->envname("BUNDLEALG_LEVELS");
    norm->add_option("--grid", opts.grid, "boundary samples per circle")
        ->envname("BUNDLEALG_GRID");
    norm->add_option("--tol-unitarity", opts.tol_unitarity, "unitarity tolerance for inputs")
        ->envname("BUNDLEALG_TOL_UNITARITY");
    add_output_flag(norm, opts);

    auto* export_grid = app.add_subcommand("export-grid", "CSV of pointwise operator norms "
                                                          "and entry moduli over an annulus grid");
    export_grid->add_option("--section", section_path, "section JSON")->required();
    export_grid->add_option("--nr", nr, "radial sample count");
    export_grid->add_option("--ntheta", ntheta, "angular sample count");
    add_output_flag(export_grid, opts);

    auto* demo = app.add_subcommand("demo", "seeded end-to-end classification demo");
    demo->add_option("--seed", opts.seed, "RNG seed")->envname("BUNDLEALG_SEED");
    demo->add_option("--r1", opts.r1, "outer radius")->envname("BUNDLEALG_R1");
    demo->add_option("--n", demo_n, "fibre dimension");
    demo->add_option("--case", demo_case, "eq, neq, or both")
        ->check(CLI::IsMember({"eq", "neq", "both"}));
    demo->add_option("--tol", opts.tol, "decision tolerance")->envname("BUNDLEALG_TOL");
    demo->add_option("--grid", opts.grid, "boundary samples per circle")
        ->envname("BUNDLEALG_GRID");
    add_output_flag(demo, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (classify->parsed()) return run_classify(opts, r1_opt->count() > 0, path_a, path_b);
        if (classify_tuple->parsed()) return run_classify_tuple(opts, path_a, path_b);
        if (verify->parsed()) return run_verify(opts, section_path, verify_tol);
        if (norm->parsed()) return run_norm(opts, section_path, levels);
        if (export_grid->parsed()) return run_export_grid(opts, section_path, nr, ntheta);
        if (demo->parsed()) return run_demo(opts, demo_n, demo_case);
        std::cerr << "error: no command\n";
        return exit_input;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_numerical;
    }
}
