#include "bundlealg/json_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bundlealg/errors.hpp"

namespace bundlealg::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw validation_error(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
    return *it;
}

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "non-finite number");
    return v;
}

double number_field(const json& j, const char* key, const std::string& where) {
    return number_at(field(j, key, where), where + "." + key);
}

int int_field(const json& j, const char* key, const std::string& where) {
    const json& f = field(j, key, where);
    if (!f.is_number_integer()) fail(where + "." + key, "expected an integer");
    return f.get<int>();
}

bool bool_field(const json& j, const char* key, const std::string& where) {
    const json& f = field(j, key, where);
    if (!f.is_boolean()) fail(where + "." + key, "expected a boolean");
    return f.get<bool>();
}

std::string string_field(const json& j, const char* key, const std::string& where) {
    const json& f = field(j, key, where);
    if (!f.is_string()) fail(where + "." + key, "expected a string");
    return f.get<std::string>();
}

std::vector<double> real_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_at(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

int laurent_key(const std::string& key, const std::string& where) {
    const char* s = key.c_str();
    char* end = nullptr;
    const long m = std::strtol(s, &end, 10);
    if (end == s || *end != '\0')
        fail(where, "laurent key \"" + key + "\" is not an integer");
    return static_cast<int>(m);
}

json entry_to_json(const ModAutoEntry& e) {
    json laurent = json::object();
    for (const auto& [m, c] : e.laurent) laurent[std::to_string(m)] = to_json(c);
    return json{{"K", e.K}, {"laurent", std::move(laurent)}};
}

ModAutoEntry entry_from_json(const json& j, const std::string& where) {
    ModAutoEntry e;
    e.K = number_field(j, "K", where);
    const json& laurent = field(j, "laurent", where);
    if (!laurent.is_object()) fail(where + ".laurent", "expected an object");
    for (const auto& [key, value] : laurent.items()) {
        const int m = laurent_key(key, where + ".laurent");
        e.laurent[m] = complex_from_json(value, where + ".laurent." + key);
    }
    prune(e);
    return e;
}

} // namespace

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

cplx complex_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where, "expected a complex number as [re, im]");
    return {number_at(j[0], where + "[0]"), number_at(j[1], where + "[1]")};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const json& first = j[0];
    if (!first.is_array() || first.empty())
        fail(where + "[0]", "expected a non-empty row of complex numbers");
    const std::size_t cols = first.size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_where = where + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols)
            fail(row_where, "row length " + std::to_string(j[r].size()) + " does not match " +
                                std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
    return m;
}

Vector vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of complex numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) =
            complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

json bundle_to_json(const FlatBundle& b) {
    return json{{"r1", b.annulus().r1}, {"A", to_json(b.generator())}};
}

BundlePtr bundle_from_json(const json& j, double unitarity_tol) {
    const double r1 = number_field(j, "r1", "bundle");
    if (!(r1 > 1.0)) fail("bundle.r1", "outer radius must satisfy r1 > 1");
    const Matrix a = matrix_from_json(field(j, "A", "bundle"), "bundle.A");
    if (a.rows() != a.cols()) fail("bundle.A", "matrix must be square");
    try {
        return make_bundle(a, r1, unitarity_tol);
    } catch (const validation_error& e) {
        // Name the field; construction only knows the bare matrix.
        fail("bundle.A", std::string("not a unitary generator (") + e.what() + ")");
    }
}

json section_to_json(const Section& s) {
    if (!s.bundle) throw validation_error("section_to_json: null bundle");
    const int n = s.dim();
    json entries = json::array();
    for (int r = 0; r < n; ++r) {
        json row = json::array();
        for (int c = 0; c < n; ++c) row.push_back(entry_to_json(s.entry(r, c)));
        entries.push_back(std::move(row));
    }
    return json{{"bundle", bundle_to_json(*s.bundle)},
                {"frame", to_json(s.frame)},
                {"entries", std::move(entries)}};
}

Section section_from_json(const json& j, double unitarity_tol) {
    Section s;
    s.bundle = bundle_from_json(field(j, "bundle", "section"), unitarity_tol);
    const int n = s.bundle->dim();
    s.frame = matrix_from_json(field(j, "frame", "section"), "section.frame");
    if (s.frame.rows() != n || s.frame.cols() != n)
        fail("section.frame", "frame dimension does not match the bundle");
    check_unitary(s.frame, std::max(unitarity_tol, 1e-8));
    // The frame must diagonalize the generator in the bundle's spectral
    // order; entry bookkeeping indexes the exponent table by frame position.
    const Matrix d = s.frame.adjoint() * s.bundle->generator() * s.frame;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (r == c) continue;
            if (std::abs(d(r, c)) > 1e-7)
                fail("section.frame", "columns do not diagonalize the bundle generator");
        }
    for (int r = 0; r < n; ++r)
        if (std::abs(d(r, r) - s.bundle->spectrum().eigenvalues(r)) > 1e-7)
            fail("section.frame", "column order does not match the bundle spectrum");

    const json& entries = field(j, "entries", "section");
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(n))
        fail("section.entries", "expected " + std::to_string(n) + " rows");
    s.entries.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const std::string row_where = "section.entries[" + std::to_string(r) + "]";
        const json& row = entries[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            fail(row_where, "expected " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c)
            s.entry(r, c) = entry_from_json(row[static_cast<std::size_t>(c)],
                                            row_where + "[" + std::to_string(c) + "]");
    }
    return s;
}

json tuple_to_json(const CommutingTuple& t) {
    json gens = json::array();
    for (const Matrix& g : t.generators) gens.push_back(to_json(g));
    return json{{"generators", std::move(gens)}};
}

CommutingTuple tuple_from_json(const json& j) {
    const json& gens = field(j, "generators", "tuple");
    if (!gens.is_array() || gens.empty())
        fail("tuple.generators", "expected a non-empty array of matrices");
    CommutingTuple t;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string where = "tuple.generators[" + std::to_string(i) + "]";
        Matrix g = matrix_from_json(gens[i], where);
        if (g.rows() != g.cols()) fail(where, "matrix must be square");
        if (!t.generators.empty() && g.rows() != t.generators[0].rows())
            fail(where, "generators have mixed dimensions");
        t.generators.push_back(std::move(g));
    }
    return t;
}

std::string verdict_name(Verdict v) {
    return v == Verdict::equivalent ? "equivalent" : "not_equivalent";
}

Verdict verdict_from_name(const std::string& name, const std::string& where) {
    if (name == "equivalent") return Verdict::equivalent;
    if (name == "not_equivalent") return Verdict::not_equivalent;
    fail(where, "unknown verdict \"" + name + "\"");
}

json report_to_json(const EquivalenceReport& r) {
    json j{{"verdict", verdict_name(r.verdict)},
           {"lambda", to_json(r.lambda)},
           {"residual", r.residual},
           {"invariantA", r.invariantA},
           {"invariantB", r.invariantB}};
    if (r.witness) j["V"] = to_json(*r.witness);
    return j;
}

EquivalenceReport report_from_json(const json& j) {
    EquivalenceReport r;
    r.verdict = verdict_from_name(string_field(j, "verdict", "report"), "report.verdict");
    r.lambda = complex_from_json(field(j, "lambda", "report"), "report.lambda");
    r.residual = number_field(j, "residual", "report");
    r.invariantA = real_list(field(j, "invariantA", "report"), "report.invariantA");
    r.invariantB = real_list(field(j, "invariantB", "report"), "report.invariantB");
    if (j.contains("V")) r.witness = matrix_from_json(j["V"], "report.V");
    return r;
}

json tuple_report_to_json(const TupleEquivalenceReport& r) {
    json lambdas = json::array();
    for (cplx l : r.lambdas) lambdas.push_back(to_json(l));
    json j{{"verdict", verdict_name(r.verdict)},
           {"lambda", to_json(r.lambdas.empty() ? cplx{1.0, 0.0} : r.lambdas[0])},
           {"lambdas", std::move(lambdas)},
           {"residual", r.residual},
           {"invariantA", r.invariantA},
           {"invariantB", r.invariantB}};
    if (r.witness) j["V"] = to_json(*r.witness);
    return j;
}

TupleEquivalenceReport tuple_report_from_json(const json& j) {
    TupleEquivalenceReport r;
    r.verdict = verdict_from_name(string_field(j, "verdict", "report"), "report.verdict");
    const json& lambdas = field(j, "lambdas", "report");
    if (!lambdas.is_array()) fail("report.lambdas", "expected an array");
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        r.lambdas.push_back(
            complex_from_json(lambdas[i], "report.lambdas[" + std::to_string(i) + "]"));
    r.residual = number_field(j, "residual", "report");
    const auto invariants = [&](const char* key) {
        const json& inv = field(j, key, "report");
        if (!inv.is_array()) fail(std::string("report.") + key, "expected an array");
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < inv.size(); ++i)
            out.push_back(
                real_list(inv[i], std::string("report.") + key + "[" + std::to_string(i) + "]"));
        return out;
    };
    r.invariantA = invariants("invariantA");
    r.invariantB = invariants("invariantB");
    if (j.contains("V")) r.witness = matrix_from_json(j["V"], "report.V");
    return r;
}

json classification_to_json(const ClassificationReport& r) {
    json j{{"equivalence", report_to_json(r.equivalence)},
           {"mode", r.strict_mode ? "strict" : "pu"}};
    if (r.equivalence.verdict == Verdict::equivalent) {
        j["residuals"] = json{{"isometry_deviation", r.isometry_deviation},
                              {"center", r.center_residual},
                              {"mapped_concomitant", r.mapped_concomitant_residual}};
    }
    return j;
}

ClassificationReport classification_from_json(const json& j) {
    ClassificationReport r;
    r.equivalence = report_from_json(field(j, "equivalence", "classification"));
    const std::string mode = string_field(j, "mode", "classification");
    if (mode != "pu" && mode != "strict")
        fail("classification.mode", "expected \"pu\" or \"strict\"");
    r.strict_mode = mode == "strict";
    if (j.contains("residuals")) {
        const json& res = j["residuals"];
        r.isometry_deviation = real_list(field(res, "isometry_deviation", "classification.residuals"),
                                         "classification.residuals.isometry_deviation");
        r.center_residual = number_field(res, "center", "classification.residuals");
        r.mapped_concomitant_residual =
            number_field(res, "mapped_concomitant", "classification.residuals");
    }
    return r;
}

json grid_to_json(const GridSpec& g) {
    return json{{"boundary_samples", g.boundary_samples},
                {"interior_radial", g.interior_radial},
                {"interior_angular", g.interior_angular},
                {"refine_factor", g.refine_factor},
                {"epsilon", g.epsilon},
                {"max_refinements", g.max_refinements}};
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.boundary_samples = int_field(j, "boundary_samples", "grid");
    g.interior_radial = int_field(j, "interior_radial", "grid");
    g.interior_angular = int_field(j, "interior_angular", "grid");
    g.refine_factor = int_field(j, "refine_factor", "grid");
    g.epsilon = number_field(j, "epsilon", "grid");
    g.max_refinements = int_field(j, "max_refinements", "grid");
    g.validate();
    return g;
}

json norm_result_to_json(const NormResult& r) {
    return json{{"value", r.value},
                {"last_delta", r.last_delta},
                {"samples", r.samples},
                {"converged", r.converged}};
}

NormResult norm_result_from_json(const json& j) {
    NormResult r;
    r.value = number_field(j, "value", "norm");
    r.last_delta = number_field(j, "last_delta", "norm");
    r.samples = int_field(j, "samples", "norm");
    r.converged = bool_field(j, "converged", "norm");
    return r;
}

json verify_report_to_json(const VerifyReport& r) {
    return json{{"concomitant_residual", r.concomitant_residual},
                {"multiplier_residual", r.multiplier_residual},
                {"modulus_residual", r.modulus_residual},
                {"chart_residual", r.chart_residual},
                {"winding", r.winding},
                {"tol", r.tol},
                {"pass", r.pass}};
}

VerifyReport verify_report_from_json(const json& j) {
    VerifyReport r;
    r.concomitant_residual = number_field(j, "concomitant_residual", "verify");
    r.multiplier_residual = number_field(j, "multiplier_residual", "verify");
    r.modulus_residual = number_field(j, "modulus_residual", "verify");
    r.chart_residual = number_field(j, "chart_residual", "verify");
    const json& w = field(j, "winding", "verify");
    if (!w.is_number_integer()) fail("verify.winding", "expected an integer");
    r.winding = w.get<long>();
    r.tol = number_field(j, "tol", "verify");
    r.pass = bool_field(j, "pass", "verify");
    return r;
}

json demo_report_to_json(const DemoReport& r) {
    json cases = json::object();
    if (r.equivalent_case) cases["equivalent"] = classification_to_json(*r.equivalent_case);
    if (r.inequivalent_case) cases["inequivalent"] = classification_to_json(*r.inequivalent_case);
    return json{{"seed", r.seed},     {"r1", r.r1},
                {"n", r.n},           {"mode", r.mode},
                {"cases", std::move(cases)}, {"exit_code", r.exit_code}};
}

DemoReport demo_report_from_json(const json& j) {
    DemoReport r;
    const json& seed = field(j, "seed", "demo");
    if (!seed.is_number_integer()) fail("demo.seed", "expected an integer");
    r.seed = seed.get<std::uint64_t>();
    r.r1 = number_field(j, "r1", "demo");
    r.n = int_field(j, "n", "demo");
    r.mode = string_field(j, "mode", "demo");
    if (r.mode != "eq" && r.mode != "neq" && r.mode != "both")
        fail("demo.mode", "expected \"eq\", \"neq\", or \"both\"");
    const json& cases = field(j, "cases", "demo");
    if (!cases.is_object()) fail("demo.cases", "expected an object");
    if (cases.contains("equivalent"))
        r.equivalent_case = classification_from_json(cases["equivalent"]);
    if (cases.contains("inequivalent"))
        r.inequivalent_case = classification_from_json(cases["inequivalent"]);
    r.exit_code = int_field(j, "exit_code", "demo");
    return r;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open \"" + path + "\" for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw validation_error("\"" + path + "\": " + e.what());
    }
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open \"" + path + "\" for writing");
    out << dump_canonical(j);
    if (!out) throw validation_error("failed writing \"" + path + "\"");
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

} // namespace bundlealg::io
