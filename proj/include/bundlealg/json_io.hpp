#pragma once

/*
 * JSON formats for every object the tools read or write.
 *
 *   complex  [re, im]
 *   matrix   row-major array of rows of complex
 *   bundle   { "r1": real, "A": matrix }
 *   section  { "bundle": bundle, "frame": matrix,
 *              "entries": n x n array of { "K": real, "laurent": { "<m>": complex } } }
 *   tuple    { "generators": [matrix, ...] }
 *
 * Reports mirror the structs they serialize; the tuple report extends the
 * pair report with "lambdas". Loaders throw validation_error with a message
 * naming the offending field, and every document a tool emits round-trips
 * through the corresponding loader.
 *
 * Load-time checks are structural only (shapes, finiteness, unitarity of
 * generator and frame, frame order consistent with the bundle spectrum).
 * Entry exponents are deliberately not checked against the bundle table:
 * detecting a corrupted exponent is the verifier's job, not the parser's.
 */

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bundlealg/isomorphism.hpp"
#include "bundlealg/multidomain.hpp"
#include "bundlealg/norms.hpp"
#include "bundlealg/sections.hpp"

namespace bundlealg::io {

using nlohmann::json;

json to_json(cplx v);
json to_json(const Matrix& m);
json to_json(const Vector& v);

cplx complex_from_json(const json& j, const std::string& where);
Matrix matrix_from_json(const json& j, const std::string& where);
Vector vector_from_json(const json& j, const std::string& where);

json bundle_to_json(const FlatBundle& b);
BundlePtr bundle_from_json(const json& j, double unitarity_tol = defaults::unitarity_tol);

json section_to_json(const Section& s);
Section section_from_json(const json& j, double unitarity_tol = defaults::unitarity_tol);

json tuple_to_json(const CommutingTuple& t);
CommutingTuple tuple_from_json(const json& j);

std::string verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name, const std::string& where);

json report_to_json(const EquivalenceReport& r);
EquivalenceReport report_from_json(const json& j);

json tuple_report_to_json(const TupleEquivalenceReport& r);
TupleEquivalenceReport tuple_report_from_json(const json& j);

json classification_to_json(const ClassificationReport& r);
ClassificationReport classification_from_json(const json& j);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

json norm_result_to_json(const NormResult& r);
NormResult norm_result_from_json(const json& j);

// Section verification summary: concomitant residual over a strip grid,
// worst per-entry deck-multiplier residuals, and chart-atlas consistency
// (value agreement on overlaps plus total winding, which must be 1).
struct VerifyReport {
    double concomitant_residual = 0.0;
    double multiplier_residual = 0.0;
    double modulus_residual = 0.0;
    double chart_residual = 0.0;
    long winding = 0;
    double tol = 0.0;
    bool pass = false;
};

json verify_report_to_json(const VerifyReport& r);
VerifyReport verify_report_from_json(const json& j);

// Seeded end-to-end demo outcome; "cases" holds the classifications that ran.
struct DemoReport {
    std::uint64_t seed = 0;
    double r1 = 2.0;
    int n = 0;
    std::string mode; // "eq", "neq", or "both"
    std::optional<ClassificationReport> equivalent_case;
    std::optional<ClassificationReport> inequivalent_case;
    int exit_code = 0;
};

json demo_report_to_json(const DemoReport& r);
DemoReport demo_report_from_json(const json& j);

// Parse failures and unreadable paths surface as validation_error naming the
// file and position.
json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

// The one serialization used for emitted documents: 2-space indent, sorted
// keys (nlohmann's default object order), trailing newline. Fixed so equal
// documents are byte-identical.
std::string dump_canonical(const json& j);

} // namespace bundlealg::io
