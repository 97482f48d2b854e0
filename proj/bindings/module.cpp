/*
 * Python bindings for the section-algebra toolkit.
 *
 * Matrices cross the boundary as numpy complex arrays (pybind11/eigen);
 * reports cross as plain dicts with exactly the same shape as the CLI's
 * JSON output, produced by converting the canonical JSON form.
 */

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bundlealg/isomorphism.hpp"
#include "bundlealg/json_io.hpp"
#include "bundlealg/multidomain.hpp"
#include "bundlealg/norms.hpp"
#include "bundlealg/sections.hpp"

namespace py = pybind11;
using namespace bundlealg;

namespace {

py::object json_to_py(const io::json& j) {
    switch (j.type()) {
    case io::json::value_t::null: return py::none();
    case io::json::value_t::boolean: return py::bool_(j.get<bool>());
    case io::json::value_t::number_integer: return py::int_(j.get<long long>());
    case io::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case io::json::value_t::number_float: return py::float_(j.get<double>());
    case io::json::value_t::string: return py::str(j.get<std::string>());
    case io::json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(json_to_py(item));
        return out;
    }
    case io::json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
        return out;
    }
    default: return py::none();
    }
}

struct PyBundle {
    BundlePtr p;
};

struct PySection {
    Section s;
};

PyBundle bundle_of(const PySection& s) { return PyBundle{s.s.bundle}; }

std::map<int, cplx> coeff_map(const py::dict& d) {
    std::map<int, cplx> out;
    for (const auto& item : d) out[item.first.cast<int>()] = item.second.cast<cplx>();
    return out;
}

CommutingTuple tuple_of(const std::vector<Matrix>& gens) {
    CommutingTuple t;
    t.generators = gens;
    return t;
}

io::json parse_text(const std::string& text) {
    try {
        return io::json::parse(text);
    } catch (const io::json::parse_error& e) {
        throw validation_error(std::string("json: ") + e.what());
    }
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "flat PU_n bundle section algebras over an annulus";

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<PyBundle>(m, "Bundle")
        .def_property_readonly("dim", [](const PyBundle& b) { return b.p->dim(); })
        .def_property_readonly("r1", [](const PyBundle& b) { return b.p->annulus().r1; })
        .def_property_readonly("generator", [](const PyBundle& b) { return b.p->generator(); })
        .def_property_readonly(
            "eigenvalues", [](const PyBundle& b) { return b.p->spectrum().eigenvalues; })
        .def_property_readonly("frame", [](const PyBundle& b) { return b.p->spectrum().vectors; })
        .def_property_readonly("exponents", [](const PyBundle& b) { return b.p->exponents(); })
        .def("deck_matrix", [](const PyBundle& b, long k) { return b.p->deck_matrix(k); },
             py::arg("k"))
        .def("to_json", [](const PyBundle& b) {
            return io::dump_canonical(io::bundle_to_json(*b.p));
        })
        .def("__repr__", [](const PyBundle& b) {
            return "<Bundle dim=" + std::to_string(b.p->dim()) +
                   " r1=" + std::to_string(b.p->annulus().r1) + ">";
        });

    py::class_<PySection>(m, "Section")
        .def_property_readonly("dim", [](const PySection& s) { return s.s.dim(); })
        .def_property_readonly("bundle", &bundle_of)
        .def("eval", [](const PySection& s, cplx z) { return eval_strip(s.s, z); }, py::arg("z"),
             "value at a strip point, 0 <= Re z <= log(r1)")
        .def("entry_exponent",
             [](const PySection& s, int j, int k) { return s.s.entry(j, k).K; }, py::arg("j"),
             py::arg("k"))
        .def("entry_coefficients",
             [](const PySection& s, int j, int k) {
                 py::dict out;
                 for (const auto& [mm, c] : s.s.entry(j, k).laurent) out[py::int_(mm)] = c;
                 return out;
             },
             py::arg("j"), py::arg("k"))
        .def("to_json",
             [](const PySection& s) { return io::dump_canonical(io::section_to_json(s.s)); })
        .def("__repr__", [](const PySection& s) {
            return "<Section dim=" + std::to_string(s.s.dim()) + ">";
        });

    m.def("make_bundle",
          [](const Matrix& a, double r1, double unitarity_tol) {
              return PyBundle{make_bundle(a, r1, unitarity_tol)};
          },
          py::arg("a"), py::arg("r1") = 2.0, py::arg("unitarity_tol") = defaults::unitarity_tol,
          "flat bundle generated by a unitary matrix over the annulus 1 <= |w| <= r1");

    m.def("bundle_from_json", [](const std::string& text) {
        return PyBundle{io::bundle_from_json(parse_text(text))};
    });

    m.def("family_d",
          [](const PyBundle& b, const Vector& d) { return PySection{family_d(b.p, d)}; },
          py::arg("bundle"), py::arg("d"), "constant diagonal section");
    m.def("family_c",
          [](const PyBundle& b, const Matrix& c) { return PySection{family_c(b.p, c)}; },
          py::arg("bundle"), py::arg("c"),
          "zero-diagonal single-exponential family; entry (j,k) = c[j,k] e^{K[j,k] z}");
    m.def("scalar_section",
          [](const PyBundle& b, const py::dict& p) {
              return PySection{scalar_section(b.p, coeff_map(p))};
          },
          py::arg("bundle"), py::arg("laurent"),
          "central section p(e^z) I for a Laurent polynomial {index: coefficient}");
    m.def("random_section",
          [](const PyBundle& b, int degree, std::uint64_t seed) {
              return PySection{random_section(b.p, degree, seed)};
          },
          py::arg("bundle"), py::arg("degree") = 2, py::arg("seed") = 0);
    m.def("section_from_json", [](const std::string& text) {
        return PySection{io::section_from_json(parse_text(text))};
    });

    m.def("add", [](const PySection& a, const PySection& b) { return PySection{add(a.s, b.s)}; });
    m.def("scale", [](const PySection& a, cplx c) { return PySection{scale(a.s, c)}; });
    m.def("multiply",
          [](const PySection& a, const PySection& b) { return PySection{multiply(a.s, b.s)}; });

    m.def("concomitant_residual",
          [](const PySection& s, int re, int im, int k_range) {
              return concomitant_residual(s.s, re, im, k_range);
          },
          py::arg("section"), py::arg("re_samples") = 8, py::arg("im_samples") = 8,
          py::arg("k_range") = 3,
          "max deviation from F(z + 2 pi i k) = A^k F(z) A^-k over a strip grid");

    m.def("sup_norm",
          [](const PySection& s, int boundary_samples) {
              GridSpec g;
              g.boundary_samples = boundary_samples;
              return json_to_py(io::norm_result_to_json(sup_norm(s.s, g)));
          },
          py::arg("section"), py::arg("boundary_samples") = 512);
    m.def("boundary_dominates",
          [](const PySection& s) { return boundary_dominates(s.s); }, py::arg("section"),
          "interior grid max minus boundary grid max (<= 0 up to discretization)");

    m.def("pu_equivalent",
          [](const Matrix& a, const Matrix& b, double r1, double tol, bool strict) {
              DecisionOptions opts;
              opts.tol = tol;
              opts.strict = strict;
              const auto ba = make_bundle(a, r1);
              const auto bb = make_bundle(b, r1);
              return json_to_py(io::report_to_json(pu_equivalent(*ba, *bb, opts)));
          },
          py::arg("a"), py::arg("b"), py::arg("r1") = 2.0,
          py::arg("tol") = defaults::decision_tol, py::arg("strict") = false,
          "restricted flat-bundle equivalence of the generators; report as a dict");

    m.def("classify",
          [](const Matrix& a, const Matrix& b, double r1, double tol, bool strict,
             std::uint64_t seed, int levels) {
              ClassifyOptions opts;
              opts.tol = tol;
              opts.strict = strict;
              opts.seed = seed;
              opts.levels = levels;
              return json_to_py(io::classification_to_json(classify_pair(a, b, r1, opts)));
          },
          py::arg("a"), py::arg("b"), py::arg("r1") = 2.0,
          py::arg("tol") = defaults::decision_tol, py::arg("strict") = false,
          py::arg("seed") = 0, py::arg("levels") = 3,
          "equivalence decision plus induced-isomorphism verification; report as a dict");

    m.def("classify_tuple",
          [](const std::vector<Matrix>& a, const std::vector<Matrix>& b, double tol,
             bool strict) {
              DecisionOptions opts;
              opts.tol = tol;
              opts.strict = strict;
              return json_to_py(
                  io::tuple_report_to_json(tuple_pu_equivalent(tuple_of(a), tuple_of(b), opts)));
          },
          py::arg("a"), py::arg("b"), py::arg("tol") = defaults::decision_tol,
          py::arg("strict") = false,
          "simultaneous equivalence of commuting unitary tuples; report as a dict");

    m.def("check_commuting", [](const std::vector<Matrix>& gens) {
        return check_commuting(tuple_of(gens));
    });
}
