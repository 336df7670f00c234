#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "canlift/arith.hpp"
#include "canlift/dwork.hpp"
#include "canlift/obstruction.hpp"
#include "canlift/poly.hpp"

namespace py = pybind11;
using namespace canlift;

namespace {

py::int_ big(const HDPoly::Int& v) { return py::int_(py::str(v.str())); }

const FieldSpec* get_field(std::uint64_t p, unsigned n,
                           const std::optional<std::vector<std::uint32_t>>& modulus) {
  return modulus ? FieldSpec::get(p, n, &*modulus) : FieldSpec::get(p, n);
}

}  // namespace

PYBIND11_MODULE(_canlift, m) {
  m.doc() = "exact canonical liftings of Dwork hypersurfaces modulo p^2";

  auto err = py::register_exception<error>(m, "Error");
  py::register_exception<precondition_error>(m, "PreconditionError", err);
  py::register_exception<parse_error>(m, "ParseError", err);
  py::register_exception<crosscheck_error>(m, "CrosscheckError", err);

  py::class_<FieldSpec, std::unique_ptr<FieldSpec, py::nodelete>>(m, "FieldSpec")
      .def_readonly("p", &FieldSpec::p)
      .def_readonly("n", &FieldSpec::n)
      .def("q", &FieldSpec::q)
      .def("modulus_text", &FieldSpec::modulus_text)
      .def("__repr__", [](const FieldSpec& s) {
        return "FieldSpec(p=" + std::to_string(s.p) + ", n=" + std::to_string(s.n) + ")";
      });

  m.def("field",
        [](std::uint64_t p, unsigned n,
           const std::optional<std::vector<std::uint32_t>>& modulus) {
          return const_cast<FieldSpec*>(get_field(p, n, modulus));
        },
        py::return_value_policy::reference, py::arg("p"), py::arg("n") = 1,
        py::arg("modulus") = py::none(),
        "interned field F_{p^n}; modulus = monic coefficients [c0, ..., 1]");

  py::class_<FieldElement>(m, "FieldElement")
      .def_static("zero", &FieldElement::zero)
      .def_static("one", &FieldElement::one)
      .def_static("from_int", &FieldElement::from_int)
      .def_static("from_coeffs", &FieldElement::from_coeffs)
      .def_static("from_index", &FieldElement::from_index)
      .def_static("generator", &FieldElement::generator)
      .def("coeff", &FieldElement::coeff)
      .def("index", &FieldElement::index)
      .def("is_zero", &FieldElement::is_zero)
      .def("inv", &FieldElement::inv)
      .def("pow", &FieldElement::pow)
      .def("frobenius", &FieldElement::frobenius)
      .def("frobenius_inv", &FieldElement::frobenius_inv)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(-py::self)
      .def(py::self * py::self)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def("__str__", &FieldElement::str)
      .def("__repr__", [](const FieldElement& a) { return "FieldElement(" + a.str() + ")"; });

  m.def("parse_field", &field_from_string, py::arg("spec"), py::arg("text"),
        "field element from text such as \"3\" or \"1,2\"");

  py::class_<Witt2>(m, "Witt2")
      .def(py::init<const FieldElement&, const FieldElement&>(), py::arg("a0"),
           py::arg("a1"))
      .def_static("zero", &Witt2::zero)
      .def_static("one", &Witt2::one)
      .def_static("from_int", &Witt2::from_int)
      .def_static("teichmuller", &Witt2::teichmuller)
      .def_static("times_p", &Witt2::times_p)
      .def("a0", &Witt2::a0)
      .def("a1", &Witt2::a1)
      .def("is_zero", &Witt2::is_zero)
      .def("is_unit", &Witt2::is_unit)
      .def("inv", &Witt2::inv)
      .def("pow", &Witt2::pow)
      .def("frobenius", &Witt2::frobenius)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(-py::self)
      .def(py::self * py::self)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def("__str__", &Witt2::str)
      .def("__repr__", [](const Witt2& w) { return "Witt2" + w.str(); });

  m.def("parse_witt", &witt_from_string, py::arg("spec"), py::arg("text"),
        "Witt vector from text such as \"(3|2)\" or a bare integer");
  m.def("witt_prime_iso", &witt_prime_iso,
        "the residue in Z/p^2 represented by a Witt vector over F_p");
  m.def("witt_from_residue", &witt_from_residue, py::arg("spec"), py::arg("r"),
        "the Witt vector over F_p representing a residue mod p^2");

  py::class_<HDPoly>(m, "HDPoly")
      .def_property_readonly("M", &HDPoly::M)
      .def_property_readonly("P", &HDPoly::P)
      .def("num_terms", &HDPoly::num_terms)
      .def("coeff", [](const HDPoly& h, std::size_t i) { return big(h.coeff(i)); },
           py::arg("i"), "exact coefficient of X^(M*i)")
      .def("eval_k", &HDPoly::eval_k)
      .def("eval_w2", &HDPoly::eval_w2)
      .def("str_mod", &HDPoly::str_mod)
      .def("__str__", &HDPoly::str)
      .def("__repr__", &HDPoly::str);

  m.def("hd_def", &hd_def, py::arg("M"), py::arg("P"),
        "exact coefficient polynomial on exponents 0, M, ..., M*floor(P/M)");
  m.def("harmonic_ph", &harmonic_ph, py::arg("spec"), py::arg("k"),
        "p * H_k mod p^2 with the j = p summand contributing 1");
  m.def("hd_mod",
        [](const FieldSpec* s, int N, int m, const Witt2& lam) {
          return hd_mod(s, N, m, lam);
        },
        py::arg("spec"), py::arg("N"), py::arg("m"), py::arg("lam"),
        "value of the degree m*p-1 coefficient polynomial, entirely mod p^2");

  m.def("smooth",
        [](const FieldSpec* s, int N, const FieldElement& lam) {
          return dwork_smooth(DworkParams::base(s, N, lam));
        },
        py::arg("spec"), py::arg("N"), py::arg("lam"),
        "the family member at lam is smooth");
  m.def("ordinary",
        [](const FieldSpec* s, int N, const FieldElement& lam) {
          return dwork_ordinary(DworkParams::base(s, N, lam));
        },
        py::arg("spec"), py::arg("N"), py::arg("lam"),
        "the degree p-1 coefficient value at lam is nonzero");
  m.def("canonical_eta", &canonical_eta, py::arg("spec"), py::arg("N"),
        py::arg("lam"), py::arg("verify") = true,
        "the unique family parameter over lam with vanishing obstruction");
  m.def("ratio_invariant", &ratio_invariant, py::arg("spec"), py::arg("N"),
        py::arg("lam"),
        "ratio of the two coefficient values, independent of the lift");
  m.def("closed_form_obstruction",
        [](const FieldSpec* s, int N, const Witt2& eta) {
          return closed_form_obstruction(DworkParams::lifted(s, N, eta));
        },
        py::arg("spec"), py::arg("N"), py::arg("eta"),
        "obstruction value of the family member at eta");
  m.def("family",
        [](const FieldSpec* s, int N, const Witt2& eta) {
          return dwork_poly_w2(DworkParams::lifted(s, N, eta)).str();
        },
        py::arg("spec"), py::arg("N"), py::arg("eta"),
        "text of the family polynomial eta*sum(x_i^(N+1)) - (N+1)*prod(x_i)");

  py::class_<CanonicalVerdict>(m, "Verdict")
      .def_readonly("canonical", &CanonicalVerdict::canonical)
      .def_readonly("inconclusive_n2", &CanonicalVerdict::inconclusive_n2)
      .def_readonly("kernel_rank", &CanonicalVerdict::kernel_rank)
      .def_property_readonly("witness",
                             [](const CanonicalVerdict& v) -> std::optional<std::string> {
                               if (!v.witness) return std::nullopt;
                               return v.witness->str();
                             })
      .def("__repr__", [](const CanonicalVerdict& v) {
        std::string r = std::string("Verdict(canonical=") +
                        (v.canonical ? "True" : "False");
        if (v.inconclusive_n2) r += ", inconclusive_n2=True";
        return r + ")";
      });

  m.def("check",
        [](const FieldSpec* s, const std::string& f_text) {
          auto f = parse_poly<Witt2>(s, f_text);
          return is_canonical(HypersurfaceContext::make(f));
        },
        py::arg("spec"), py::arg("f"),
        "canonical-lift verdict for a homogeneous polynomial over W2; "
        "smoothness of f is assumed, not verified");
}
