#ifndef CANLIFT_DUALMOD_HPP
#define CANLIFT_DUALMOD_HPP

#include <functional>
#include <optional>
#include <unordered_map>

#include "canlift/poly.hpp"

namespace canlift {

/* Graded dual of the polynomial ring: the span of monomials
   x0^{e0}*...*x{v}^{ev} with every exponent <= -1, in total degree t.
   Keys pack the magnitudes |e_i|, so term order matches HomogPoly. */
template <class C>
class DualElement {
 public:
  using Term = std::pair<std::uint64_t, C>;

  DualElement(const FieldSpec* s, unsigned num_vars, std::int64_t degree)
      : spec_(s), nv_(num_vars), deg_(degree) {
    validate();
  }

  static DualElement monomial(const FieldSpec* s, unsigned num_vars,
                              const std::vector<std::int64_t>& exps, C coeff) {
    if (exps.size() != num_vars) throw precondition_error("exponent count != variable count");
    std::int64_t deg = 0;
    std::vector<std::int64_t> mag(num_vars);
    for (unsigned i = 0; i < num_vars; ++i) {
      if (exps[i] > -1)
        throw precondition_error("dual monomial needs exponent <= -1 in every variable");
      mag[i] = -exps[i];
      deg += exps[i];
    }
    DualElement r(s, num_vars, deg);
    if (!coeff.is_zero()) r.terms_.emplace_back(keypack::pack(num_vars, mag), coeff);
    return r;
  }

  const FieldSpec* spec() const { return spec_; }
  unsigned num_vars() const { return nv_; }
  std::int64_t degree() const { return deg_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /* Negative exponents of a packed key. */
  std::vector<std::int64_t> exponents(std::uint64_t key) const {
    std::vector<std::int64_t> e;
    keypack::unpack(nv_, key, e);
    for (auto& v : e) v = -v;
    return e;
  }

  C coeff_of(const std::vector<std::int64_t>& exps) const {
    if (exps.size() != nv_) throw precondition_error("exponent count != variable count");
    std::vector<std::int64_t> mag(nv_);
    for (unsigned i = 0; i < nv_; ++i) mag[i] = -exps[i];
    return coeff_by_key(keypack::pack(nv_, mag));
  }

  C coeff_by_key(std::uint64_t key) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term& t, std::uint64_t k) { return t.first > k; });
    if (it != terms_.end() && it->first == key) return it->second;
    return C::zero(spec_);
  }

  DualElement operator+(const DualElement& o) const {
    check_compatible(o);
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (deg_ != o.deg_) throw precondition_error("degree mismatch in dual addition");
    DualElement r(spec_, nv_, deg_);
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first > o.terms_[j].first)) {
        r.terms_.push_back(terms_[i++]);
      } else if (i == terms_.size() || o.terms_[j].first > terms_[i].first) {
        r.terms_.push_back(o.terms_[j++]);
      } else {
        C c = terms_[i].second + o.terms_[j].second;
        if (!c.is_zero()) r.terms_.emplace_back(terms_[i].first, c);
        ++i, ++j;
      }
    }
    return r;
  }

  DualElement operator-() const {
    DualElement r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }

  DualElement operator-(const DualElement& o) const { return *this + (-o); }

  DualElement scale(const C& c) const {
    DualElement r(spec_, nv_, deg_);
    if (c.is_zero()) return r;
    r.terms_.reserve(terms_.size());
    for (const auto& [k, v] : terms_) {
      C w = v * c;
      if (!w.is_zero()) r.terms_.emplace_back(k, w);
    }
    return r;
  }

  bool operator==(const DualElement& o) const {
    if (spec_ != o.spec_ || nv_ != o.nv_) return false;
    if (terms_.empty() && o.terms_.empty()) return true;
    return deg_ == o.deg_ && terms_ == o.terms_;
  }
  bool operator!=(const DualElement& o) const { return !(*this == o); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      std::string mono = detail::format_monomial(nv_, exponents(k));
      if (c == C::one(spec_))
        out += mono;
      else
        out += c.str() + "*" + mono;
    }
    return out;
  }

  static DualElement from_terms(const FieldSpec* s, unsigned nv, std::int64_t deg,
                                std::vector<Term> ts) {
    DualElement r(s, nv, deg);
    r.terms_ = std::move(ts);
    return r;
  }

 private:
  const FieldSpec* spec_ = nullptr;
  unsigned nv_ = 0;
  std::int64_t deg_ = 0;
  std::vector<Term> terms_;

  void validate() const {
    if (!spec_ || nv_ == 0) throw precondition_error("dual element needs a field spec and variables");
    if (deg_ >= 0) throw precondition_error("dual degree must be negative");
    if (static_cast<std::uint64_t>(-deg_) > keypack::max_exponent(nv_))
      throw precondition_error("dual degree magnitude exceeds packed-exponent bound");
  }

  void check_compatible(const DualElement& o) const {
    if (spec_ != o.spec_) throw precondition_error("mismatched field specs");
    if (nv_ != o.nv_) throw precondition_error("mismatched variable counts");
  }
};

/* All dual monomials of the given degree, in descending key order.
   Count is binom(-t-1, nv-1); empty when -t < nv. */
template <class C>
std::vector<DualElement<C>> dual_basis(const FieldSpec* s, unsigned nv, std::int64_t t) {
  if (t >= 0) throw precondition_error("dual degree must be negative");
  std::vector<DualElement<C>> out;
  std::vector<std::int64_t> exps(nv, -1);
  std::int64_t rest = -t - static_cast<std::int64_t>(nv);
  if (rest < 0) return out;
  // distribute `rest` extra magnitude over the variables, x0-heavy first
  std::function<void(unsigned, std::int64_t)> rec = [&](unsigned i, std::int64_t left) {
    if (i + 1 == nv) {
      exps[i] = -1 - left;
      out.push_back(DualElement<C>::monomial(s, nv, exps, C::one(s)));
      return;
    }
    for (std::int64_t take = left; take >= 0; --take) {
      exps[i] = -1 - take;
      rec(i + 1, left - take);
    }
  };
  rec(0, rest);
  return out;
}

template <class C>
DualElement<C> dual_monomial(const FieldSpec* s, unsigned nv,
                             const std::vector<std::int64_t>& exps, C coeff) {
  return DualElement<C>::monomial(s, nv, exps, coeff);
}

/* Contraction action of the polynomial ring: x^a * x^{-m} is x^{-(m-a)}
   when every resulting exponent stays <= -1 and zero otherwise. */
template <class C>
DualElement<C> dual_act(const HomogPoly<C>& f, const DualElement<C>& g) {
  if (f.spec() != g.spec() || f.num_vars() != g.num_vars())
    throw precondition_error("mismatched spec or variable count in dual action");
  unsigned nv = g.num_vars();
  unsigned w = keypack::bits_per_var(nv);
  std::uint64_t mask = keypack::max_exponent(nv);
  std::unordered_map<std::uint64_t, C> acc;
  for (const auto& [gk, gc] : g.terms()) {
    for (const auto& [fk, fc] : f.terms()) {
      std::uint64_t rk = 0;
      bool ok = true;
      for (unsigned i = 0; i < nv && ok; ++i) {
        unsigned sh = w * (nv - 1 - i);
        std::uint64_t m = (gk >> sh) & mask;
        std::uint64_t e = (fk >> sh) & mask;
        if (m <= e)
          ok = false;
        else
          rk |= (m - e) << sh;
      }
      if (!ok) continue;
      C prod = fc * gc;
      if (prod.is_zero()) continue;
      auto [it, inserted] = acc.try_emplace(rk, prod);
      if (!inserted) it->second = it->second + prod;
    }
  }
  std::vector<typename DualElement<C>::Term> ts;
  ts.reserve(acc.size());
  for (auto& [k, c] : acc)
    if (!c.is_zero()) ts.emplace_back(k, std::move(c));
  std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return DualElement<C>::from_terms(g.spec(), nv, g.degree() + f.degree(), std::move(ts));
}

/* Pairing of complementary degrees: the coefficient of x0^-1*...*xv^-1
   in the contraction. Requires deg f + deg g == -num_vars. */
template <class C>
C dual_pairing(const HomogPoly<C>& f, const DualElement<C>& g) {
  if (f.degree() + g.degree() != -static_cast<std::int64_t>(g.num_vars()))
    throw precondition_error("pairing needs complementary degrees");
  DualElement<C> r = dual_act(f, g);
  return r.coeff_of(std::vector<std::int64_t>(g.num_vars(), -1));
}

template <class C>
DualElement<C> dual_partial(const DualElement<C>& g, unsigned i) {
  if (i >= g.num_vars()) throw precondition_error("variable index out of range");
  unsigned nv = g.num_vars();
  unsigned w = keypack::bits_per_var(nv);
  unsigned sh = w * (nv - 1 - i);
  std::uint64_t mask = keypack::max_exponent(nv);
  if (static_cast<std::uint64_t>(-(g.degree() - 1)) > keypack::max_exponent(nv))
    throw precondition_error("dual degree magnitude exceeds packed-exponent bound");
  std::vector<typename DualElement<C>::Term> ts;
  ts.reserve(g.size());
  for (const auto& [k, c] : g.terms()) {
    std::int64_t m = static_cast<std::int64_t>((k >> sh) & mask);
    C v = c * C::from_int(g.spec(), -m);
    if (!v.is_zero()) ts.emplace_back(k + (std::uint64_t{1} << sh), v);
  }
  return DualElement<C>::from_terms(g.spec(), nv, g.degree() - 1, std::move(ts));
}

/* Semilinear Frobenius on the dual: exponents scale by p, phi on coefficients.
   Keys scale without cross-field carries once the new degree fits. */
inline DualElement<Witt2> dual_frobenius(const DualElement<Witt2>& g) {
  const std::uint64_t p = g.spec()->p;
  std::int64_t deg = g.degree() * static_cast<std::int64_t>(p);
  if (static_cast<std::uint64_t>(-deg) > keypack::max_exponent(g.num_vars()))
    throw precondition_error("dual frobenius degree exceeds packed-exponent bound");
  std::vector<DualElement<Witt2>::Term> ts;
  ts.reserve(g.size());
  for (const auto& [k, c] : g.terms()) ts.emplace_back(k * p, c.frobenius());
  return DualElement<Witt2>::from_terms(g.spec(), g.num_vars(), deg, std::move(ts));
}

/* Relabel variable i as perm[i]. */
template <class C>
DualElement<C> dual_permute(const DualElement<C>& g, const std::vector<unsigned>& perm) {
  unsigned nv = g.num_vars();
  if (perm.size() != nv) throw precondition_error("permutation size != variable count");
  std::vector<bool> seen(nv, false);
  for (unsigned v : perm) {
    if (v >= nv || seen[v]) throw precondition_error("not a permutation");
    seen[v] = true;
  }
  std::vector<typename DualElement<C>::Term> ts;
  ts.reserve(g.size());
  std::vector<std::int64_t> e, pe(nv);
  for (const auto& [k, c] : g.terms()) {
    keypack::unpack(nv, k, e);
    for (unsigned i = 0; i < nv; ++i) pe[perm[i]] = e[i];
    ts.emplace_back(keypack::pack(nv, pe), c);
  }
  std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return DualElement<C>::from_terms(g.spec(), nv, g.degree(), std::move(ts));
}

inline DualElement<FieldElement> dual_reduce(const DualElement<Witt2>& g) {
  std::vector<DualElement<FieldElement>::Term> ts;
  for (const auto& [k, c] : g.terms())
    if (!c.a0().is_zero()) ts.emplace_back(k, c.a0());
  return DualElement<FieldElement>::from_terms(g.spec(), g.num_vars(), g.degree(), std::move(ts));
}

template <class C>
DualElement<C> parse_dual(const FieldSpec* s, std::string_view text, int num_vars = -1) {
  auto terms = detail::parse_terms<C>(s, text, num_vars);
  unsigned nv = static_cast<unsigned>(num_vars);
  std::vector<std::int64_t> degrees;
  for (const auto& term : terms) {
    if (term.coeff.is_zero()) continue;
    std::int64_t deg = 0;
    for (auto e : term.exps) {
      if (e > -1)
        throw parse_error("dual monomial needs exponent <= -1 in every variable", 0);
      deg += e;
    }
    bool seen = false;
    for (auto d : degrees) seen |= d == deg;
    if (!seen) degrees.push_back(deg);
  }
  if (degrees.size() > 1) {
    std::sort(degrees.begin(), degrees.end());
    std::string msg = "inhomogeneous dual element, term degrees {";
    for (std::size_t i = 0; i < degrees.size(); ++i)
      msg += (i ? ", " : "") + std::to_string(degrees[i]);
    throw parse_error(msg + "}", 0);
  }
  if (degrees.empty()) {
    // zero element; give it the shallowest valid degree
    return DualElement<C>(s, nv, -static_cast<std::int64_t>(nv));
  }
  DualElement<C> r(s, nv, degrees[0]);
  for (const auto& term : terms) {
    if (term.coeff.is_zero()) continue;
    r = r + DualElement<C>::monomial(s, nv, term.exps, term.coeff);
  }
  return r;
}

/* Coordinates of g on an ordered monomial basis (as from dual_basis). */
template <class C>
std::vector<C> dual_coordinates(const DualElement<C>& g, const std::vector<DualElement<C>>& basis) {
  std::vector<C> out;
  out.reserve(basis.size());
  for (const auto& b : basis) out.push_back(g.coeff_by_key(b.terms().at(0).first));
  return out;
}

template <class C>
DualElement<C> dual_from_coordinates(const std::vector<C>& coords,
                                     const std::vector<DualElement<C>>& basis) {
  if (coords.size() != basis.size()) throw precondition_error("coordinate count != basis size");
  if (basis.empty()) throw precondition_error("empty dual basis");
  DualElement<C> r(basis[0].spec(), basis[0].num_vars(), basis[0].degree());
  for (std::size_t i = 0; i < coords.size(); ++i) r = r + basis[i].scale(coords[i]);
  return r;
}

// -------------------------------------------------------------- linear algebra

using KVec = std::vector<FieldElement>;
using KMat = std::vector<KVec>;
using W2Vec = std::vector<Witt2>;
using W2Mat = std::vector<W2Vec>;

/* In-place reduced row echelon form; returns the pivot columns. */
std::vector<std::size_t> k_rref(KMat& m);

/* Basis of the right kernel of an nrows x ncols matrix, one row per vector. */
KMat k_kernel(const FieldSpec* s, KMat m, std::size_t ncols);

/* One solution of m*x = rhs, or nullopt. */
std::optional<KVec> k_solve(const FieldSpec* s, KMat m, KVec rhs);

/* Generating set of { x : m*x = 0 } as a module over length-2 Witt vectors.
   Reduce mod p, pull kernel vectors back, and repair each lift by solving for
   the p-part correction; p-torsion generators cover what corrections cannot. */
std::vector<W2Vec> howell_kernel(const FieldSpec* s, const W2Mat& m, std::size_t ncols);

/* One solution of m*x = rhs over length-2 Witt vectors, or nullopt. */
std::optional<W2Vec> solve_w2(const FieldSpec* s, const W2Mat& m, const W2Vec& rhs);

W2Vec w2_matvec(const W2Mat& m, const W2Vec& x);

}  // namespace canlift

#endif
