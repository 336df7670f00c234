#ifndef CANLIFT_POLY_HPP
#define CANLIFT_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "canlift/arith.hpp"

namespace canlift {

/* Exponent vectors are packed into one 64-bit key, variable 0 in the most
   significant field, so key order on homogeneous terms is lex order. The
   field width is fixed per variable count; constructions validate that the
   total degree (or |degree| for dual monomials) fits a field. */
namespace keypack {

inline unsigned bits_per_var(unsigned nv) {
  unsigned w = 64 / nv;
  return w > 32 ? 32 : w;
}

inline std::uint64_t max_exponent(unsigned nv) {
  return (std::uint64_t{1} << bits_per_var(nv)) - 1;
}

inline std::uint64_t pack(unsigned nv, const std::vector<std::int64_t>& e) {
  unsigned w = bits_per_var(nv);
  std::uint64_t key = 0;
  for (unsigned i = 0; i < nv; ++i) key = (key << w) | static_cast<std::uint64_t>(e[i]);
  return key;
}

inline void unpack(unsigned nv, std::uint64_t key, std::vector<std::int64_t>& out) {
  unsigned w = bits_per_var(nv);
  std::uint64_t mask = max_exponent(nv);
  out.resize(nv);
  for (unsigned i = nv; i-- > 0;) {
    out[i] = static_cast<std::int64_t>(key & mask);
    key >>= w;
  }
}

}  // namespace keypack

namespace detail {

/* Shared product-merge core. Ops supplies coefficient arithmetic so the same
   code serves ring elements and the Z/p² residue fast path. */
template <class V, class Ops>
std::vector<std::pair<std::uint64_t, V>> merge_product(
    const std::vector<std::pair<std::uint64_t, V>>& a,
    const std::vector<std::pair<std::uint64_t, V>>& b, const Ops& ops) {
  std::vector<std::pair<std::uint64_t, V>> out;
  if (a.empty() || b.empty()) return out;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& big = a.size() <= b.size() ? b : a;

  if (small.size() <= 32) {
    // cursor merge: one sorted stream per term of the small factor
    std::vector<std::size_t> cur(small.size(), 0);
    out.reserve(big.size() + big.size() / 2);
    for (;;) {
      std::uint64_t best = 0;
      bool any = false;
      for (std::size_t i = 0; i < small.size(); ++i) {
        if (cur[i] >= big.size()) continue;
        std::uint64_t k = small[i].first + big[cur[i]].first;
        if (!any || k > best) {
          best = k;
          any = true;
        }
      }
      if (!any) break;
      bool have = false;
      V acc{};
      for (std::size_t i = 0; i < small.size(); ++i) {
        while (cur[i] < big.size() && small[i].first + big[cur[i]].first == best) {
          V prod = ops.mul(small[i].second, big[cur[i]].second);
          acc = have ? ops.add(acc, prod) : prod;
          have = true;
          ++cur[i];
        }
      }
      if (have && !ops.is_zero(acc)) out.emplace_back(best, acc);
    }
    return out;
  }

  std::unordered_map<std::uint64_t, V> accum;
  accum.reserve(big.size() * 2);
  for (const auto& [ka, ca] : small)
    for (const auto& [kb, cb] : big) {
      V prod = ops.mul(ca, cb);
      auto [it, fresh] = accum.emplace(ka + kb, prod);
      if (!fresh) it->second = ops.add(it->second, prod);
    }
  out.reserve(accum.size());
  for (auto& [k, v] : accum)
    if (!ops.is_zero(v)) out.emplace_back(k, std::move(v));
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  return out;
}

template <class C>
struct RingOps {
  C mul(const C& a, const C& b) const { return a * b; }
  C add(const C& a, const C& b) const { return a + b; }
  bool is_zero(const C& a) const { return a.is_zero(); }
};

struct ResidueOps {
  const FieldSpec* s;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return s->mul2(a, b); }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return s->add2(a, b); }
  bool is_zero(std::uint64_t a) const { return a == 0; }
};

std::string format_monomial(unsigned nv, const std::vector<std::int64_t>& exps);

}  // namespace detail

/* Sparse homogeneous polynomial in nv = N+1 variables with coefficients in
   F_{p^n} or W₂(F_{p^n}). Terms are kept sorted by descending packed key,
   i.e. lex order with x0 dominant. */
template <class C>
class HomogPoly {
 public:
  using Term = std::pair<std::uint64_t, C>;

  HomogPoly() = default;

  HomogPoly(const FieldSpec* s, unsigned nv, std::int64_t degree)
      : spec_(s), nv_(nv), deg_(degree) {
    validate();
  }

  static HomogPoly monomial(const FieldSpec* s, unsigned nv,
                            const std::vector<std::int64_t>& exps, const C& coeff) {
    std::int64_t deg = 0;
    for (auto e : exps) {
      if (e < 0) throw precondition_error("negative exponent in homogeneous polynomial");
      deg += e;
    }
    HomogPoly r(s, nv, deg);
    if (exps.size() != nv) throw precondition_error("exponent vector has wrong length");
    if (!coeff.is_zero()) r.terms_.emplace_back(keypack::pack(nv, exps), coeff);
    return r;
  }

  static HomogPoly one(const FieldSpec* s, unsigned nv) {
    return monomial(s, nv, std::vector<std::int64_t>(nv, 0), C::one(s));
  }

  static HomogPoly variable(const FieldSpec* s, unsigned nv, unsigned i) {
    std::vector<std::int64_t> e(nv, 0);
    e[i] = 1;
    return monomial(s, nv, e, C::one(s));
  }

  const FieldSpec* spec() const { return spec_; }
  unsigned num_vars() const { return nv_; }
  std::int64_t degree() const { return deg_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::vector<std::int64_t> exponents(std::uint64_t key) const {
    std::vector<std::int64_t> e;
    keypack::unpack(nv_, key, e);
    return e;
  }

  C coeff_of(const std::vector<std::int64_t>& exps) const {
    std::uint64_t key = keypack::pack(nv_, exps);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term& t, std::uint64_t k) { return t.first > k; });
    if (it != terms_.end() && it->first == key) return it->second;
    return C::zero(spec_);
  }

  HomogPoly operator+(const HomogPoly& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    check_compatible(o);
    if (deg_ != o.deg_) throw precondition_error("degree mismatch in polynomial sum");
    HomogPoly r(spec_, nv_, deg_);
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j >= o.terms_.size() || (i < terms_.size() && terms_[i].first > o.terms_[j].first)) {
        r.terms_.push_back(terms_[i++]);
      } else if (i >= terms_.size() || o.terms_[j].first > terms_[i].first) {
        r.terms_.push_back(o.terms_[j++]);
      } else {
        C c = terms_[i].second + o.terms_[j].second;
        if (!c.is_zero()) r.terms_.emplace_back(terms_[i].first, c);
        ++i;
        ++j;
      }
    }
    return r;
  }

  HomogPoly operator-() const {
    HomogPoly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  HomogPoly operator-(const HomogPoly& o) const { return *this + (-o); }

  HomogPoly scale(const C& c) const {
    HomogPoly r(spec_, nv_, deg_);
    if (c.is_zero()) return r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      C v = t.second * c;
      if (!v.is_zero()) r.terms_.emplace_back(t.first, v);
    }
    return r;
  }

  HomogPoly operator*(const HomogPoly& o) const {
    check_compatible(o);
    HomogPoly r(spec_, nv_, deg_ + o.deg_);
    if (is_zero() || o.is_zero()) return r;
    if constexpr (std::is_same_v<C, Witt2>) {
      if (spec_->n == 1) {
        // W₂(F_p) ≅ Z/p²: run the merge on plain residues
        auto conv = [&](const std::vector<Term>& ts) {
          std::vector<std::pair<std::uint64_t, std::uint64_t>> v;
          v.reserve(ts.size());
          for (const auto& t : ts) v.emplace_back(t.first, witt_prime_iso(t.second));
          return v;
        };
        auto merged =
            detail::merge_product(conv(terms_), conv(o.terms_), detail::ResidueOps{spec_});
        r.terms_.reserve(merged.size());
        for (const auto& [k, v] : merged) r.terms_.emplace_back(k, witt_from_residue(spec_, v));
        return r;
      }
    }
    r.terms_ = detail::merge_product(terms_, o.terms_, detail::RingOps<C>{});
    return r;
  }

  bool operator==(const HomogPoly& o) const {
    if (is_zero() && o.is_zero()) return spec_ == o.spec_ && nv_ == o.nv_;
    return spec_ == o.spec_ && nv_ == o.nv_ && deg_ == o.deg_ && terms_ == o.terms_;
  }
  bool operator!=(const HomogPoly& o) const { return !(*this == o); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    std::vector<std::int64_t> e;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      keypack::unpack(nv_, k, e);
      std::string mono = detail::format_monomial(nv_, e);
      if (c == C::one(spec_) && !mono.empty())
        out += mono;
      else
        out += c.str() + (mono.empty() ? "" : "*" + mono);
    }
    return out;
  }

  /* Internal: adopt a pre-sorted, combined, zero-free term vector. */
  static HomogPoly from_terms(const FieldSpec* s, unsigned nv, std::int64_t deg,
                              std::vector<Term> ts) {
    HomogPoly r(s, nv, deg);
    r.terms_ = std::move(ts);
    return r;
  }

 private:
  const FieldSpec* spec_ = nullptr;
  unsigned nv_ = 0;
  std::int64_t deg_ = 0;
  std::vector<Term> terms_;

  void validate() const {
    if (!spec_ || nv_ == 0) throw precondition_error("polynomial needs a field spec and variables");
    if (deg_ < 0) throw precondition_error("homogeneous degree must be nonnegative");
    if (static_cast<std::uint64_t>(deg_) > keypack::max_exponent(nv_))
      throw precondition_error("degree " + std::to_string(deg_) + " exceeds packed-exponent bound " +
                               std::to_string(keypack::max_exponent(nv_)) + " for " +
                               std::to_string(nv_) + " variables");
  }

  void check_compatible(const HomogPoly& o) const {
    if (spec_ != o.spec_) throw precondition_error("mismatched field specs");
    if (nv_ != o.nv_) throw precondition_error("mismatched variable counts");
  }
};

template <class C>
HomogPoly<C> poly_mul(const HomogPoly<C>& a, const HomogPoly<C>& b) {
  return a * b;
}

/* m-th power by iterated multiplication: one factor stays at base size, which
   is what keeps large sparse powers affordable. */
template <class C>
HomogPoly<C> poly_pow(const HomogPoly<C>& f, std::uint64_t m) {
  HomogPoly<C> r = HomogPoly<C>::one(f.spec(), f.num_vars());
  for (std::uint64_t i = 0; i < m; ++i) r = r * f;
  return r;
}

template <class C>
HomogPoly<C> poly_partial(const HomogPoly<C>& f, unsigned i) {
  std::int64_t deg = f.degree() > 0 ? f.degree() - 1 : 0;
  std::vector<typename HomogPoly<C>::Term> ts;
  ts.reserve(f.size());
  unsigned w = keypack::bits_per_var(f.num_vars());
  unsigned shift = w * (f.num_vars() - 1 - i);
  std::uint64_t mask = keypack::max_exponent(f.num_vars());
  for (const auto& [k, c] : f.terms()) {
    std::int64_t e = static_cast<std::int64_t>((k >> shift) & mask);
    if (e == 0) continue;
    C v = c * C::from_int(f.spec(), e);
    if (!v.is_zero()) ts.emplace_back(k - (std::uint64_t{1} << shift), v);
  }
  return HomogPoly<C>::from_terms(f.spec(), f.num_vars(), deg, std::move(ts));
}

/* Frobenius pullback F*: x_i ↦ x_i^p on exponents, φ on coefficients. */
inline HomogPoly<Witt2> poly_frobenius_pullback(const HomogPoly<Witt2>& f) {
  const std::uint64_t p = f.spec()->p;
  std::int64_t deg = f.degree() * static_cast<std::int64_t>(p);
  if (static_cast<std::uint64_t>(deg) > keypack::max_exponent(f.num_vars()))
    throw precondition_error("frobenius pullback degree exceeds packed-exponent bound");
  std::vector<HomogPoly<Witt2>::Term> ts;
  ts.reserve(f.size());
  // per-field multiply by p cannot carry across fields once the degree fits
  for (const auto& [k, c] : f.terms()) ts.emplace_back(k * p, c.frobenius());
  return HomogPoly<Witt2>::from_terms(f.spec(), f.num_vars(), deg, std::move(ts));
}

inline HomogPoly<FieldElement> poly_reduce(const HomogPoly<Witt2>& f) {
  std::vector<HomogPoly<FieldElement>::Term> ts;
  ts.reserve(f.size());
  for (const auto& [k, c] : f.terms())
    if (!c.a0().is_zero()) ts.emplace_back(k, c.a0());
  return HomogPoly<FieldElement>::from_terms(f.spec(), f.num_vars(), f.degree(), std::move(ts));
}

// ------------------------------------------------------------------- parsing

namespace detail {

template <class C>
struct ParsedTerm {
  std::vector<std::int64_t> exps;
  C coeff;
};

inline void skip_ws(std::string_view t, std::size_t& i) {
  while (i < t.size() && (t[i] == ' ' || t[i] == '\t' || t[i] == '\n')) ++i;
}

inline std::int64_t parse_int(std::string_view t, std::size_t& i) {
  std::size_t start = i;
  bool neg = false;
  if (i < t.size() && (t[i] == '-' || t[i] == '+')) {
    neg = t[i] == '-';
    ++i;
  }
  if (i >= t.size() || t[i] < '0' || t[i] > '9') throw parse_error("expected integer", start);
  std::int64_t v = 0;
  while (i < t.size() && t[i] >= '0' && t[i] <= '9') {
    if (v > (INT64_MAX - 9) / 10) throw parse_error("integer literal too large", start);
    v = v * 10 + (t[i] - '0');
    ++i;
  }
  return neg ? -v : v;
}

inline std::vector<std::int64_t> parse_int_list(std::string_view t, std::size_t& i) {
  std::vector<std::int64_t> v;
  v.push_back(parse_int(t, i));
  while (i < t.size() && t[i] == ',') {
    ++i;
    v.push_back(parse_int(t, i));
  }
  return v;
}

/* Coefficient literal starting at '(': "(c0,c1)" over k, "(a0|a1)" over W2. */
inline FieldElement parse_paren_coeff(const FieldSpec* s, std::string_view t, std::size_t& i,
                                      FieldElement*) {
  std::size_t open = i;
  ++i;
  skip_ws(t, i);
  auto c = parse_int_list(t, i);
  skip_ws(t, i);
  if (i >= t.size() || t[i] != ')') throw parse_error("unterminated coefficient literal", open);
  ++i;
  return FieldElement::from_coeffs(s, c);
}

inline Witt2 parse_paren_coeff(const FieldSpec* s, std::string_view t, std::size_t& i, Witt2*) {
  std::size_t open = i;
  ++i;
  skip_ws(t, i);
  auto c0 = parse_int_list(t, i);
  skip_ws(t, i);
  if (i >= t.size() || t[i] != '|')
    throw parse_error("Witt coefficient literal needs \"|\"", open);
  ++i;
  skip_ws(t, i);
  auto c1 = parse_int_list(t, i);
  skip_ws(t, i);
  if (i >= t.size() || t[i] != ')') throw parse_error("unterminated coefficient literal", open);
  ++i;
  return Witt2(FieldElement::from_coeffs(s, c0), FieldElement::from_coeffs(s, c1));
}

/* poly := term (('+'|'-') term)* ; term := [coeff '*'] factor ('*' factor)*
   factor := 'x' index ['^' exponent] ; a bare coeff is a constant term. */
template <class C>
std::vector<ParsedTerm<C>> parse_terms(const FieldSpec* s, std::string_view t, int& num_vars) {
  std::vector<ParsedTerm<C>> out;
  std::size_t i = 0;
  skip_ws(t, i);
  if (i >= t.size()) throw parse_error("empty polynomial", i);
  bool first = true;
  int max_index = -1;
  std::vector<std::pair<unsigned, std::int64_t>> factors;
  while (i < t.size()) {
    bool neg = false;
    if (!first) {
      if (t[i] == '+') {
        ++i;
      } else if (t[i] == '-') {
        neg = true;
        ++i;
      } else {
        throw parse_error("expected '+' or '-' between terms", i);
      }
      skip_ws(t, i);
    } else if (t[i] == '-') {
      neg = true;
      ++i;
      skip_ws(t, i);
    }
    first = false;

    C coeff = C::one(s);
    bool have_coeff = false;
    if (i < t.size() && t[i] == '(') {
      coeff = parse_paren_coeff(s, t, i, static_cast<C*>(nullptr));
      have_coeff = true;
    } else if (i < t.size() && t[i] >= '0' && t[i] <= '9') {
      coeff = C::from_int(s, parse_int(t, i));
      have_coeff = true;
    }
    skip_ws(t, i);
    bool star_after_coeff = false;
    if (have_coeff && i < t.size() && t[i] == '*') {
      star_after_coeff = true;
      ++i;
      skip_ws(t, i);
    }

    factors.clear();
    while (i < t.size() && t[i] == 'x') {
      ++i;
      std::size_t at = i;
      std::int64_t idx = parse_int(t, i);
      if (idx < 0 || idx > 63) throw parse_error("variable index out of range", at);
      std::int64_t e = 1;
      if (i < t.size() && t[i] == '^') {
        ++i;
        e = parse_int(t, i);
      }
      factors.emplace_back(static_cast<unsigned>(idx), e);
      max_index = std::max<int>(max_index, static_cast<int>(idx));
      skip_ws(t, i);
      if (i < t.size() && t[i] == '*') {
        ++i;
        skip_ws(t, i);
        if (i >= t.size() || t[i] != 'x') throw parse_error("expected variable after '*'", i);
      }
    }
    if (!have_coeff && factors.empty())
      throw parse_error("expected coefficient or variable", i);
    if (star_after_coeff && factors.empty())
      throw parse_error("expected variable after '*'", i);

    ParsedTerm<C> term;
    term.coeff = neg ? -coeff : coeff;
    term.exps.assign(64, 0);
    for (auto [v, e] : factors) term.exps[v] += e;
    out.push_back(std::move(term));
    skip_ws(t, i);
  }

  if (num_vars < 0) {
    num_vars = max_index + 1;
    if (num_vars <= 0) num_vars = 1;
  } else if (max_index >= num_vars) {
    throw parse_error("variable index " + std::to_string(max_index) + " outside the declared " +
                          std::to_string(num_vars) + " variables",
                      0);
  }
  for (auto& term : out) term.exps.resize(static_cast<std::size_t>(num_vars));
  return out;
}

}  // namespace detail

template <class C>
HomogPoly<C> parse_poly(const FieldSpec* s, std::string_view text, int num_vars = -1) {
  auto terms = detail::parse_terms<C>(s, text, num_vars);
  unsigned nv = static_cast<unsigned>(num_vars);
  std::vector<std::int64_t> degrees;
  for (const auto& term : terms) {
    if (term.coeff.is_zero()) continue;
    std::int64_t deg = 0;
    for (auto e : term.exps) {
      if (e < 0)
        throw parse_error("negative exponent in polynomial (dual elements parse separately)", 0);
      deg += e;
    }
    bool seen = false;
    for (auto d : degrees) seen |= d == deg;
    if (!seen) degrees.push_back(deg);
  }
  if (degrees.size() > 1) {
    std::sort(degrees.begin(), degrees.end());
    std::string msg = "inhomogeneous polynomial, term degrees {";
    for (std::size_t i = 0; i < degrees.size(); ++i)
      msg += (i ? ", " : "") + std::to_string(degrees[i]);
    throw parse_error(msg + "}", 0);
  }
  HomogPoly<C> r(s, nv, degrees.empty() ? 0 : degrees[0]);
  for (const auto& term : terms) {
    if (term.coeff.is_zero()) continue;
    r = r + HomogPoly<C>::monomial(s, nv, term.exps, term.coeff);
  }
  return r;
}

}  // namespace canlift

#endif
