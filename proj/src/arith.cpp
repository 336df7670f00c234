#include "canlift/arith.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace canlift {

namespace {

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (std::uint64_t d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

std::int64_t egcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  std::int64_t x1, y1;
  std::int64_t g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
  std::int64_t x, y;
  std::int64_t g = egcd(static_cast<std::int64_t>(a % m), static_cast<std::int64_t>(m), x, y);
  if (g != 1) throw precondition_error("not invertible modulo " + std::to_string(m));
  std::int64_t r = x % static_cast<std::int64_t>(m);
  if (r < 0) r += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(r);
}

/* Dense univariate arithmetic over F_p, little-endian coefficients.
   Only used for modulus validation and the default-modulus search. */
using UPoly = std::vector<std::uint64_t>;

void utrim(UPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

int udeg(const UPoly& f) { return static_cast<int>(f.size()) - 1; }

UPoly usub(const UPoly& a, const UPoly& b, std::uint64_t p) {
  UPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint64_t x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    r[i] = (x + p - y) % p;
  }
  utrim(r);
  return r;
}

UPoly umod(UPoly a, const UPoly& f, std::uint64_t p) {
  // f need not be monic here; divide through by its leading inverse
  std::uint64_t linv = inv_mod(f.back(), p);
  utrim(a);
  while (udeg(a) >= udeg(f)) {
    std::uint64_t c = a.back() * linv % p;
    std::size_t shift = a.size() - f.size();
    for (std::size_t i = 0; i < f.size(); ++i)
      a[shift + i] = (a[shift + i] + p - c * f[i] % p) % p;
    utrim(a);
  }
  return a;
}

UPoly umulmod(const UPoly& a, const UPoly& b, const UPoly& f, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return umod(std::move(r), f, p);
}

UPoly upowmod(UPoly base, std::uint64_t e, const UPoly& f, std::uint64_t p) {
  UPoly r{1};
  while (e) {
    if (e & 1) r = umulmod(r, base, f, p);
    base = umulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

UPoly ugcd(UPoly a, UPoly b, std::uint64_t p) {
  utrim(a);
  utrim(b);
  while (!b.empty()) {
    UPoly r = umod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/* Monic f of degree n >= 1 is irreducible iff it shares no factor with
   y^{p^i} - y for i = 1..n/2 (those collect all irreducible factors of
   degree dividing i). */
bool is_irreducible(const UPoly& f, std::uint64_t p) {
  int n = udeg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  UPoly y{0, 1};
  UPoly g = y;
  for (int i = 1; i <= n / 2; ++i) {
    g = upowmod(g, p, f, p);
    UPoly d = ugcd(usub(g, y, p), f, p);
    if (udeg(d) > 0) return false;
  }
  return true;
}

using SpecKey = std::tuple<std::uint64_t, unsigned, std::vector<std::uint32_t>>;

std::map<SpecKey, std::unique_ptr<FieldSpec>>& spec_registry() {
  static std::map<SpecKey, std::unique_ptr<FieldSpec>> reg;
  return reg;
}

std::mutex& spec_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const FieldSpec* FieldSpec::get(std::uint64_t p, unsigned n,
                                const std::vector<std::uint32_t>* modulus) {
  if (p < 3 || p >= (1ull << 31) || !is_prime(p))
    throw precondition_error("p must be an odd prime below 2^31, got " + std::to_string(p));
  if (n < 1 || n > kMaxExtDegree)
    throw precondition_error("extension degree n must be in [1, " +
                             std::to_string(kMaxExtDegree) + "], got " + std::to_string(n));

  std::vector<std::uint32_t> mv;
  if (modulus) {
    mv = *modulus;
    if (mv.size() != n + 1 || mv[n] != 1)
      throw precondition_error("modulus must be monic of degree n");
    UPoly f(mv.begin(), mv.end());
    for (auto& c : f) c %= p;
    if (!is_irreducible(f, p)) throw precondition_error("modulus is reducible over F_p");
    for (unsigned i = 0; i <= n; ++i) mv[i] = static_cast<std::uint32_t>(mv[i] % p);
  } else if (n == 1) {
    mv = {0, 1};  // y
  } else {
    // smallest (c_{n-1},...,c_0) in lexicographic order giving an irreducible
    std::uint64_t total = 1;
    for (unsigned i = 0; i < n; ++i) total *= p;
    for (std::uint64_t idx = 0;; ++idx) {
      if (idx >= total) throw crosscheck_error("no irreducible modulus found");
      UPoly f(n + 1, 0);
      f[n] = 1;
      std::uint64_t t = idx;
      for (unsigned i = 0; i < n; ++i) {  // idx = c_{n-1} p^{n-1} + ... + c_0
        f[i] = t % p;
        t /= p;
      }
      if (is_irreducible(f, p)) {
        mv.assign(n + 1, 0);
        for (unsigned i = 0; i <= n; ++i) mv[i] = static_cast<std::uint32_t>(f[i]);
        break;
      }
    }
  }

  std::lock_guard<std::mutex> lk(spec_mutex());
  auto& reg = spec_registry();
  SpecKey key{p, n, mv};
  auto it = reg.find(key);
  if (it != reg.end()) return it->second.get();

  auto s = std::make_unique<FieldSpec>();
  s->p = p;
  s->n = n;
  s->p2 = p * p;
  for (unsigned i = 0; i <= n; ++i) s->mod[i] = mv[i];
  if (n == 1 && p <= (1u << 16)) {
    s->pow_p_tab.resize(p);
    for (std::uint64_t a = 0; a < p; ++a) s->pow_p_tab[a] = s->pow2(a, p);
  }
  const FieldSpec* out = s.get();
  reg.emplace(std::move(key), std::move(s));
  return out;
}

std::uint64_t FieldSpec::q() const {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (r > (1ull << 62) / p) throw precondition_error("p^n too large to enumerate");
    r *= p;
  }
  return r;
}

std::string FieldSpec::modulus_text() const {
  std::string out;
  for (unsigned i = 0; i <= n; ++i) {
    if (i) out += ',';
    out += std::to_string(mod[i]);
  }
  return out;
}

std::uint64_t FieldSpec::rinv(std::uint64_t a) const { return inv_mod(a % p, p); }

std::uint64_t FieldSpec::rpow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = r * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return r;
}

std::uint64_t FieldSpec::inv2(std::uint64_t a) const { return inv_mod(a % p2, p2); }

std::uint64_t FieldSpec::pow2(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t r = 1;
  a %= p2;
  while (e) {
    if (e & 1) r = mul2(r, a);
    a = mul2(a, a);
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------- FieldElement

FieldElement FieldElement::zero(const FieldSpec* s) {
  FieldElement r;
  r.spec_ = s;
  return r;
}

FieldElement FieldElement::one(const FieldSpec* s) { return from_int(s, 1); }

FieldElement FieldElement::from_int(const FieldSpec* s, std::int64_t v) {
  FieldElement r = zero(s);
  std::int64_t m = static_cast<std::int64_t>(s->p);
  std::int64_t t = v % m;
  if (t < 0) t += m;
  r.c_[0] = static_cast<std::uint32_t>(t);
  return r;
}

FieldElement FieldElement::from_coeffs(const FieldSpec* s, const std::vector<std::int64_t>& c) {
  if (c.size() != s->n && c.size() != 1)
    throw precondition_error("coefficient list must have length n (or 1 for a constant)");
  FieldElement r = zero(s);
  std::int64_t m = static_cast<std::int64_t>(s->p);
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::int64_t t = c[i] % m;
    if (t < 0) t += m;
    r.c_[i] = static_cast<std::uint32_t>(t);
  }
  return r;
}

FieldElement FieldElement::from_index(const FieldSpec* s, std::uint64_t idx) {
  FieldElement r = zero(s);
  for (unsigned i = 0; i < s->n; ++i) {
    r.c_[i] = static_cast<std::uint32_t>(idx % s->p);
    idx /= s->p;
  }
  return r;
}

FieldElement FieldElement::generator(const FieldSpec* s) {
  if (s->n < 2) throw precondition_error("generator requires n >= 2");
  FieldElement r = zero(s);
  r.c_[1] = 1;
  return r;
}

std::uint64_t FieldElement::index() const {
  std::uint64_t idx = 0;
  for (unsigned i = spec_->n; i-- > 0;) idx = idx * spec_->p + c_[i];
  return idx;
}

bool FieldElement::is_zero() const {
  for (auto v : c_)
    if (v) return false;
  return true;
}

void FieldElement::check_same(const FieldElement& o) const {
  if (spec_ != o.spec_) throw precondition_error("mismatched field specs");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  FieldElement r = zero(spec_);
  for (unsigned i = 0; i < spec_->n; ++i)
    r.c_[i] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(c_[i]) + o.c_[i]) % spec_->p);
  return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  FieldElement r = zero(spec_);
  for (unsigned i = 0; i < spec_->n; ++i)
    r.c_[i] = static_cast<std::uint32_t>((c_[i] + spec_->p - o.c_[i]) % spec_->p);
  return r;
}

FieldElement FieldElement::operator-() const {
  FieldElement r = zero(spec_);
  for (unsigned i = 0; i < spec_->n; ++i)
    r.c_[i] = c_[i] ? static_cast<std::uint32_t>(spec_->p - c_[i]) : 0;
  return r;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  const unsigned n = spec_->n;
  const std::uint64_t p = spec_->p;
  if (n == 1) {
    FieldElement r = zero(spec_);
    r.c_[0] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(c_[0]) * o.c_[0] % p);
    return r;
  }
  std::array<std::uint64_t, 2 * kMaxExtDegree - 1> v{};
  for (unsigned i = 0; i < n; ++i) {
    if (!c_[i]) continue;
    for (unsigned j = 0; j < n; ++j)
      v[i + j] = (v[i + j] + static_cast<std::uint64_t>(c_[i]) * o.c_[j]) % p;
  }
  for (unsigned k = 2 * n - 2; k >= n; --k) {
    std::uint64_t c = v[k];
    if (!c) continue;
    v[k] = 0;
    for (unsigned j = 0; j < n; ++j)
      v[k - n + j] = (v[k - n + j] + p * p - c * spec_->mod[j] % p) % p;
  }
  FieldElement r = zero(spec_);
  for (unsigned i = 0; i < n; ++i) r.c_[i] = static_cast<std::uint32_t>(v[i]);
  return r;
}

FieldElement FieldElement::inv() const {
  if (is_zero()) throw precondition_error("division by zero in F_{p^n}");
  const std::uint64_t p = spec_->p;
  if (spec_->n == 1) {
    FieldElement r = zero(spec_);
    r.c_[0] = static_cast<std::uint32_t>(spec_->rinv(c_[0]));
    return r;
  }
  // extended Euclid in F_p[y] against the modulus
  UPoly a(spec_->mod.begin(), spec_->mod.begin() + spec_->n + 1);
  UPoly b(c_.begin(), c_.begin() + spec_->n);
  utrim(b);
  UPoly s0{}, s1{1};  // coefficients of b in the running combinations
  while (udeg(b) > 0) {
    std::uint64_t linv = inv_mod(b.back(), p);
    UPoly quot;  // a = quot*b + rem
    UPoly rem = a;
    utrim(rem);
    quot.assign(rem.size() > b.size() ? rem.size() - b.size() + 1 : 1, 0);
    while (udeg(rem) >= udeg(b)) {
      std::uint64_t c = rem.back() * linv % p;
      std::size_t shift = rem.size() - b.size();
      quot[shift] = c;
      for (std::size_t i = 0; i < b.size(); ++i)
        rem[shift + i] = (rem[shift + i] + p - c * b[i] % p) % p;
      utrim(rem);
    }
    utrim(quot);
    // (a, b) <- (b, rem); (s0, s1) <- (s1, s0 - quot*s1)
    UPoly qs(quot.size() + s1.size(), 0);
    if (!quot.empty() && !s1.empty()) {
      qs.assign(quot.size() + s1.size() - 1, 0);
      for (std::size_t i = 0; i < quot.size(); ++i)
        for (std::size_t j = 0; j < s1.size(); ++j)
          qs[i + j] = (qs[i + j] + quot[i] * s1[j]) % p;
    } else {
      qs.clear();
    }
    UPoly ns = usub(s0, qs, p);
    a = std::move(b);
    b = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(ns);
  }
  if (b.empty()) throw crosscheck_error("gcd with irreducible modulus was not constant");
  std::uint64_t scale = inv_mod(b[0], p);
  FieldElement r = zero(spec_);
  for (std::size_t i = 0; i < s1.size() && i < spec_->n; ++i)
    r.c_[i] = static_cast<std::uint32_t>(s1[i] * scale % p);
  return r;
}

FieldElement FieldElement::pow(std::uint64_t e) const {
  FieldElement r = one(spec_);
  FieldElement b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

FieldElement FieldElement::frobenius_inv() const {
  FieldElement r = *this;
  for (unsigned i = 1; i < spec_->n; ++i) r = r.frobenius();
  return r;
}

bool FieldElement::operator==(const FieldElement& o) const {
  if (spec_ != o.spec_) return false;
  return c_ == o.c_;
}

std::string FieldElement::str() const {
  std::string out = std::to_string(c_[0]);
  for (unsigned i = 1; i < spec_->n; ++i) out += "," + std::to_string(c_[i]);
  return out;
}

FieldElement field_from_string(const FieldSpec* s, std::string_view text) {
  std::vector<std::int64_t> coeffs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view piece = text.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(std::string(piece), &used);
      if (used != piece.size()) throw std::invalid_argument("");
      coeffs.push_back(v);
    } catch (const std::exception&) {
      throw parse_error("expected integer in field element", pos);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return FieldElement::from_coeffs(s, coeffs);
}

// ---------------------------------------------------------------------- Witt2

Witt2::Witt2(const FieldElement& a0, const FieldElement& a1) : a0_(a0), a1_(a1) {
  if (a0.spec() != a1.spec()) throw precondition_error("mismatched field specs");
}

Witt2 Witt2::zero(const FieldSpec* s) { return {FieldElement::zero(s), FieldElement::zero(s)}; }
Witt2 Witt2::one(const FieldSpec* s) { return {FieldElement::one(s), FieldElement::zero(s)}; }
Witt2 Witt2::teichmuller(const FieldElement& a) { return {a, FieldElement::zero(a.spec())}; }
Witt2 Witt2::times_p(const FieldElement& a) { return {FieldElement::zero(a.spec()), a.frobenius()}; }

Witt2 Witt2::from_int(const FieldSpec* s, std::int64_t v) {
  std::int64_t m = static_cast<std::int64_t>(s->p2);
  std::int64_t t = v % m;
  if (t < 0) t += m;
  std::uint64_t r = static_cast<std::uint64_t>(t);
  std::uint64_t a0 = r % s->p;
  std::uint64_t h = s->pow2(a0, s->p);
  std::uint64_t a1 = s->sub2(r, h) / s->p;
  return {FieldElement::from_int(s, static_cast<std::int64_t>(a0)),
          FieldElement::from_int(s, static_cast<std::int64_t>(a1))};
}

std::uint64_t witt_prime_iso(const Witt2& x) {
  const FieldSpec* s = x.spec();
  if (s->n != 1) throw precondition_error("witt_prime_iso requires n = 1");
  return s->add2(s->pow_p2(x.a0().coeff(0)), s->p * x.a1().coeff(0) % s->p2);
}

Witt2 witt_from_residue(const FieldSpec* s, std::uint64_t r) {
  if (s->n != 1) throw precondition_error("witt_from_residue requires n = 1");
  r %= s->p2;
  std::uint64_t a0 = r % s->p;
  std::uint64_t a1 = s->sub2(r, s->pow_p2(a0)) / s->p;
  return {FieldElement::from_int(s, static_cast<std::int64_t>(a0)),
          FieldElement::from_int(s, static_cast<std::int64_t>(a1))};
}

FieldElement witt_div_p(const Witt2& x) {
  if (!x.a0().is_zero()) throw precondition_error("witt_div_p requires a0 = 0");
  return x.a1().frobenius_inv();
}

namespace detail {

Witt2 witt_add_formula(const Witt2& x, const Witt2& y) {
  const FieldSpec* s = x.spec();
  FieldElement a0 = x.a0() + y.a0();
  FieldElement a1 = x.a1() + y.a1();
  if (!x.a0().is_zero() && !y.a0().is_zero()) {
    // carry term: sum_{i=1}^{p-1} c_i x0^i y0^{p-i} with c_i = (-1)^{i-1}/i mod p
    const std::uint64_t p = s->p;
    FieldElement acc = FieldElement::zero(s);
    FieldElement apow = x.a0();
    FieldElement binv = y.a0().inv();
    FieldElement bpow = y.a0().pow(p - 1);
    for (std::uint64_t i = 1; i < p; ++i) {
      std::uint64_t ci = s->rinv(i);
      if (i % 2 == 0) ci = p - ci;
      acc = acc + apow * bpow * FieldElement::from_int(s, static_cast<std::int64_t>(ci));
      apow = apow * x.a0();
      bpow = bpow * binv;
    }
    a1 = a1 - acc;
  }
  return {a0, a1};
}

Witt2 witt_mul_formula(const Witt2& x, const Witt2& y) {
  return {x.a0() * y.a0(), x.a0().frobenius() * y.a1() + x.a1() * y.a0().frobenius()};
}

}  // namespace detail

Witt2 Witt2::operator+(const Witt2& o) const {
  if (spec() != o.spec()) throw precondition_error("mismatched field specs");
  if (spec()->n == 1)
    return witt_from_residue(spec(), spec()->add2(witt_prime_iso(*this), witt_prime_iso(o)));
  return detail::witt_add_formula(*this, o);
}

Witt2 Witt2::operator-() const { return {-a0_, -a1_}; }  // valid for odd p

Witt2 Witt2::operator-(const Witt2& o) const { return *this + (-o); }

Witt2 Witt2::operator*(const Witt2& o) const {
  if (spec() != o.spec()) throw precondition_error("mismatched field specs");
  if (spec()->n == 1)
    return witt_from_residue(spec(), spec()->mul2(witt_prime_iso(*this), witt_prime_iso(o)));
  return detail::witt_mul_formula(*this, o);
}

Witt2 Witt2::inv() const {
  if (!is_unit()) throw precondition_error("Witt2 element is not a unit");
  if (spec()->n == 1) return witt_from_residue(spec(), spec()->inv2(witt_prime_iso(*this)));
  FieldElement b0 = a0_.inv();
  FieldElement fp = b0.frobenius();  // a0^{-p}
  return {b0, -(a1_ * fp * fp)};
}

Witt2 Witt2::pow(std::uint64_t e) const {
  Witt2 r = one(spec());
  Witt2 b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

Witt2 Witt2::frobenius() const { return {a0_.frobenius(), a1_.frobenius()}; }

std::string Witt2::str() const { return "(" + a0_.str() + "|" + a1_.str() + ")"; }

Witt2 witt_from_string(const FieldSpec* s, std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && text[b] == ' ') ++b;
  while (e > b && text[e - 1] == ' ') --e;
  std::string_view t = text.substr(b, e - b);
  if (t.empty()) throw parse_error("empty Witt literal", b);
  if (t.front() != '(') {
    // bare integer: image of that integer in W2
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(std::string(t), &used);
      if (used != t.size()) throw std::invalid_argument("");
      return Witt2::from_int(s, v);
    } catch (const std::exception&) {
      throw parse_error("expected Witt literal \"(a0|a1)\" or integer", b);
    }
  }
  if (t.back() != ')') throw parse_error("unterminated Witt literal", e - 1);
  std::string_view inner = t.substr(1, t.size() - 2);
  std::size_t bar = inner.find('|');
  if (bar == std::string_view::npos) throw parse_error("Witt literal needs \"|\"", b);
  FieldElement a0 = field_from_string(s, inner.substr(0, bar));
  FieldElement a1 = field_from_string(s, inner.substr(bar + 1));
  return {a0, a1};
}

}  // namespace canlift
