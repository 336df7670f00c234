#include "canlift/dwork.hpp"

#include <algorithm>
#include <numeric>

namespace canlift {

namespace {

using Int = HDPoly::Int;

Int int_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  Int r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

std::uint64_t int_mod(const Int& v, std::uint64_t m) {
  Int r = v % static_cast<std::int64_t>(m);
  if (r < 0) r += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(r);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * a % m);
    a = static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * a % m);
    e >>= 1;
  }
  return r;
}

void require_tame(const FieldSpec* s, int N) {
  if ((static_cast<std::uint64_t>(N) + 1) % s->p == 0)
    throw precondition_error("p divides N+1; the Dwork family has no smooth members");
}

const Witt2& require_eta(const DworkParams& dp) {
  if (!dp.eta) throw precondition_error("operation needs a lifted parameter eta");
  return *dp.eta;
}

}  // namespace

DworkParams DworkParams::base(const FieldSpec* s, int N, const FieldElement& lambda) {
  if (!s) throw precondition_error("null field spec");
  if (N < 2) throw precondition_error("Dwork family needs N >= 2");
  if (lambda.spec() != s) throw precondition_error("lambda lives in a different field");
  DworkParams dp;
  dp.spec = s;
  dp.N = N;
  dp.lambda = lambda;
  return dp;
}

DworkParams DworkParams::lifted(const FieldSpec* s, int N, const Witt2& eta) {
  DworkParams dp = base(s, N, eta.reduce());
  dp.eta = eta;
  return dp;
}

HDPoly::HDPoly(int M, int P, std::vector<Int> coeffs) : m_(M), p_(P), c_(std::move(coeffs)) {
  if (M < 2 || P < 0) throw precondition_error("HDPoly needs M >= 2 and P >= 0");
  if (c_.size() != static_cast<std::size_t>(P / M) + 1)
    throw precondition_error("HDPoly coefficient count does not match floor(P/M)+1");
}

Int HDPoly::eval_int(const Int& x) const {
  Int xm = 1;
  for (int i = 0; i < m_; ++i) xm *= x;
  Int acc = 0, pw = 1;
  for (const Int& c : c_) {
    acc += c * pw;
    pw *= xm;
  }
  return acc;
}

FieldElement HDPoly::eval_k(const FieldSpec* s, const FieldElement& x) const {
  FieldElement xm = x.pow(static_cast<std::uint64_t>(m_));
  FieldElement acc = FieldElement::zero(s), pw = FieldElement::one(s);
  for (const Int& c : c_) {
    acc = acc + FieldElement::from_int(s, static_cast<std::int64_t>(int_mod(c, s->p))) * pw;
    pw = pw * xm;
  }
  return acc;
}

Witt2 HDPoly::eval_w2(const FieldSpec* s, const Witt2& x) const {
  Witt2 xm = x.pow(static_cast<std::uint64_t>(m_));
  Witt2 acc = Witt2::zero(s), pw = Witt2::one(s);
  for (const Int& c : c_) {
    acc = acc + Witt2::from_int(s, static_cast<std::int64_t>(int_mod(c, s->p2))) * pw;
    pw = pw * xm;
  }
  return acc;
}

std::string HDPoly::str() const {
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0 && c_.size() > 1) continue;
    std::string mag = Int(boost::multiprecision::abs(c_[i])).str();
    if (out.empty())
      out += (c_[i] < 0 ? "-" : "") + mag;
    else
      out += (c_[i] < 0 ? " - " : " + ") + mag;
    if (i > 0) out += "*X^" + std::to_string(static_cast<std::size_t>(m_) * i);
  }
  if (out.empty()) out = "0";
  return out;
}

std::string HDPoly::str_mod(std::uint64_t p) const {
  std::uint64_t p2 = p * p;
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    std::uint64_t r = int_mod(c_[i], p2);
    if (r == 0 && c_.size() > 1) continue;
    if (!out.empty()) out += " + ";
    out += std::to_string(r);
    if (i > 0) out += "*X^" + std::to_string(static_cast<std::size_t>(m_) * i);
  }
  if (out.empty()) out = "0";
  return out + " (mod " + std::to_string(p2) + ")";
}

HDPoly hd_def(int M, int P) {
  if (M < 2 || P < 0) throw precondition_error("hd_def needs M >= 2 and P >= 0");
  std::vector<Int> c;
  for (int i = 0; M * i <= P; ++i) {
    Int term = 1;
    for (int j = 0; j < M; ++j) term *= int_binom(P - static_cast<std::int64_t>(j) * i, i);
    Int sign_pow = 1;
    for (int j = 0; j < P - M * i; ++j) sign_pow *= -M;
    c.push_back(sign_pow * term);
  }
  return HDPoly(M, P, std::move(c));
}

HomogPoly<FieldElement> dwork_poly_k(const DworkParams& dp) {
  unsigned nv = static_cast<unsigned>(dp.N) + 1;
  HomogPoly<FieldElement> f(dp.spec, nv, nv);
  for (unsigned i = 0; i < nv; ++i) {
    std::vector<std::int64_t> e(nv, 0);
    e[i] = nv;
    f = f + HomogPoly<FieldElement>::monomial(dp.spec, nv, e, dp.lambda);
  }
  return f + HomogPoly<FieldElement>::monomial(
                 dp.spec, nv, std::vector<std::int64_t>(nv, 1),
                 FieldElement::from_int(dp.spec, -static_cast<std::int64_t>(nv)));
}

HomogPoly<Witt2> dwork_poly_w2(const DworkParams& dp) {
  const Witt2& eta = require_eta(dp);
  unsigned nv = static_cast<unsigned>(dp.N) + 1;
  HomogPoly<Witt2> f(dp.spec, nv, nv);
  for (unsigned i = 0; i < nv; ++i) {
    std::vector<std::int64_t> e(nv, 0);
    e[i] = nv;
    f = f + HomogPoly<Witt2>::monomial(dp.spec, nv, e, eta);
  }
  return f + HomogPoly<Witt2>::monomial(
                 dp.spec, nv, std::vector<std::int64_t>(nv, 1),
                 Witt2::from_int(dp.spec, -static_cast<std::int64_t>(nv)));
}

Witt2 hd_coeff_oracle(const DworkParams& dp, int P) {
  if (P < 0) throw precondition_error("hd_coeff_oracle needs P >= 0");
  auto fp = poly_pow(dwork_poly_w2(dp), static_cast<std::uint64_t>(P));
  return fp.coeff_of(std::vector<std::int64_t>(static_cast<std::size_t>(dp.N) + 1, P));
}

Witt2 harmonic_ph(const FieldSpec* s, int k_idx) {
  std::uint64_t p = s->p, p2 = s->p2;
  if (k_idx < 0 || static_cast<std::uint64_t>(k_idx) > 2 * p - 1)
    throw precondition_error("harmonic_ph index must lie in [0, 2p-1]");
  std::uint64_t acc = 0;
  for (std::uint64_t j = 1; j <= static_cast<std::uint64_t>(k_idx); ++j) {
    std::uint64_t term;
    if (j == p)
      term = 1;  // the p/p term contributes exactly 1
    else
      term = p * powmod(j % p, p - 2, p) % p2;
    acc = (acc + term) % p2;
  }
  return Witt2::from_int(s, static_cast<std::int64_t>(acc));
}

namespace {

/* Shared coefficient core: (-(N+1))^{mp-1} * harm * prod_{j=1..N}{j/(N+1)}_i / (i!)^N,
   with the harmonic factor passed in by the caller. */
Witt2 katz_coeff(const FieldSpec* s, int N, int m, int i, const Witt2& harm) {
  std::uint64_t p = s->p;
  Witt2 base = Witt2::from_int(s, -(static_cast<std::int64_t>(N) + 1));
  if (!base.is_unit()) throw precondition_error("p divides N+1");
  Witt2 acc = base.pow(m * p - 1) * harm;
  Witt2 a_step = base.inv();  // 1/(N+1) up to sign handled below
  Witt2 inv_np1 = -a_step;
  for (int j = 1; j <= N; ++j) {
    Witt2 a = Witt2::from_int(s, j) * inv_np1;
    for (int l = 0; l < i; ++l) acc = acc * (a + Witt2::from_int(s, l));
  }
  if (static_cast<std::uint64_t>(i) >= p)
    throw crosscheck_error("hd_mod index reached p; factorial divisor would not be a unit");
  Witt2 fact = Witt2::one(s);
  for (int l = 2; l <= i; ++l) fact = fact * Witt2::from_int(s, l);
  Witt2 divisor = fact.pow(static_cast<std::uint64_t>(N));
  if (!divisor.is_unit())
    throw crosscheck_error("hd_mod factorial divisor is not a unit");
  return acc * divisor.inv();
}

}  // namespace

std::vector<Witt2> hd_mod_coeffs(const FieldSpec* s, int N, int m) {
  require_tame(s, N);
  if (m != 1 && m != 2) throw precondition_error("hd_mod supports m in {1, 2}");
  int P = m * static_cast<int>(s->p) - 1;
  int imax = P / (N + 1);
  std::vector<Witt2> out;
  out.reserve(static_cast<std::size_t>(imax) + 1);
  for (int i = 0; i <= imax; ++i) {
    Witt2 harm = Witt2::one(s) - Witt2::from_int(s, m) * harmonic_ph(s, i * (N + 1));
    out.push_back(katz_coeff(s, N, m, i, harm));
  }
  return out;
}

Witt2 hd_mod(const FieldSpec* s, int N, int m, const Witt2& lam) {
  auto coeffs = hd_mod_coeffs(s, N, m);
  Witt2 step = lam.pow(static_cast<std::uint64_t>(N) + 1);
  Witt2 acc = Witt2::zero(s), pw = Witt2::one(s);
  for (const Witt2& c : coeffs) {
    acc = acc + c * pw;
    pw = pw * step;
  }
  return acc;
}

bool dwork_smooth(const DworkParams& dp) {
  if ((static_cast<std::uint64_t>(dp.N) + 1) % dp.spec->p == 0) return false;
  if (dp.lambda.is_zero()) return false;
  return dp.lambda.pow(static_cast<std::uint64_t>(dp.N) + 1) != FieldElement::one(dp.spec);
}

bool dwork_ordinary(const DworkParams& dp) {
  if (!dwork_smooth(dp)) throw precondition_error("ordinarity is only defined for smooth members");
  HDPoly hd = hd_def(dp.N + 1, static_cast<int>(dp.spec->p) - 1);
  return !hd.eval_k(dp.spec, dp.lambda).is_zero();
}

DualElement<Witt2> g_vee(const DworkParams& dp) {
  const Witt2& eta = require_eta(dp);
  unsigned nv = static_cast<unsigned>(dp.N) + 1;
  DualElement<Witt2> g(dp.spec, nv, -2 * static_cast<std::int64_t>(nv));
  for (unsigned i = 0; i < nv; ++i) {
    std::vector<std::int64_t> e(nv, -1);
    e[i] = -static_cast<std::int64_t>(nv) - 1;
    g = g + DualElement<Witt2>::monomial(dp.spec, nv, e, Witt2::one(dp.spec));
  }
  return g + DualElement<Witt2>::monomial(dp.spec, nv, std::vector<std::int64_t>(nv, -2), eta);
}

std::vector<Witt2> hd_twisted_coeffs(const FieldSpec* s, int N) {
  require_tame(s, N);
  int P = static_cast<int>(s->p) - 1;
  int imax = P / (N + 1);
  std::vector<Witt2> out;
  out.reserve(static_cast<std::size_t>(imax) + 1);
  for (int i = 0; i <= imax; ++i) {
    /* (1 - pH_{i(N+1)})(1 - pH_i) = 1 - p(H_{i(N+1)} + H_i) exactly in W2. */
    Witt2 harm = Witt2::one(s) - harmonic_ph(s, i * (N + 1)) - harmonic_ph(s, i);
    out.push_back(katz_coeff(s, N, 1, i, harm));
  }
  return out;
}

Witt2 closed_form_obstruction(const DworkParams& dp) {
  const Witt2& eta = require_eta(dp);
  require_tame(dp.spec, dp.N);
  const FieldSpec* s = dp.spec;
  auto tw = hd_twisted_coeffs(s, dp.N);
  Witt2 step = eta.pow(static_cast<std::uint64_t>(dp.N) + 1);
  Witt2 first = Witt2::zero(s), pw = Witt2::one(s);
  for (const Witt2& c : tw) {
    first = first + c * pw;
    pw = pw * step;
  }
  Witt2 second = hd_mod(s, dp.N, 2, eta);
  return -(Witt2::from_int(s, dp.N + 1) * eta.pow(s->p) * first) - eta.frobenius() * second;
}

Witt2 canonical_eta(const FieldSpec* s, int N, const FieldElement& lambda, bool verify) {
  DworkParams probe = DworkParams::base(s, N, lambda);
  if (!dwork_smooth(probe))
    throw precondition_error("canonical_eta needs a smooth member (lambda nonzero, lambda^{N+1} != 1, p not dividing N+1)");
  if (!dwork_ordinary(probe))
    throw precondition_error("canonical_eta needs an ordinary member (HD^{p-1}(lambda) != 0)");

  unsigned n = s->n;
  std::uint64_t p = s->p;
  Witt2 eta0 = Witt2::teichmuller(lambda);  // the coordinate base lift (lambda, 0)
  Witt2 c0w = closed_form_obstruction(DworkParams::lifted(s, N, eta0));
  if (!c0w.a0().is_zero())
    throw crosscheck_error("closed-form value at the base lift is not p-torsion");
  FieldElement c0 = witt_div_p(c0w);

  /* delta(t) := (closed_form(eta0 + times_p(t)) - closed_form(eta0)) / p is
     F_p-linear in t; assemble its matrix on the basis 1, y, ..., y^{n-1}
     and solve delta(t) = -c0. */
  std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n + 1, 0));
  for (unsigned j = 0; j < n; ++j) {
    std::vector<std::int64_t> bc(n, 0);
    bc[j] = 1;
    FieldElement b = FieldElement::from_coeffs(s, bc);
    Witt2 v = closed_form_obstruction(DworkParams::lifted(s, N, eta0 + Witt2::times_p(b)));
    FieldElement col = witt_div_p(v - c0w);
    for (unsigned i = 0; i < n; ++i) m[i][j] = col.coeff(i);
  }
  FieldElement rhs = -c0;
  for (unsigned i = 0; i < n; ++i) m[i][n] = rhs.coeff(i);

  /* Gaussian elimination over F_p. */
  for (unsigned cpos = 0; cpos < n; ++cpos) {
    unsigned piv = cpos;
    while (piv < n && m[piv][cpos] % p == 0) ++piv;
    if (piv == n)
      throw precondition_error("uniqueness failure: the solve matrix is singular");
    std::swap(m[cpos], m[piv]);
    std::uint64_t inv = powmod(m[cpos][cpos] % p, p - 2, p);
    for (unsigned c = cpos; c <= n; ++c) m[cpos][c] = m[cpos][c] % p * inv % p;
    for (unsigned r = 0; r < n; ++r) {
      if (r == cpos || m[r][cpos] % p == 0) continue;
      std::uint64_t f = m[r][cpos] % p;
      for (unsigned c = cpos; c <= n; ++c)
        m[r][c] = (m[r][c] + (p - f) * m[cpos][c]) % p;
    }
  }
  std::vector<std::int64_t> tc(n);
  for (unsigned i = 0; i < n; ++i) tc[i] = static_cast<std::int64_t>(m[i][n] % p);
  FieldElement t = FieldElement::from_coeffs(s, tc);
  Witt2 eta = eta0 + Witt2::times_p(t);

  if (!closed_form_obstruction(DworkParams::lifted(s, N, eta)).is_zero())
    throw crosscheck_error("solved eta does not satisfy the closed-form equation");
  if (verify) {
    auto ctx = HypersurfaceContext::make(dwork_poly_w2(DworkParams::lifted(s, N, eta)));
    auto verdict = is_canonical(ctx);
    if (!verdict.canonical)
      throw crosscheck_error("solved eta fails the obstruction pipeline check");
  }
  return eta;
}

Witt2 ratio_invariant(const FieldSpec* s, int N, const FieldElement& lambda) {
  require_tame(s, N);
  HDPoly hd1 = hd_def(N + 1, static_cast<int>(s->p) - 1);
  if (hd1.eval_k(s, lambda).is_zero())
    throw precondition_error("ratio is undefined for non-ordinary lambda");
  Witt2 eta = Witt2::teichmuller(lambda);
  return hd_mod(s, N, 1, eta) * hd_mod(s, N, 2, eta).inv();
}

bool symmetry_check(const DworkParams& dp) {
  const FieldSpec* s = dp.spec;
  unsigned nv = static_cast<unsigned>(dp.N) + 1;
  auto f = dwork_poly_k(dp);

  std::vector<unsigned> perm(nv);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    if (!(poly_permute_vars(f, perm) == f)) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (dp.eta) {
    auto fw = dwork_poly_w2(dp);
    std::iota(perm.begin(), perm.end(), 0u);
    do {
      if (!(poly_permute_vars(fw, perm) == fw)) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  /* Scaling symmetries need a primitive (N+1)-th root of unity in k. */
  std::uint64_t q = 1;
  for (unsigned i = 0; i < s->n; ++i) q *= s->p;
  FieldElement zeta = FieldElement::zero(s);
  bool found = false;
  for (std::uint64_t idx = 1; idx < q && !found; ++idx) {
    FieldElement z = FieldElement::from_index(s, idx);
    if (z.pow(nv) != FieldElement::one(s)) continue;
    bool primitive = true;
    for (unsigned d = 1; d < nv; ++d)
      if (nv % d == 0 && d > 1 && z.pow(d) == FieldElement::one(s)) primitive = false;
    if (z == FieldElement::one(s)) primitive = false;
    if (primitive) {
      zeta = z;
      found = true;
    }
  }
  if (found) {
    for (unsigned i = 0; i < nv; ++i) {
      unsigned j = (i + 1) % nv;
      auto g = poly_scale_var(poly_scale_var(f, i, zeta), j, zeta.inv());
      if (!(g == f)) return false;
      if (dp.eta) {
        auto fw = dwork_poly_w2(dp);
        auto gw = poly_scale_var(poly_scale_var(fw, i, Witt2::teichmuller(zeta)), j,
                                  Witt2::teichmuller(zeta).inv());
        if (!(gw == fw)) return false;
      }
    }
  }

  /* |G| divides (N+1)!*(N+1)^{N+1}, which is prime to p when p > N+1. */
  if (s->p > static_cast<std::uint64_t>(dp.N) + 1) {
    std::uint64_t p = s->p, ord = 1;
    for (std::uint64_t i = 2; i <= static_cast<std::uint64_t>(dp.N) + 1; ++i) ord = ord * (i % p) % p;
    ord = ord * powmod(nv % p, nv, p) % p;
    if (ord == 0) return false;
  }
  return true;
}

}  // namespace canlift
