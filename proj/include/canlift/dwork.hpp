#ifndef CANLIFT_DWORK_HPP
#define CANLIFT_DWORK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "canlift/arith.hpp"
#include "canlift/dualmod.hpp"
#include "canlift/obstruction.hpp"
#include "canlift/poly.hpp"

namespace canlift {

/* One member of the Dwork family
       lambda*(x0^{N+1} + ... + xN^{N+1}) - (N+1)*x0*...*xN
   over k = F_{p^n} (parameter lambda), optionally lifted to W2(k)
   (parameter eta with eta = lambda mod p). Requires p odd and p not
   dividing N+1; outside that range the family has no smooth members. */
struct DworkParams {
  const FieldSpec* spec = nullptr;
  int N = 0;
  FieldElement lambda;
  std::optional<Witt2> eta;

  static DworkParams base(const FieldSpec* s, int N, const FieldElement& lambda);
  static DworkParams lifted(const FieldSpec* s, int N, const Witt2& eta);
};

/* Integer-coefficient one-variable polynomial supported on exponents
   0, M, 2M, ..., M*floor(P/M). Its value at lambda is the coefficient of
   (x0*...*xN)^P in the P-th power of the Dwork polynomial with parameter
   lambda, where M = N+1. Coefficients are exact big integers. */
class HDPoly {
 public:
  using Int = boost::multiprecision::cpp_int;

  HDPoly(int M, int P, std::vector<Int> coeffs);

  int M() const { return m_; }
  int P() const { return p_; }
  /* Coefficient of X^{M*i}, 0 <= i <= P/M. */
  const Int& coeff(std::size_t i) const { return c_.at(i); }
  std::size_t num_terms() const { return c_.size(); }

  Int eval_int(const Int& x) const;
  FieldElement eval_k(const FieldSpec* s, const FieldElement& x) const;
  Witt2 eval_w2(const FieldSpec* s, const Witt2& x) const;

  std::string str() const;                        // exact integer coefficients
  std::string str_mod(std::uint64_t p) const;     // coefficients mod p^2

 private:
  int m_, p_;
  std::vector<Int> c_;
};

/* Exact coefficients from the defining count: the X^{M*i} coefficient is
   (-M)^{P-M*i} * binom(P,i)*binom(P-i,i)*...*binom(P-(M-1)i,i). */
HDPoly hd_def(int M, int P);

HomogPoly<FieldElement> dwork_poly_k(const DworkParams& dp);
HomogPoly<Witt2> dwork_poly_w2(const DworkParams& dp);  // requires eta

/* Coefficient of (x0*...*xN)^P in dwork_poly_w2(dp)^P by brute-force sparse
   powering; must agree with hd_def(N+1, P) evaluated at eta. */
Witt2 hd_coeff_oracle(const DworkParams& dp, int P);

/* p*H_k in W2(k), where H_k = 1 + 1/2 + ... + 1/k. The j = p term is taken
   as exactly 1 (p/p); every other term is p*(j^{-1} mod p). Domain is
   0 <= k <= 2p-1: past that a second multiple of p would appear.  */
Witt2 harmonic_ph(const FieldSpec* s, int k_idx);

/* Coefficients of HD^{mp-1}_{N+1} mod p^2 on exponents (N+1)*i, from the
   truncated-hypergeometric congruence
     (-(N+1))^{mp-1} * (1 - m*pH_{i(N+1)}) * prod_j {j/(N+1)}_i / (i!)^N,
   with {a}_i the rising factorial; m in {1,2}. Every division is by a
   p-adic unit. Must agree with hd_def(N+1, mp-1) reduced mod p^2. */
std::vector<Witt2> hd_mod_coeffs(const FieldSpec* s, int N, int m);
Witt2 hd_mod(const FieldSpec* s, int N, int m, const Witt2& lam);

/* Smooth iff lambda != 0, lambda^{N+1} != 1, and p does not divide N+1. */
bool dwork_smooth(const DworkParams& dp);
/* Ordinary iff HD^{p-1}_{N+1}(lambda) != 0 in k. Rejects non-smooth input. */
bool dwork_ordinary(const DworkParams& dp);

/* Generator of the invariant part of the obstruction kernel:
   (sum_i x_i^{-(N+1)} + eta*prod_i x_i^{-1}) * prod_i x_i^{-1}.
   Satisfies dual_pairing(f, g_vee) = 0 and conormal_map(ctx, g_vee) = 0. */
DualElement<Witt2> g_vee(const DworkParams& dp);  // requires eta

/* Value of the Frobenius composite on g_vee, in closed form:
     -(N+1)*eta^p*HDtw(eta) - phi(eta)*HD^{2p-1}(eta),
   where HDtw is HD^{p-1} with its X^{(N+1)s} coefficient scaled by
   (1 - p*H_s). The scaling undoes an overcount in the two-step coefficient
   split "choose p designated factors, then a full f^{p-1} coefficient":
   a monomial configuration using p+s designated-variable factors is
   reached by binom(p+s,s) = 1 + p*H_s (mod p^2) of those choices, so the
   plain product C(2p-1,p)*eta^p*HD^{p-1}(eta) counts each s-term binom(p+s,s)
   times. The scaled form equals the exact contraction coefficient
   (2p-1)!/((p+s)!*(s!)^N*r!)*(-(N+1))^r, r = p-1-(N+1)s, mod p^2, and the
   whole expression equals the pipeline coefficient of x0^-1*...*xN^-1 in
   obstruction::frobenius_composite(ctx, g_vee). */
Witt2 closed_form_obstruction(const DworkParams& dp);  // requires eta

/* The twisted first factor above, exposed for testing: coefficients of
   HDtw on exponents (N+1)*s. */
std::vector<Witt2> hd_twisted_coeffs(const FieldSpec* s, int N);

/* Unique eta over lambda with closed_form_obstruction = 0. Writes
   eta = (lambda, 0) + times_p(t) and solves the F_p-linear system
   B*t + C*t^p = c0 on k, assembled column-by-column on an F_p-basis;
   rejects non-smooth and non-ordinary lambda, reports a singular solve
   matrix as a uniqueness failure. With verify = true (default) the result
   is recomputed through closed_form_obstruction and the full
   obstruction pipeline; disagreement raises crosscheck_error. */
Witt2 canonical_eta(const FieldSpec* s, int N, const FieldElement& lambda,
                    bool verify = true);

/* HD^{p-1}(eta) / HD^{2p-1}(eta) in W2(k); independent of the choice of
   lift eta of lambda (the denominator is a unit for ordinary lambda). */
Witt2 ratio_invariant(const FieldSpec* s, int N, const FieldElement& lambda);

/* Invariance of the Dwork polynomial under coordinate permutations and,
   when k contains a primitive (N+1)-th root of unity zeta, under sampled
   scalings x_i -> zeta*x_i, x_j -> zeta^{-1}*x_j; also checks that the
   symmetry group order (N+1)!*(N+1)^{N+1} is prime to p when p > N+1. */
bool symmetry_check(const DworkParams& dp);

/* Coordinate transforms used by symmetry_check: relabel variable i to
   perm[i]; scale one variable, multiplying each term by c^{exponent}. */
template <class P>
P poly_permute_vars(const P& f, const std::vector<unsigned>& perm) {
  unsigned nv = f.num_vars();
  std::vector<std::int64_t> e(nv), pe(nv);
  P out(f.spec(), nv, f.degree());
  for (const auto& [k, coeff] : f.terms()) {
    keypack::unpack(nv, k, e);
    for (unsigned i = 0; i < nv; ++i) pe[perm[i]] = e[i];
    out = out + P::monomial(f.spec(), nv, pe, coeff);
  }
  return out;
}

template <class C, class P>
P poly_scale_var(const P& f, unsigned var, const C& c) {
  unsigned nv = f.num_vars();
  std::vector<std::int64_t> e(nv);
  P out(f.spec(), nv, f.degree());
  for (const auto& [k, coeff] : f.terms()) {
    keypack::unpack(nv, k, e);
    out = out + P::monomial(f.spec(), nv, e, coeff * c.pow(static_cast<std::uint64_t>(e[var])));
  }
  return out;
}

}  // namespace canlift

#endif  // CANLIFT_DWORK_HPP
