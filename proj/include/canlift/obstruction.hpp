#ifndef CANLIFT_OBSTRUCTION_HPP
#define CANLIFT_OBSTRUCTION_HPP

#include <memory>
#include <mutex>

#include "canlift/dualmod.hpp"

namespace canlift {

/* Immutable per-hypersurface state: the degree-d lift f over W2 in N+1
   variables, its reduction, partials, and the memoized Frobenius data
   gamma = -f^(2p-1) + 2 f^(p-1) F*(f) that every composite evaluation uses. */
class HypersurfaceContext {
 public:
  static std::shared_ptr<const HypersurfaceContext> make(HomogPoly<Witt2> f);

  const FieldSpec* spec() const { return f_.spec(); }
  unsigned num_vars() const { return f_.num_vars(); }
  unsigned ambient_dim() const { return f_.num_vars() - 1; }  // N
  std::int64_t degree() const { return f_.degree(); }
  const HomogPoly<Witt2>& f() const { return f_; }
  const HomogPoly<FieldElement>& f0() const { return f0_; }
  const HomogPoly<Witt2>& partial(unsigned i) const { return partials_.at(i); }
  const HomogPoly<Witt2>& frobenius_f() const { return frobenius_f_; }
  const HomogPoly<Witt2>& gamma() const { return gamma_; }

  /* Composite image of one basis monomial of S^v_{-2d}, memoized. */
  const DualElement<Witt2>& composite_of_monomial(std::uint64_t key) const;

 private:
  explicit HypersurfaceContext(HomogPoly<Witt2> f);

  HomogPoly<Witt2> f_;
  HomogPoly<FieldElement> f0_;
  std::vector<HomogPoly<Witt2>> partials_;
  HomogPoly<Witt2> frobenius_f_;
  HomogPoly<Witt2> gamma_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, DualElement<Witt2>> composite_cache_;
};

using Ctx = std::shared_ptr<const HypersurfaceContext>;

/* Component i is f * dg/dx_i + 2 * (df/dx_i) * g, one element per variable. */
std::vector<DualElement<Witt2>> conormal_map(const Ctx& ctx, const DualElement<Witt2>& g);

/* dual_act(gamma, dual_frobenius(g)), assembled additively and
   phi-semilinearly from cached basis-monomial images. */
DualElement<Witt2> frobenius_composite(const Ctx& ctx, const DualElement<Witt2>& g);

/* Exact polynomial identity F*(f^2) = f * gamma over W2. */
bool fsquared_identity_check(const Ctx& ctx);

/* Generating set of { g in S^v_{-2d} : f*g = 0 and conormal_map(g) = 0 }.
   When d equals the variable count the f-action target is one-dimensional, and
   the pairing characterization (W2*f)^perp is verified to generate the same
   module (mutual membership via solve_w2). */
std::vector<DualElement<Witt2>> obstruction_kernel(const Ctx& ctx);

struct CanonicalVerdict {
  bool canonical = false;
  /* Four variables (a surface in P^3): the explicit conormal kernel may
     properly contain the true obstruction domain, so only a positive verdict
     is conclusive. */
  bool inconclusive_n2 = false;
  std::size_t kernel_rank = 0;
  std::optional<DualElement<Witt2>> witness;  // kernel generator with nonzero composite
};

/* Vanishing of the composite on every obstruction-kernel generator; additivity
   and semilinearity extend vanishing from generators to the whole module. */
CanonicalVerdict is_canonical(const Ctx& ctx);

}  // namespace canlift

#endif
