#include "canlift/obstruction.hpp"

namespace canlift {

HypersurfaceContext::HypersurfaceContext(HomogPoly<Witt2> f)
    : f_(std::move(f)), f0_(poly_reduce(f_)), frobenius_f_(poly_frobenius_pullback(f_)),
      gamma_(f_.spec(), f_.num_vars(),
             f_.degree() * (2 * static_cast<std::int64_t>(f_.spec()->p) - 1)) {
  const std::uint64_t p = f_.spec()->p;
  partials_.reserve(f_.num_vars());
  for (unsigned i = 0; i < f_.num_vars(); ++i) partials_.push_back(poly_partial(f_, i));
  HomogPoly<Witt2> f_pm1 = poly_pow(f_, p - 1);
  HomogPoly<Witt2> f_2pm1 = f_pm1 * f_pm1 * f_;
  gamma_ = (-f_2pm1) + (f_pm1 * frobenius_f_).scale(Witt2::from_int(f_.spec(), 2));
}

std::shared_ptr<const HypersurfaceContext> HypersurfaceContext::make(HomogPoly<Witt2> f) {
  if (f.is_zero() || f.degree() < 1)
    throw precondition_error("hypersurface needs a nonzero positive-degree polynomial");
  bool primitive = false;
  for (const auto& [k, c] : f.terms()) primitive |= c.is_unit();
  if (!primitive)
    throw precondition_error("hypersurface polynomial must have a unit coefficient");
  return std::shared_ptr<const HypersurfaceContext>(new HypersurfaceContext(std::move(f)));
}

const DualElement<Witt2>& HypersurfaceContext::composite_of_monomial(std::uint64_t key) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = composite_cache_.find(key);
    if (it != composite_cache_.end()) return it->second;
  }
  DualElement<Witt2> mono = DualElement<Witt2>::from_terms(
      spec(), num_vars(), -2 * degree(), {{key, Witt2::one(spec())}});
  DualElement<Witt2> image = dual_act(gamma_, dual_frobenius(mono));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return composite_cache_.emplace(key, std::move(image)).first->second;
}

std::vector<DualElement<Witt2>> conormal_map(const Ctx& ctx, const DualElement<Witt2>& g) {
  if (g.degree() != -2 * ctx->degree())
    throw precondition_error("conormal input must have degree -2d");
  std::vector<DualElement<Witt2>> out;
  out.reserve(ctx->num_vars());
  Witt2 two = Witt2::from_int(ctx->spec(), 2);
  for (unsigned i = 0; i < ctx->num_vars(); ++i)
    out.push_back(dual_act(ctx->f(), dual_partial(g, i)) +
                  dual_act(ctx->partial(i), g).scale(two));
  return out;
}

DualElement<Witt2> frobenius_composite(const Ctx& ctx, const DualElement<Witt2>& g) {
  if (g.degree() != -2 * ctx->degree())
    throw precondition_error("composite input must have degree -2d");
  DualElement<Witt2> out(ctx->spec(), ctx->num_vars(), -ctx->degree());
  for (const auto& [key, c] : g.terms())
    out = out + ctx->composite_of_monomial(key).scale(c.frobenius());
  return out;
}

bool fsquared_identity_check(const Ctx& ctx) {
  return poly_frobenius_pullback(ctx->f() * ctx->f()) == ctx->f() * ctx->gamma();
}

namespace {

/* Columns are coordinates of images of the S^v_{-2d} monomial basis: one
   f-action block and one conormal block per variable. */
W2Mat stacked_system(const Ctx& ctx, const std::vector<DualElement<Witt2>>& basis) {
  const FieldSpec* s = ctx->spec();
  unsigned nv = ctx->num_vars();
  std::int64_t d = ctx->degree();
  auto act_basis = dual_basis<Witt2>(s, nv, -d);
  auto con_basis = dual_basis<Witt2>(s, nv, -d - 1);
  std::size_t nrows = act_basis.size() + nv * con_basis.size();
  W2Mat m(nrows, W2Vec(basis.size(), Witt2::zero(s)));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    auto fg = dual_coordinates(dual_act(ctx->f(), basis[j]), act_basis);
    for (std::size_t r = 0; r < fg.size(); ++r) m[r][j] = fg[r];
    auto con = conormal_map(ctx, basis[j]);
    for (unsigned i = 0; i < nv; ++i) {
      auto ci = dual_coordinates(con[i], con_basis);
      for (std::size_t r = 0; r < ci.size(); ++r)
        m[act_basis.size() + i * con_basis.size() + r][j] = ci[r];
    }
  }
  return m;
}

bool member_of_span(const FieldSpec* s, const std::vector<W2Vec>& gens, const W2Vec& v) {
  if (gens.empty()) {
    for (const auto& e : v)
      if (!e.is_zero()) return false;
    return true;
  }
  W2Mat cols(v.size(), W2Vec(gens.size(), Witt2::zero(s)));
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < v.size(); ++i) cols[i][j] = gens[j][i];
  return solve_w2(s, cols, v).has_value();
}

/* ker(f.) on S^v_{-2d} equals the pairing perp of W2*f when d = num_vars;
   both kernels are computed and checked to generate each other. */
void check_perp_agreement(const Ctx& ctx, const std::vector<DualElement<Witt2>>& basis) {
  const FieldSpec* s = ctx->spec();
  unsigned nv = ctx->num_vars();
  auto act_basis = dual_basis<Witt2>(s, nv, -ctx->degree());
  W2Mat action(act_basis.size(), W2Vec(basis.size(), Witt2::zero(s)));
  W2Mat pairing(1, W2Vec(basis.size(), Witt2::zero(s)));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    auto fg = dual_coordinates(dual_act(ctx->f(), basis[j]), act_basis);
    for (std::size_t r = 0; r < fg.size(); ++r) action[r][j] = fg[r];
    pairing[0][j] = dual_pairing(ctx->f(), basis[j]);
  }
  auto ka = howell_kernel(s, action, basis.size());
  auto kp = howell_kernel(s, pairing, basis.size());
  for (const auto& g : ka)
    if (!member_of_span(s, kp, g))
      throw crosscheck_error("action kernel not inside the pairing perp");
  for (const auto& g : kp)
    if (!member_of_span(s, ka, g))
      throw crosscheck_error("pairing perp not inside the action kernel");
}

}  // namespace

std::vector<DualElement<Witt2>> obstruction_kernel(const Ctx& ctx) {
  const FieldSpec* s = ctx->spec();
  auto basis = dual_basis<Witt2>(s, ctx->num_vars(), -2 * ctx->degree());
  if (ctx->degree() == static_cast<std::int64_t>(ctx->num_vars()))
    check_perp_agreement(ctx, basis);
  W2Mat m = stacked_system(ctx, basis);
  auto coord_gens = howell_kernel(s, m, basis.size());
  std::vector<DualElement<Witt2>> gens;
  gens.reserve(coord_gens.size());
  for (const auto& v : coord_gens) gens.push_back(dual_from_coordinates(v, basis));
  return gens;
}

CanonicalVerdict is_canonical(const Ctx& ctx) {
  CanonicalVerdict v;
  auto gens = obstruction_kernel(ctx);
  v.kernel_rank = gens.size();
  v.canonical = true;
  for (const auto& g : gens) {
    if (!frobenius_composite(ctx, g).is_zero()) {
      v.canonical = false;
      v.witness = g;
      break;
    }
  }
  v.inconclusive_n2 = !v.canonical && ctx->num_vars() == 4;
  return v;
}

}  // namespace canlift
