#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>

#include "chainrec/chain.hpp"
#include "chainrec/operators.hpp"

namespace chainrec {

enum class RecipeKind { Step1, Step2Comb, Step2Grid, ShiftedMinusN, ShiftedPlusN };
enum class Direction { ToZero, FromZero };

inline const char* to_string(RecipeKind k) {
  switch (k) {
    case RecipeKind::Step1: return "Step1";
    case RecipeKind::Step2Comb: return "Step2Comb";
    case RecipeKind::Step2Grid: return "Step2Grid";
    case RecipeKind::ShiftedMinusN: return "ShiftedMinusN";
    case RecipeKind::ShiftedPlusN: return "ShiftedPlusN";
  }
  return "?";
}

inline const char* to_string(Direction d) { return d == Direction::ToZero ? "ToZero" : "FromZero"; }

/// Vertices a recipe touches: line [line_lo, line_hi] and, when branch_k > 0,
/// the branch vertices (-branch_k, j) for j in [j_lo, j_hi].
struct WindowRequirement {
  std::int64_t line_lo = 0;
  std::int64_t line_hi = 0;
  std::int64_t branch_k = 0;
  std::int64_t j_lo = 0;
  std::int64_t j_hi = -1;

  bool needs_branch() const { return branch_k > 0 && j_lo <= j_hi; }

  /// Smallest comb or grid truncation containing the requirement.
  TruncationParams minimal(TreeKind kind) const {
    TruncationParams p;
    p.k_max = std::max<std::int64_t>(branch_k, 1);
    p.n_min = std::min(line_lo, -p.k_max);
    p.n_max = std::max<std::int64_t>(line_hi, 1);
    if (kind == TreeKind::Grid) {
      p.j_min = needs_branch() ? std::min<std::int64_t>(j_lo, -1) : -1;
      p.j_max = needs_branch() ? std::max<std::int64_t>(j_hi, 1) : 1;
    } else {
      p.j_min = 1;
      p.j_max = p.k_max;
    }
    return p;
  }

  /// Throws UndersizedWindow naming the first missing vertex.
  void check(const std::set<VertexId>& window, const std::string& what) const {
    for (std::int64_t n = line_lo; n <= line_hi; ++n)
      if (!window.count(VertexId::line(n))) throw UndersizedWindow(what, VertexId::line(n));
    if (!needs_branch()) return;
    for (std::int64_t j = j_lo; j <= j_hi; ++j)
      if (!window.count(VertexId::branch(branch_k, j))) throw UndersizedWindow(what, VertexId::branch(branch_k, j));
  }
};

/// Union of two requirements. Branch sets must agree or one must be empty;
/// otherwise the larger branch index wins and its j range is widened.
inline WindowRequirement merge(const WindowRequirement& a, const WindowRequirement& b) {
  WindowRequirement out;
  out.line_lo = std::min(a.line_lo, b.line_lo);
  out.line_hi = std::max(a.line_hi, b.line_hi);
  if (!a.needs_branch()) {
    out.branch_k = b.branch_k, out.j_lo = b.j_lo, out.j_hi = b.j_hi;
  } else if (!b.needs_branch()) {
    out.branch_k = a.branch_k, out.j_lo = a.j_lo, out.j_hi = a.j_hi;
  } else {
    out.branch_k = std::max(a.branch_k, b.branch_k);
    out.j_lo = std::min(a.j_lo, b.j_lo);
    out.j_hi = std::max(a.j_hi, b.j_hi);
  }
  return out;
}

template <class R>
struct ChainRecipe {
  RecipeKind kind = RecipeKind::Step1;
  Direction direction = Direction::FromZero;
  R delta{};
  std::int64_t target = 0;  // basis index n of e_n
  std::optional<std::int64_t> m1;
  std::optional<std::int64_t> m2;
  std::optional<std::int64_t> grid_n;
  /// Tolerance the inner Step 2 chain is built for (e_{+n} ToZero only).
  std::optional<R> inner_delta;
  /// Link defect predicted by the closed-form expression for the shipped weights.
  std::optional<R> predicted_defect;
  std::string inequality;
  WindowRequirement window;
};

template <Scalar S>
struct BuiltChain {
  ChainRecipe<real_t<S>> recipe;
  DeltaChain<S> chain;
};

namespace detail {

inline constexpr std::int64_t max_recipe_length = 100000;

template <Scalar S>
void require_delta(const real_t<S>& delta) {
  if (!(delta > real_t<S>(0))) throw InvalidArgument("delta must be positive");
}

template <Scalar S>
const S& require_mu1(const LinearOp<S>& op) {
  if (!op.mu1) throw InvalidArgument("operator does not act as a mu1-shift on the line");
  return *op.mu1;
}

}  // namespace detail

/// Smallest m > 1 with 1 < δ·|μ₁|^{m−1}.
template <Scalar S>
std::int64_t m1_for(const real_t<S>& delta, const S& mu1) {
  using R = real_t<S>;
  detail::require_delta<S>(delta);
  const R a = magnitude(mu1);
  if (!(a > R(1))) throw InvalidArgument("m1_for needs |mu1| > 1");
  R power = a;  // |μ₁|^{m−1} at m = 2
  for (std::int64_t m = 2; m < detail::max_recipe_length; ++m, power *= a)
    if (R(1) < delta * power) return m;
  throw InvalidArgument("m1_for: no admissible length below the search limit");
}

/// Smallest m > 1 with |μ₁|^m < δ·|μ₂|^{m−1}.
template <Scalar S>
std::int64_t m2_for(const real_t<S>& delta, const S& mu1, const S& mu2) {
  using R = real_t<S>;
  detail::require_delta<S>(delta);
  const R a = magnitude(mu1);
  const R b = magnitude(mu2);
  if (!(R(1) < a && a < b)) throw InvalidArgument("m2_for needs 1 < |mu1| < |mu2|");
  R lhs = a * a;
  R rhs = delta * b;
  for (std::int64_t m = 2; m < detail::max_recipe_length; ++m, lhs *= a, rhs *= b)
    if (lhs < rhs) return m;
  throw InvalidArgument("m2_for: no admissible length below the search limit");
}

/// The grid construction searches the same inequality; its chain has length 2n − 1.
template <Scalar S>
std::int64_t grid_n_for(const real_t<S>& delta, const S& mu1, const S& mu2) {
  return m2_for<S>(delta, mu1, mu2);
}

/// Step 1 shifted to an arbitrary line target: 0 → e_t.
///   f_1 = μ₁^{−(m₁−1)} e_{t+m₁−1}, f_l = T^{l−1} f_1.
template <Scalar S>
BuiltChain<S> chain_zero_to_line(std::int64_t t, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                 NormSpec norm = Sup{}) {
  using R = real_t<S>;
  const S mu1 = detail::require_mu1(*op);
  ChainRecipe<R> r;
  r.kind = t == 0 ? RecipeKind::Step1 : (t < 0 ? RecipeKind::ShiftedMinusN : RecipeKind::ShiftedPlusN);
  r.direction = Direction::FromZero;
  r.delta = delta;
  r.target = t;
  const std::int64_t m1 = m1_for<S>(delta, mu1);
  r.m1 = m1;
  r.inequality = "1 < delta*|mu1|^(m1-1)";
  r.window = {t, t + m1 - 1};
  r.predicted_defect = ipow(R(R(1) / magnitude(mu1)), m1 - 1);
  r.window.check(op->window(), "Step 1 chain to e_" + std::to_string(t));

  DeltaChain<S> c;
  c.delta = delta;
  c.norm = std::move(norm);
  c.label = std::string("step1(e_") + std::to_string(t) + ")";
  c.vectors.reserve(m1 + 1);
  c.vectors.push_back({});
  c.vectors.push_back(SeqVector<S>::unit(VertexId::line(t + m1 - 1), ipow(mu1, -(m1 - 1))));
  for (std::int64_t l = 2; l <= m1; ++l) c.vectors.push_back(op->apply(c.vectors.back()));
  c.op = std::move(op);
  return {std::move(r), std::move(c)};
}

template <Scalar S>
BuiltChain<S> chain_zero_to_e0(const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op, NormSpec norm = Sup{}) {
  return chain_zero_to_line<S>(0, delta, std::move(op), std::move(norm));
}

namespace detail {

/// f_0 = e_{−p}, f_1 = T f_0 − α e_b with α chosen so that T^{steps} f_0 and
/// T^{steps−1}(α e_b) agree on the line vertex `meet`.
template <Scalar S>
std::vector<SeqVector<S>> corrected_orbit(const LinearOp<S>& op, std::int64_t p, VertexId b, std::int64_t meet,
                                          std::int64_t steps, std::int64_t length) {
  const VertexId meet_v = VertexId::line(meet);
  const SeqVector<S> f0 = SeqVector<S>::unit(VertexId::line(-p));
  const S reach = op.apply_power(f0, steps).at(meet_v);
  const S feed = op.apply_power(SeqVector<S>::unit(b), steps - 1).at(meet_v);
  if (is_zero(feed)) throw InvalidArgument("branch " + b.str() + " does not feed line vertex " + meet_v.str());
  std::vector<SeqVector<S>> v;
  v.reserve(length + 1);
  v.push_back(f0);
  v.push_back(op.apply(f0) - SeqVector<S>::unit(b, reach / feed));
  for (std::int64_t l = 2; l < length; ++l) {
    v.push_back(op.apply(v.back()));
    // The line coordinate cancels at step `steps`; in float mode drop the rounding residue
    // so it does not travel further down the line. The link defect still records it.
    if (l == steps) {
      if constexpr (is_exact_v<S>) {
        if (!is_zero(v.back().at(meet_v))) throw InvalidArgument("line cancellation failed at " + meet_v.str());
      }
      v.back().set(meet_v, S(0));
    }
  }
  v.push_back({});
  return v;
}

}  // namespace detail

/// Comb Step 2 from e_{−p} (p ≥ 0) to 0 through finger K = m₂ + p:
///   f_1 = B f_0 − α e_{(−K, m₂−1)},  f_l = B^{l−1} f_1,  f_{m₂} = 0.
template <Scalar S>
BuiltChain<S> chain_line_to_zero_comb(std::int64_t p, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                      NormSpec norm = Sup{}) {
  using R = real_t<S>;
  if (op->family() != OpFamily::CombShift) throw InvalidArgument("comb Step 2 needs a CombShift operator");
  if (p < 0) throw InvalidArgument("comb Step 2 starts at e_{-p} with p >= 0");
  const S mu1 = detail::require_mu1(*op);
  if (!op->mu2) throw InvalidArgument("comb operator without mu2");
  const S mu2 = *op->mu2;
  const std::int64_t m2 = m2_for<S>(delta, mu1, mu2);
  const std::int64_t K = m2 + p;

  ChainRecipe<R> r;
  r.kind = p == 0 ? RecipeKind::Step2Comb : RecipeKind::ShiftedMinusN;
  r.direction = Direction::ToZero;
  r.delta = delta;
  r.target = -p;
  r.m2 = m2;
  r.inequality = "|mu1|^m2 < delta*|mu2|^(m2-1)";
  r.window = {-K, -p, K, 1, m2 - 1};
  r.predicted_defect = ipow(R(R(1) / magnitude(mu2)), m2 - 1) * ipow(magnitude(mu1), m2);
  r.window.check(op->window(), "comb Step 2 chain from e_" + std::to_string(-p));

  DeltaChain<S> c;
  c.delta = delta;
  c.norm = std::move(norm);
  c.label = "step2_comb(e_" + std::to_string(-p) + ")";
  c.vectors = detail::corrected_orbit(*op, p, VertexId::branch(K, m2 - 1), -K, m2, m2);
  c.op = std::move(op);
  return {std::move(r), std::move(c)};
}

/// Grid Step 2 from e_{−p} (p ≥ 0) to 0 through branch K = n + p, length 2n − 1:
///   f_1 = T f_0 − α e_{(−K, n−1)},  f_l = T^{l−1} f_1 for l < 2n − 1,  f_{2n−1} = 0.
template <Scalar S>
BuiltChain<S> chain_line_to_zero_grid(std::int64_t p, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                      NormSpec norm = Sup{}) {
  using R = real_t<S>;
  if (op->family() != OpFamily::GridT) throw InvalidArgument("grid Step 2 needs a GridT operator");
  if (p < 0) throw InvalidArgument("grid Step 2 starts at e_{-p} with p >= 0");
  const S mu1 = detail::require_mu1(*op);
  if (!op->mu2) throw InvalidArgument("grid operator without mu2");
  const S mu2 = *op->mu2;
  const std::int64_t n = grid_n_for<S>(delta, mu1, mu2);
  const std::int64_t K = n + p;
  const std::int64_t m2 = 2 * n - 1;

  ChainRecipe<R> r;
  r.kind = p == 0 ? RecipeKind::Step2Grid : RecipeKind::ShiftedMinusN;
  r.direction = Direction::ToZero;
  r.delta = delta;
  r.target = -p;
  r.grid_n = n;
  r.m2 = m2;
  r.inequality = "|mu1|^n < delta*|mu2|^(n-1), m2 = 2n-1";
  r.window = {-K, -p, K, -n + 1, n - 1};
  r.predicted_defect = ipow(R(R(1) / magnitude(mu2)), n - 1) * ipow(magnitude(mu1), n);
  r.window.check(op->window(), "grid Step 2 chain from e_" + std::to_string(-p));

  DeltaChain<S> c;
  c.delta = delta;
  c.norm = std::move(norm);
  c.label = "step2_grid(e_" + std::to_string(-p) + ")";
  c.vectors = detail::corrected_orbit(*op, p, VertexId::branch(K, n - 1), -K, n, m2);
  c.op = std::move(op);
  return {std::move(r), std::move(c)};
}

/// Step 2 for whichever family `op` belongs to.
template <Scalar S>
BuiltChain<S> chain_line_to_zero(std::int64_t p, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                 NormSpec norm = Sup{}) {
  if (op->family() == OpFamily::GridT) return chain_line_to_zero_grid<S>(p, delta, std::move(op), std::move(norm));
  return chain_line_to_zero_comb<S>(p, delta, std::move(op), std::move(norm));
}

template <Scalar S>
BuiltChain<S> chain_e0_to_zero_comb(const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                    NormSpec norm = Sup{}) {
  return chain_line_to_zero_comb<S>(0, delta, std::move(op), std::move(norm));
}

template <Scalar S>
BuiltChain<S> chain_e0_to_zero_grid(const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                                    NormSpec norm = Sup{}) {
  return chain_line_to_zero_grid<S>(0, delta, std::move(op), std::move(norm));
}

/// Recipe window needed by chain_for_basis, without building the chain.
template <Scalar S>
WindowRequirement requirement_for_basis(std::int64_t n, const real_t<S>& delta, OpFamily family, const S& mu1,
                                        const S& mu2, Direction direction) {
  using R = real_t<S>;
  if (direction == Direction::FromZero) {
    const std::int64_t m1 = m1_for<S>(delta, mu1);
    return {n, n + m1 - 1};
  }
  const std::int64_t p = n > 0 ? 0 : -n;
  const R inner = n > 0 ? R(delta / ipow(magnitude(mu1), n)) : delta;
  const std::int64_t m = m2_for<S>(inner, mu1, mu2);
  const std::int64_t K = m + p;
  WindowRequirement req = family == OpFamily::GridT ? WindowRequirement{-K, -p, K, -m + 1, m - 1}
                                                    : WindowRequirement{-K, -p, K, 1, m - 1};
  if (n > 0) req.line_hi = n;
  return req;
}

/// δ-chain between 0 and e_n in the requested direction.
///
/// FromZero is Step 1 shifted to e_n. ToZero for n ≤ 0 is the Step 2 chain
/// shifted by n. ToZero for n > 0 is the exact orbit e_n → μ₁^n e_0 followed by
/// μ₁^n times a Step 2 chain built for δ/|μ₁|^n.
template <Scalar S>
BuiltChain<S> chain_for_basis(std::int64_t n, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                              Direction direction, NormSpec norm = Sup{}) {
  using R = real_t<S>;
  detail::require_delta<S>(delta);
  if (direction == Direction::FromZero) return chain_zero_to_line<S>(n, delta, std::move(op), std::move(norm));
  if (n <= 0) return chain_line_to_zero<S>(-n, delta, std::move(op), std::move(norm));

  const S mu1 = detail::require_mu1(*op);
  const S scale = ipow(mu1, n);
  const R inner_delta = delta / magnitude(scale);
  if (!op->mu2) throw InvalidArgument("operator without mu2");
  auto req = requirement_for_basis<S>(n, delta, op->family(), mu1, *op->mu2, direction);
  req.check(op->window(), "orbit chain from e_" + std::to_string(n));

  DeltaChain<S> orbit;
  orbit.delta = delta;
  orbit.norm = norm;
  orbit.op = op;
  orbit.label = "orbit(e_" + std::to_string(n) + ")";
  orbit.vectors.push_back(SeqVector<S>::unit(VertexId::line(n)));
  for (std::int64_t l = 1; l <= n; ++l) orbit.vectors.push_back(op->apply(orbit.vectors.back()));

  BuiltChain<S> inner = chain_line_to_zero<S>(0, inner_delta, op, norm);
  DeltaChain<S> tail = scale_chain(scale, inner.chain);
  tail.delta = delta;  // |μ₁^n|·(δ/|μ₁|^n), restated to avoid rounding drift in float mode

  ChainRecipe<R> r = inner.recipe;
  r.kind = RecipeKind::ShiftedPlusN;
  r.direction = Direction::ToZero;
  r.delta = delta;
  r.target = n;
  r.inner_delta = inner_delta;
  r.window = req;
  r.inequality += " (at inner delta = delta/|mu1|^n)";
  if (r.predicted_defect) r.predicted_defect = *r.predicted_defect * magnitude(scale);
  return {std::move(r), concat(orbit, tail)};
}

/// FromZero followed by ToZero: a δ-chain from e_n back to itself.
template <Scalar S>
DeltaChain<S> round_trip_chain(std::int64_t n, const real_t<S>& delta, std::shared_ptr<const LinearOp<S>> op,
                               NormSpec norm = Sup{}) {
  auto to_zero = chain_for_basis<S>(n, delta, op, Direction::ToZero, norm);
  auto from_zero = chain_for_basis<S>(n, delta, op, Direction::FromZero, norm);
  return concat(to_zero.chain, from_zero.chain);
}

}  // namespace chainrec
