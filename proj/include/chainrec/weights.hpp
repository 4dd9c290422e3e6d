#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/scalar.hpp"
#include "chainrec/vertex.hpp"

namespace chainrec {

/// Weights λ_{(-k,j)} along one grid branch: explicit values on [lo, hi] and
/// constant tails above hi and below lo. A missing tail means the weights
/// beyond the explicit range are unknown.
template <Scalar S>
struct BranchWeights {
  std::int64_t lo = 0;
  std::vector<S> values;
  std::optional<S> above;
  std::optional<S> below;

  std::int64_t hi() const { return lo + static_cast<std::int64_t>(values.size()) - 1; }

  std::optional<S> at(std::int64_t j) const {
    if (j < lo) return below;
    if (j > hi()) return above;
    return values[static_cast<std::size_t>(j - lo)];
  }
};

enum class Clause { Holds, Fails, Inconclusive };

inline const char* to_string(Clause c) {
  switch (c) {
    case Clause::Holds: return "holds";
    case Clause::Fails: return "fails";
    case Clause::Inconclusive: return "inconclusive";
  }
  return "?";
}

template <Scalar S>
struct BranchCondition {
  std::int64_t k = 0;
  bool core_ok = true;    // μ₂ on 1 <= j <= k, 1/μ₂ on -k <= j <= 0
  bool nonzero = true;
  Clause forward = Clause::Inconclusive;   // Σ_j |λ_1 ⋯ λ_j| < ∞
  Clause backward = Clause::Inconclusive;  // Σ_j |λ_{-(j-1)} ⋯ λ_0|^{-1} < ∞
  std::vector<real_t<S>> forward_partial;   // partial sums when a tail is unknown
  std::vector<real_t<S>> backward_partial;
  std::string note;
};

/// Weight matrix conditions: uniform bounds (0 < inf ≤ sup < ∞) and, per branch,
/// at least one summable product series.
template <Scalar S>
struct GridConditionReport {
  real_t<S> inf{};
  real_t<S> sup{};
  Clause bounded = Clause::Holds;
  std::vector<BranchCondition<S>> branches;  // custom branches only; the default generator is analytic
  Clause default_forward = Clause::Holds;
  Clause default_backward = Clause::Holds;

  /// First definite violation, empty if none.
  std::string first_failure() const {
    if (bounded == Clause::Fails) return "weights not uniformly bounded away from 0 and infinity";
    for (const auto& b : branches) {
      if (!b.nonzero) return "branch " + std::to_string(b.k) + ": zero weight";
      if (!b.core_ok) return "branch " + std::to_string(b.k) + ": core pattern (mu2 on 1..k, 1/mu2 on -k..0) violated";
      if (b.forward == Clause::Fails && b.backward == Clause::Fails)
        return "branch " + std::to_string(b.k) + ": neither product series is summable";
    }
    return {};
  }
  bool inconclusive() const {
    if (bounded == Clause::Inconclusive) return true;
    for (const auto& b : branches)
      if (b.forward != Clause::Holds && b.backward != Clause::Holds && !(b.forward == Clause::Fails && b.backward == Clause::Fails))
        return true;
    return false;
  }
};

/// Weights for the comb shift (μ₁ on the line, μ₂ on the fingers) and for the
/// grid operator (μ₁, μ₂ and the branch matrix λ_{(-k,j)}).
template <Scalar S>
struct WeightAssignment {
  S mu1{};
  S mu2{};
  /// Grid branches that override the default generator.
  std::map<std::int64_t, BranchWeights<S>> grid_custom;
  /// Per-vertex shift weights that override the μ₁/μ₂ pattern.
  std::map<VertexId, S> overrides;

  static WeightAssignment standard(S mu1, S mu2) {
    WeightAssignment w;
    w.mu1 = std::move(mu1);
    w.mu2 = std::move(mu2);
    return w;
  }

  /// 1 < |μ₁| < |μ₂|.
  void validate_mu() const {
    auto a = magnitude(mu1);
    auto b = magnitude(mu2);
    if (!(real_t<S>(1) < a && a < b)) throw InvalidArgument("weights must satisfy 1 < |mu1| < |mu2|");
  }

  /// The default generator: μ₂ for 1 <= j <= k, 1/μ₂ for -k <= j <= 0,
  /// 1/μ₂ for j > k and μ₂ for j < -k.
  BranchWeights<S> default_branch(std::int64_t k) const {
    BranchWeights<S> b;
    b.lo = -k;
    b.values.reserve(static_cast<std::size_t>(2 * k + 1));
    S inv = S(1) / mu2;
    for (std::int64_t j = -k; j <= k; ++j) b.values.push_back(j >= 1 ? mu2 : inv);
    b.above = inv;
    b.below = mu2;
    return b;
  }

  BranchWeights<S> grid_branch(std::int64_t k) const {
    auto it = grid_custom.find(k);
    return it == grid_custom.end() ? default_branch(k) : it->second;
  }

  std::optional<S> grid_lambda(std::int64_t k, std::int64_t j) const { return grid_branch(k).at(j); }

  std::optional<S> shift_weight(VertexId v) const {
    if (auto it = overrides.find(v); it != overrides.end()) return it->second;
    return v.is_line() ? mu1 : mu2;
  }
};

namespace detail {

/// Convergence of Σ_{j>=1} Π_{i<=j} |ratio_i| with an eventually constant ratio r:
/// summable iff r < 1 (the terms are nonzero).
template <class R>
Clause geometric_clause(const std::optional<R>& r_abs) {
  if (!r_abs) return Clause::Inconclusive;
  return *r_abs < R(1) ? Clause::Holds : Clause::Fails;
}

}  // namespace detail

template <Scalar S>
BranchCondition<S> check_branch(const WeightAssignment<S>& w, std::int64_t k, const BranchWeights<S>& b) {
  using R = real_t<S>;
  BranchCondition<S> c;
  c.k = k;
  S inv = S(1) / w.mu2;
  for (std::int64_t j = -k; j <= k; ++j) {
    auto lam = b.at(j);
    if (!lam || !(*lam == (j >= 1 ? w.mu2 : inv))) c.core_ok = false;
  }
  for (const auto& x : b.values)
    if (is_zero(x)) c.nonzero = false;
  if ((b.above && is_zero(*b.above)) || (b.below && is_zero(*b.below))) c.nonzero = false;

  std::optional<R> up = b.above ? std::optional<R>(magnitude(*b.above)) : std::nullopt;
  std::optional<R> down =
      b.below && !is_zero(*b.below) ? std::optional<R>(R(1) / magnitude(*b.below)) : std::nullopt;
  c.forward = detail::geometric_clause(up);
  c.backward = detail::geometric_clause(down);
  if (!c.nonzero) {
    c.forward = Clause::Fails;
    c.backward = Clause::Fails;
    return c;
  }

  if (c.forward == Clause::Inconclusive) {
    R prod(1), sum(0);
    for (std::int64_t j = 1; j <= b.hi(); ++j) {
      prod *= magnitude(*b.at(j));
      sum += prod;
      c.forward_partial.push_back(sum);
    }
  }
  if (c.backward == Clause::Inconclusive) {
    R prod(1), sum(0);
    for (std::int64_t j = 0; j >= b.lo; --j) {
      prod *= magnitude(*b.at(j));
      sum += R(1) / prod;
      c.backward_partial.push_back(sum);
    }
  }
  if (!b.above || !b.below) c.note = "tail undeclared; summability checked by partial sums only";
  return c;
}

template <Scalar S>
GridConditionReport<S> check_grid_weights(const WeightAssignment<S>& w) {
  using R = real_t<S>;
  w.validate_mu();
  GridConditionReport<S> report;
  R m2 = magnitude(w.mu2);
  report.inf = R(1) / m2;
  report.sup = m2;
  for (const auto& [k, b] : w.grid_custom) {
    if (k < 1) throw InvalidArgument("grid branch index must be >= 1");
    report.branches.push_back(check_branch(w, k, b));
    for (const auto& x : b.values) {
      report.inf = std::min<R>(report.inf, magnitude(x));
      report.sup = std::max<R>(report.sup, magnitude(x));
    }
    for (const auto* t : {&b.above, &b.below}) {
      if (*t) {
        report.inf = std::min<R>(report.inf, magnitude(**t));
        report.sup = std::max<R>(report.sup, magnitude(**t));
      } else {
        report.bounded = report.bounded == Clause::Fails ? Clause::Fails : Clause::Inconclusive;
      }
    }
  }
  if (!(report.inf > R(0))) report.bounded = Clause::Fails;
  return report;
}

}  // namespace chainrec
