#pragma once

#include <optional>
#include <vector>

#include "chainrec/linear_op.hpp"
#include "chainrec/norm.hpp"

namespace chainrec {

/// The unique chain of vertices through which earlier coordinates reach `target`.
///
/// coefficients[l] is the factor by which a unit value at sources[l] reaches
/// the target after l applications; coefficients[0] = 1 at sources[0] = target.
/// Once the path ends (no vertex feeds the current one) the remaining
/// coefficients are 0 and `sources` stops growing.
template <Scalar S>
struct InfluencePath {
  VertexId target;
  std::size_t horizon = 0;
  std::vector<S> coefficients;
  std::vector<VertexId> sources;

  bool ended() const { return sources.size() < coefficients.size(); }
  std::optional<VertexId> source(std::size_t l) const {
    return l < sources.size() ? std::optional<VertexId>(sources[l]) : std::nullopt;
  }
};

/// Walks rows of the operator upward from `target` for `horizon` steps.
/// Throws NonUniqueInfluence when two vertices feed the same coordinate and
/// InfluenceTruncated when the walk needs a row the window only sees partially.
template <Scalar S>
InfluencePath<S> influence_path(const LinearOp<S>& op, VertexId target, std::size_t horizon) {
  if (!op.contains(target)) throw LeakageOutOfWindow(target);
  InfluencePath<S> path;
  path.target = target;
  path.horizon = horizon;
  path.coefficients.reserve(horizon + 1);
  path.coefficients.push_back(S(1));
  path.sources.push_back(target);
  S w(1);
  VertexId at = target;
  bool ended = false;
  for (std::size_t l = 1; l <= horizon; ++l) {
    if (!ended) {
      if (op.row_incomplete(at)) throw InfluenceTruncated(at, l);
      const auto& row = op.row(at);
      if (row.size() > 1) throw NonUniqueInfluence(at);
      if (row.empty()) {
        ended = true;
      } else {
        at = row.front().first;
        w = w * row.front().second;
        path.sources.push_back(at);
      }
    }
    path.coefficients.push_back(ended ? S(0) : w);
  }
  return path;
}

/// Infimum over perturbation sequences g_1..g_m of max_l ∥g_l∥ such that
/// [T^m source + Σ_l T^{m−l} g_l](target) = value.
///
/// Equals |value − (T^m source)(target)| / Σ_{l<m} |w_l|. Empty when the target
/// value is unreachable (zero denominator, nonzero numerator). Requires a norm
/// that dominates every coordinate with constant 1.
template <Scalar S>
std::optional<real_t<S>> min_delta_reach(const LinearOp<S>& op, const SeqVector<S>& source, VertexId target,
                                         const S& value, std::size_t m, const NormSpec& norm) {
  using R = real_t<S>;
  if (m < 1) throw InvalidArgument("min_delta_reach needs length m >= 1");
  if (!dominates_coordinates(norm)) throw InvalidArgument("min_delta_reach needs an Lp or sup norm");
  const auto path = influence_path(op, target, m);
  S reached(0);
  if (auto u = path.source(m)) reached = path.coefficients[m] * source.at(*u);
  const R numerator = magnitude(S(value - reached));
  R denominator(0);
  for (std::size_t l = 0; l < m; ++l) denominator += magnitude(path.coefficients[l]);
  if (is_zero(numerator)) return R(0);
  if (is_zero(denominator)) return std::nullopt;
  return numerator / denominator;
}

}  // namespace chainrec
