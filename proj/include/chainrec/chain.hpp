#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chainrec/linear_op.hpp"
#include "chainrec/norm.hpp"

namespace chainrec {

/// A finite sequence f_0, ..., f_m with every link error ∥f_l − T f_{l−1}∥ < δ.
///
/// Construction does not check validity; use is_valid() or defect().
template <Scalar S>
struct DeltaChain {
  using real_type = real_t<S>;

  std::vector<SeqVector<S>> vectors;
  real_type delta{};
  std::shared_ptr<const LinearOp<S>> op;
  NormSpec norm = Sup{};
  std::string label;
  /// Set when a floating-point concatenation accepted an inexact junction.
  std::optional<real_type> junction_tolerance;

  std::size_t length() const { return vectors.empty() ? 0 : vectors.size() - 1; }
  const SeqVector<S>& front() const { return vectors.front(); }
  const SeqVector<S>& back() const { return vectors.back(); }
};

template <Scalar S>
struct PerturbationSeq {
  std::vector<SeqVector<S>> g;  // g[0] is g_1
};

namespace detail {

template <Scalar S>
void require_chain(const DeltaChain<S>& c) {
  if (!c.op) throw InvalidArgument("chain has no operator");
  if (c.vectors.size() < 2) throw InvalidArgument("chain length must be at least 1");
}

}  // namespace detail

/// g_l = f_l − T f_{l−1} for l = 1..m.
template <Scalar S>
PerturbationSeq<S> to_perturbations(const DeltaChain<S>& c) {
  detail::require_chain(c);
  PerturbationSeq<S> out;
  out.g.reserve(c.length());
  for (std::size_t l = 1; l < c.vectors.size(); ++l) {
    try {
      out.g.push_back(c.vectors[l] - c.op->apply(c.vectors[l - 1]));
    } catch (const LeakageOutOfWindow& e) {
      throw e.at_step(l);
    }
  }
  return out;
}

template <Scalar S>
std::vector<real_t<S>> link_defects(const DeltaChain<S>& c) {
  std::vector<real_t<S>> out;
  for (const auto& g : to_perturbations(c).g) out.push_back(norm(g, c.norm));
  return out;
}

/// max_l ∥f_l − T f_{l−1}∥.
template <Scalar S>
real_t<S> defect(const DeltaChain<S>& c) {
  real_t<S> best(0);
  for (const auto& d : link_defects(c)) best = std::max<real_t<S>>(best, d);
  return best;
}

/// Strict: defect < δ.
template <Scalar S>
bool is_valid(const DeltaChain<S>& c) {
  return defect(c) < c.delta;
}

template <Scalar S>
real_t<S> margin(const DeltaChain<S>& c) {
  return c.delta - defect(c);
}

/// T^m f_0 + Σ_l T^{m−l} g_l.
template <Scalar S>
SeqVector<S> reconstruct(const SeqVector<S>& f0, const PerturbationSeq<S>& perts, const LinearOp<S>& op) {
  const std::size_t m = perts.g.size();
  SeqVector<S> out = op.apply_power(f0, m);
  for (std::size_t l = 1; l <= m; ++l) out += op.apply_power(perts.g[l - 1], m - l);
  return out;
}

template <Scalar S>
bool same_operator(const LinearOp<S>& a, const LinearOp<S>& b) {
  if (&a == &b) return true;
  if (a.family() != b.family() || a.window() != b.window()) return false;
  for (const auto& [u, col] : a.columns()) {
    const auto& other = b.column(u);
    if (col.entries != other.entries || col.leak_target != other.leak_target) return false;
  }
  return true;
}

inline constexpr double default_junction_tolerance = 0x1p-40;

/// Joins two chains at c1's end = c2's start. δ of the result is the larger δ.
///
/// Exact mode demands identical junction vectors. Floating mode accepts a
/// sup-distance up to `tolerance` and records it on the result.
template <Scalar S>
DeltaChain<S> concat(const DeltaChain<S>& c1, const DeltaChain<S>& c2,
                     double tolerance = default_junction_tolerance) {
  detail::require_chain(c1);
  detail::require_chain(c2);
  if (!same_operator(*c1.op, *c2.op)) throw InvalidArgument("concat: chains use different operators");
  if (!same_norm(c1.norm, c2.norm)) throw InvalidArgument("concat: chains use different norms");
  DeltaChain<S> out;
  out.op = c1.op;
  out.norm = c1.norm;
  out.delta = std::max<real_t<S>>(c1.delta, c2.delta);
  out.label = c1.label.empty() || c2.label.empty() ? c1.label + c2.label : c1.label + " + " + c2.label;
  out.junction_tolerance = c1.junction_tolerance;
  if (c2.junction_tolerance && (!out.junction_tolerance || *out.junction_tolerance < *c2.junction_tolerance))
    out.junction_tolerance = c2.junction_tolerance;

  if (!(c1.back() == c2.front())) {
    if constexpr (is_exact_v<S>) {
      throw EndpointMismatch("concat: end of first chain differs from start of second");
    } else {
      real_t<S> gap = norm(SeqVector<S>(c1.back() - c2.front()), NormSpec{Sup{}});
      if (!(gap <= tolerance))
        throw EndpointMismatch("concat: junction gap " + format_real(gap) + " exceeds tolerance " +
                               format_real(tolerance));
      out.junction_tolerance = std::max<real_t<S>>(out.junction_tolerance.value_or(real_t<S>(0)), real_t<S>(tolerance));
    }
  }
  out.vectors = c1.vectors;
  out.vectors.insert(out.vectors.end(), c2.vectors.begin() + 1, c2.vectors.end());
  return out;
}

/// Every vector multiplied by α; δ becomes |α|·δ.
template <Scalar S>
DeltaChain<S> scale_chain(const S& alpha, const DeltaChain<S>& c) {
  detail::require_chain(c);
  if (is_zero(alpha)) throw InvalidArgument("scale_chain: alpha must be nonzero");
  DeltaChain<S> out = c;
  for (auto& f : out.vectors) f *= alpha;
  out.delta = magnitude(alpha) * c.delta;
  if (out.junction_tolerance) out.junction_tolerance = magnitude(alpha) * *out.junction_tolerance;
  return out;
}

/// The chain 0, 0, ..., 0 of length m.
template <Scalar S>
DeltaChain<S> zero_chain(std::size_t m, real_t<S> delta, std::shared_ptr<const LinearOp<S>> op, NormSpec norm = Sup{}) {
  if (m < 1) throw InvalidArgument("chain length must be at least 1");
  DeltaChain<S> out;
  out.vectors.assign(m + 1, SeqVector<S>{});
  out.delta = delta;
  out.op = std::move(op);
  out.norm = std::move(norm);
  out.label = "zero";
  return out;
}

}  // namespace chainrec
