#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "chainrec/linear_op.hpp"
#include "chainrec/tree.hpp"
#include "chainrec/weights.hpp"

namespace chainrec {

template <Scalar S>
using WeightFn = std::function<std::optional<S>(VertexId)>;

/// Weighted backward shift: e_u ↦ λ_u e_{par(u)}, i.e. [Bf](v) = Σ_{u ∈ Chi(v)} λ_u f(u).
///
/// A root maps to 0. A vertex whose parent lies outside the window gets a
/// leaking column. Zero weights give zero columns.
template <Scalar S>
LinearOp<S> shift_from_weights(const DirectedTree& tree, const WeightFn<S>& weight, OpFamily family) {
  require_valid(tree);
  LinearOp<S> op(family, tree.vertices(), tree.params());
  for (VertexId u : tree.vertices()) {
    Column<S> col;
    if (auto p = tree.parent(u)) {
      auto w = weight(u);
      if (!w) throw MissingWeight(u);
      col.entries.emplace_back(*p, *w);
    } else if (auto outside = tree.outside_parent(u)) {
      col.leak_target = *outside;
    }
    op.set_column(u, std::move(col));
  }
  for (VertexId v : tree.children_outside_set()) op.mark_incomplete_row(v);
  return op;
}

/// Shift on a comb (or line) tree with μ₁ on line vertices and μ₂ on fingers.
template <Scalar S>
LinearOp<S> shift_from_weights(const DirectedTree& tree, const WeightAssignment<S>& weights) {
  OpFamily family = OpFamily::Custom;
  if (tree.kind() == TreeKind::Comb) {
    weights.validate_mu();
    family = OpFamily::CombShift;
  } else if (tree.kind() == TreeKind::Line || tree.kind() == TreeKind::RootedLine) {
    family = OpFamily::ClassicalShift;
  }
  LinearOp<S> op = shift_from_weights<S>(
      tree, WeightFn<S>([&](VertexId v) { return weights.shift_weight(v); }), family);
  op.mu1 = weights.mu1;
  op.mu2 = weights.mu2;
  return op;
}

namespace detail {

template <Scalar S>
void require_grid(const DirectedTree& tree, const WeightAssignment<S>& weights) {
  if (tree.kind() != TreeKind::Grid) throw InvalidArgument("grid operator needs a grid tree");
  require_valid(tree);
  auto report = check_grid_weights(weights);
  if (auto failure = report.first_failure(); !failure.empty()) throw WeightConditionViolation(failure);
}

template <Scalar S>
void record_grid_notes(LinearOp<S>& op, const WeightAssignment<S>& weights) {
  op.mu1 = weights.mu1;
  op.mu2 = weights.mu2;
  op.notes["weights"] = weights.grid_custom.empty() ? "default" : "custom";
  if (check_grid_weights(weights).inconclusive()) op.notes["weight_conditions"] = "inconclusive";
}

}  // namespace detail

/// The invertible grid operator:
///   e_n ↦ μ₁ e_{n-1},
///   e_{(-k,j)} ↦ λ_{(-k,j)} e_{(-k,j-1)} for j ≠ 1,
///   e_{(-k,1)} ↦ μ₂ (e_{(-k,0)} + e_{-k}).
template <Scalar S>
LinearOp<S> build_grid_T(const DirectedTree& tree, const WeightAssignment<S>& weights) {
  detail::require_grid(tree, weights);
  const auto& p = tree.params();
  LinearOp<S> op(OpFamily::GridT, tree.vertices(), p);
  for (VertexId u : tree.vertices()) {
    Column<S> col;
    if (u.is_line()) {
      VertexId target = VertexId::line(u.n() - 1);
      if (tree.contains(target))
        col.entries.emplace_back(target, weights.mu1);
      else
        col.leak_target = target;
    } else if (u.j() == 1) {
      col.entries.emplace_back(VertexId::branch(u.k(), 0), weights.mu2);
      col.entries.emplace_back(VertexId::line(-u.k()), weights.mu2);
    } else {
      VertexId target = VertexId::branch(u.k(), u.j() - 1);
      auto lam = weights.grid_lambda(u.k(), u.j());
      if (!lam) throw MissingWeight(u);
      if (tree.contains(target))
        col.entries.emplace_back(target, *lam);
      else
        col.leak_target = target;
    }
    op.set_column(u, std::move(col));
  }
  op.mark_incomplete_row(VertexId::line(p.n_max));
  for (std::int64_t n = p.n_min; n < -p.k_max; ++n) op.mark_incomplete_row(VertexId::line(n));
  for (std::int64_t k = 1; k <= p.k_max; ++k) op.mark_incomplete_row(VertexId::branch(k, p.j_max));
  detail::record_grid_notes(op, weights);
  return op;
}

/// The explicit inverse of the grid operator:
///   e_n ↦ (1/μ₁) e_{n+1},
///   e_{(-k,j)} ↦ (1/λ_{(-k,j+1)}) e_{(-k,j+1)} for j ≠ 0,
///   e_{(-k,0)} ↦ (1/μ₂) e_{(-k,1)} - (1/μ₁) e_{-k+1}.
template <Scalar S>
LinearOp<S> build_grid_T_inverse(const DirectedTree& tree, const WeightAssignment<S>& weights) {
  detail::require_grid(tree, weights);
  const auto& p = tree.params();
  LinearOp<S> op(OpFamily::GridTInverse, tree.vertices(), p);
  const S inv1 = S(1) / weights.mu1;
  const S inv2 = S(1) / weights.mu2;
  for (VertexId u : tree.vertices()) {
    Column<S> col;
    if (u.is_line()) {
      VertexId target = VertexId::line(u.n() + 1);
      if (tree.contains(target))
        col.entries.emplace_back(target, inv1);
      else
        col.leak_target = target;
    } else if (u.j() == 0) {
      col.entries.emplace_back(VertexId::branch(u.k(), 1), inv2);
      col.entries.emplace_back(VertexId::line(-u.k() + 1), S(-inv1));
    } else {
      VertexId target = VertexId::branch(u.k(), u.j() + 1);
      auto lam = weights.grid_lambda(u.k(), u.j() + 1);
      if (!lam) throw MissingWeight(target);
      if (tree.contains(target))
        col.entries.emplace_back(target, S(1) / *lam);
      else
        col.leak_target = target;
    }
    op.set_column(u, std::move(col));
  }
  op.mark_incomplete_row(VertexId::line(p.n_min));
  for (std::int64_t n = p.n_min; n <= -p.k_max; ++n) op.mark_incomplete_row(VertexId::line(n));
  for (std::int64_t k = 1; k <= p.k_max; ++k) op.mark_incomplete_row(VertexId::branch(k, p.j_min));
  detail::record_grid_notes(op, weights);
  return op;
}

template <Scalar S>
std::shared_ptr<const LinearOp<S>> share(LinearOp<S> op) {
  return std::make_shared<const LinearOp<S>>(std::move(op));
}

}  // namespace chainrec
