#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/norm.hpp"
#include "chainrec/vertex.hpp"

namespace chainrec {

/// Finite window onto an infinite vertex set.
struct TruncationParams {
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;
  std::int64_t k_max = 0;
  std::int64_t j_min = 0;
  std::int64_t j_max = 0;

  bool operator==(const TruncationParams&) const = default;
};

enum class TreeKind { Line, RootedLine, Comb, Grid, Custom };

inline const char* to_string(TreeKind kind) {
  switch (kind) {
    case TreeKind::Line: return "line";
    case TreeKind::RootedLine: return "rooted_line";
    case TreeKind::Comb: return "comb";
    case TreeKind::Grid: return "grid";
    case TreeKind::Custom: return "custom";
  }
  return "?";
}

/// Directed tree on a finite window. Edges point from parent to child.
///
/// Window-cut vertices are flagged: `outside_parent(v)` names a parent that
/// exists in the infinite vertex set but not in the window, and
/// `children_outside(v)` marks vertices with at least one child beyond it.
class DirectedTree {
 public:
  DirectedTree() = default;
  DirectedTree(TreeKind kind, TruncationParams params) : kind_(kind), params_(params) {}

  void add_vertex(VertexId v) { vertices_.insert(v); }

  /// Records the edge both ways. Inconsistent input (a second parent, a cycle)
  /// is kept so that `validate` can report it.
  void add_edge(VertexId parent, VertexId child) {
    edges_.emplace_back(parent, child);
    parents_[child].push_back(parent);
    children_[parent].push_back(child);
  }

  void mark_parent_outside(VertexId v, VertexId outside) { outside_parent_[v] = outside; }
  void mark_children_outside(VertexId v) { children_outside_.insert(v); }

  TreeKind kind() const { return kind_; }
  const TruncationParams& params() const { return params_; }
  const std::set<VertexId>& vertices() const { return vertices_; }
  const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }
  bool contains(VertexId v) const { return vertices_.count(v) != 0; }

  std::optional<VertexId> parent(VertexId v) const {
    auto it = parents_.find(v);
    if (it == parents_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
  }
  std::size_t parent_count(VertexId v) const {
    auto it = parents_.find(v);
    return it == parents_.end() ? 0 : it->second.size();
  }
  /// Children in insertion order (line child before branch child for the builders).
  const std::vector<VertexId>& children(VertexId v) const {
    static const std::vector<VertexId> none;
    auto it = children_.find(v);
    return it == children_.end() ? none : it->second;
  }
  std::optional<VertexId> outside_parent(VertexId v) const {
    auto it = outside_parent_.find(v);
    if (it == outside_parent_.end()) return std::nullopt;
    return it->second;
  }
  bool children_outside(VertexId v) const { return children_outside_.count(v) != 0; }
  bool is_window_cut(VertexId v) const { return outside_parent(v).has_value() || children_outside(v); }

  const std::map<VertexId, VertexId>& outside_parents() const { return outside_parent_; }
  const std::set<VertexId>& children_outside_set() const { return children_outside_; }

  /// Parentless vertices that are not window cuts: the genuine roots.
  std::vector<VertexId> roots() const {
    std::vector<VertexId> out;
    for (VertexId v : vertices_)
      if (parent_count(v) == 0 && !outside_parent(v)) out.push_back(v);
    return out;
  }

 private:
  TreeKind kind_ = TreeKind::Custom;
  TruncationParams params_{};
  std::set<VertexId> vertices_;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::map<VertexId, std::vector<VertexId>> parents_;
  std::map<VertexId, std::vector<VertexId>> children_;
  std::map<VertexId, VertexId> outside_parent_;
  std::set<VertexId> children_outside_;
};

struct TreeViolation {
  std::string axiom;
  std::vector<VertexId> witnesses;
};

/// Checks the tree axioms on the window. Empty result iff the tree is valid.
///
/// Connectivity is judged after identifying window cuts: a component is fine when
/// it is the only one or when it reaches outside the window through a cut vertex.
inline std::vector<TreeViolation> validate(const DirectedTree& tree) {
  std::vector<TreeViolation> out;
  const auto& vertices = tree.vertices();

  for (const auto& [p, c] : tree.edges()) {
    if (p == c) out.push_back({"self loop", {p}});
    if (!tree.contains(p) || !tree.contains(c)) out.push_back({"edge endpoint outside vertex set", {p, c}});
  }
  for (VertexId v : vertices) {
    if (tree.parent_count(v) > 1) out.push_back({"multiple parents", {v}});
    if (tree.parent_count(v) > 0 && tree.outside_parent(v)) out.push_back({"parent both inside and outside window", {v}});
  }
  if (auto roots = tree.roots(); roots.size() > 1) out.push_back({"multiple roots", roots});

  // Cycles: follow parent pointers from every vertex.
  std::set<VertexId> reported;
  for (VertexId start : vertices) {
    std::set<VertexId> seen;
    std::optional<VertexId> cur = start;
    while (cur && tree.contains(*cur)) {
      if (!seen.insert(*cur).second) {
        if (!reported.count(*cur)) {
          std::vector<VertexId> cycle;
          VertexId w = *cur;
          do {
            cycle.push_back(w);
            reported.insert(w);
            w = *tree.parent(w);
          } while (w != *cur);
          out.push_back({"cycle", cycle});
        }
        break;
      }
      cur = tree.parent(*cur);
    }
  }

  // Undirected connectivity.
  std::map<VertexId, std::vector<VertexId>> adjacency;
  for (const auto& [p, c] : tree.edges()) {
    if (!tree.contains(p) || !tree.contains(c)) continue;
    adjacency[p].push_back(c);
    adjacency[c].push_back(p);
  }
  std::set<VertexId> visited;
  std::vector<std::vector<VertexId>> components;
  for (VertexId v : vertices) {
    if (visited.count(v)) continue;
    std::vector<VertexId> comp;
    std::deque<VertexId> queue{v};
    visited.insert(v);
    while (!queue.empty()) {
      VertexId u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (VertexId w : adjacency[u])
        if (visited.insert(w).second) queue.push_back(w);
    }
    components.push_back(std::move(comp));
  }
  if (components.size() > 1) {
    for (const auto& comp : components) {
      bool escapes = std::any_of(comp.begin(), comp.end(), [&](VertexId u) { return tree.is_window_cut(u); });
      if (!escapes) out.push_back({"disconnected", {comp.front()}});
    }
  }
  return out;
}

inline void require_valid(const DirectedTree& tree) {
  auto violations = validate(tree);
  if (violations.empty()) return;
  std::string what = "invalid tree: " + violations.front().axiom;
  for (VertexId v : violations.front().witnesses) what += " " + v.str();
  throw InvalidTree(what);
}

/// Line window [n_min, n_max] with Chi(n) = {n+1}. A rooted line is the ℕ case
/// (n_min is the root); otherwise n_min is a window cut.
inline DirectedTree build_line_tree(const TruncationParams& params, bool rooted) {
  if (params.n_min > params.n_max) throw InvalidArgument("empty line range");
  DirectedTree tree(rooted ? TreeKind::RootedLine : TreeKind::Line, params);
  for (std::int64_t n = params.n_min; n <= params.n_max; ++n) tree.add_vertex(VertexId::line(n));
  for (std::int64_t n = params.n_min + 1; n <= params.n_max; ++n)
    tree.add_edge(VertexId::line(n - 1), VertexId::line(n));
  if (!rooted) tree.mark_parent_outside(VertexId::line(params.n_min), VertexId::line(params.n_min - 1));
  tree.mark_children_outside(VertexId::line(params.n_max));
  return tree;
}

inline void check_branch_params(const TruncationParams& params) {
  if (params.n_min > params.n_max) throw InvalidArgument("empty line range");
  if (params.k_max < 0) throw InvalidArgument("k_max must be non-negative");
  if (params.n_min > -params.k_max)
    throw InvalidArgument("n_min must be <= -k_max so every branch attachment point exists");
  if (params.n_max < 1) throw InvalidArgument("n_max must be >= 1");
}

/// The comb: the integer line with a finger (-k,1),...,(-k,k) hanging from each -k.
inline DirectedTree build_comb_tree(const TruncationParams& params) {
  if (params.k_max < 1) throw InvalidArgument("comb tree needs k_max >= 1");
  check_branch_params(params);
  DirectedTree tree(TreeKind::Comb, params);
  for (std::int64_t n = params.n_min; n <= params.n_max; ++n) tree.add_vertex(VertexId::line(n));
  for (std::int64_t n = params.n_min + 1; n <= params.n_max; ++n)
    tree.add_edge(VertexId::line(n - 1), VertexId::line(n));
  for (std::int64_t k = 1; k <= params.k_max; ++k) {
    for (std::int64_t j = 1; j <= k; ++j) tree.add_vertex(VertexId::branch(k, j));
    tree.add_edge(VertexId::line(-k), VertexId::branch(k, 1));
    for (std::int64_t j = 2; j <= k; ++j) tree.add_edge(VertexId::branch(k, j - 1), VertexId::branch(k, j));
  }
  tree.mark_parent_outside(VertexId::line(params.n_min), VertexId::line(params.n_min - 1));
  tree.mark_children_outside(VertexId::line(params.n_max));
  for (std::int64_t n = params.n_min; n < -params.k_max; ++n) tree.mark_children_outside(VertexId::line(n));
  return tree;
}

/// The grid vertex set: the line plus, for each k, a path (-k,j), j_min <= j <= j_max.
///
/// Each branch is linked (-k,j-1) -> (-k,j); its lowest vertex is a window cut,
/// so the window is a forest whose components all reach outside.
inline DirectedTree build_grid_tree(const TruncationParams& params) {
  check_branch_params(params);
  if (params.k_max > 0 && !(params.j_min < 0 && 0 < params.j_max))
    throw InvalidArgument("grid tree needs j_min < 0 < j_max");
  DirectedTree tree(TreeKind::Grid, params);
  for (std::int64_t n = params.n_min; n <= params.n_max; ++n) tree.add_vertex(VertexId::line(n));
  for (std::int64_t n = params.n_min + 1; n <= params.n_max; ++n)
    tree.add_edge(VertexId::line(n - 1), VertexId::line(n));
  tree.mark_parent_outside(VertexId::line(params.n_min), VertexId::line(params.n_min - 1));
  tree.mark_children_outside(VertexId::line(params.n_max));
  for (std::int64_t k = 1; k <= params.k_max; ++k) {
    for (std::int64_t j = params.j_min; j <= params.j_max; ++j) tree.add_vertex(VertexId::branch(k, j));
    for (std::int64_t j = params.j_min + 1; j <= params.j_max; ++j)
      tree.add_edge(VertexId::branch(k, j - 1), VertexId::branch(k, j));
    tree.mark_parent_outside(VertexId::branch(k, params.j_min), VertexId::branch(k, params.j_min - 1));
    tree.mark_children_outside(VertexId::branch(k, params.j_max));
  }
  return tree;
}

/// F_k = all vertices within undirected distance k-1 of `center`, until the window is exhausted.
inline Exhaustion breadth_first_exhaustion(const DirectedTree& tree, VertexId center) {
  if (!tree.contains(center)) throw InvalidArgument("exhaustion center " + center.str() + " not in tree");
  std::map<VertexId, std::vector<VertexId>> adjacency;
  for (const auto& [p, c] : tree.edges()) {
    adjacency[p].push_back(c);
    adjacency[c].push_back(p);
  }
  std::map<VertexId, std::size_t> dist{{center, 0}};
  std::deque<VertexId> queue{center};
  std::size_t max_dist = 0;
  while (!queue.empty()) {
    VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : adjacency[u])
      if (dist.emplace(w, dist[u] + 1).second) {
        max_dist = std::max(max_dist, dist[u] + 1);
        queue.push_back(w);
      }
  }
  if (dist.size() != tree.vertices().size())
    throw InvalidArgument("breadth-first exhaustion needs a connected window");
  std::vector<std::set<VertexId>> sets(max_dist + 1);
  for (const auto& [v, d] : dist)
    for (std::size_t k = d; k <= max_dist; ++k) sets[k].insert(v);
  return Exhaustion(std::move(sets), "bfs(" + center.str() + ")");
}

}  // namespace chainrec
