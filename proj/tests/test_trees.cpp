#include <gtest/gtest.h>

#include "support.hpp"

using namespace chainrec;

namespace {
TruncationParams comb_params(std::int64_t k_max) { return {-k_max - 2, 3, k_max, 1, k_max}; }
}  // namespace

TEST(CombTree, FingersHangFromTheLine) {
  auto t = build_comb_tree(comb_params(3));
  EXPECT_TRUE(validate(t).empty());
  EXPECT_EQ(t.parent(VertexId::branch(3, 1)), VertexId::line(-3));
  EXPECT_EQ(t.parent(VertexId::branch(3, 3)), VertexId::branch(3, 2));
  EXPECT_EQ(t.children(VertexId::line(-2)).size(), 2u);  // -1 and (-2,1)
  EXPECT_TRUE(t.children(VertexId::branch(2, 2)).empty());
  // 9 line vertices + 1 + 2 + 3 finger vertices.
  EXPECT_EQ(t.vertices().size(), 9u + 6u);
}

TEST(CombTree, WindowCutsAreFlagged) {
  auto t = build_comb_tree(comb_params(2));
  EXPECT_EQ(t.outside_parent(VertexId::line(-4)), VertexId::line(-5));
  EXPECT_TRUE(t.children_outside(VertexId::line(3)));
  EXPECT_TRUE(t.children_outside(VertexId::line(-3)));  // its finger is beyond k_max
  EXPECT_FALSE(t.children_outside(VertexId::line(-2)));
}

TEST(CombTree, RejectsBadParameters) {
  EXPECT_THROW(build_comb_tree({-1, 3, 2, 1, 2}), InvalidArgument);  // n_min > -k_max
  EXPECT_THROW(build_comb_tree({-3, 0, 2, 1, 2}), InvalidArgument);  // n_max < 1
  EXPECT_THROW(build_comb_tree({-3, 3, 0, 1, 0}), InvalidArgument);
}

TEST(GridTree, BranchesAreBiInfinitePaths) {
  auto t = build_grid_tree({-3, 2, 2, -4, 4});
  EXPECT_TRUE(validate(t).empty());
  EXPECT_EQ(t.parent(VertexId::branch(2, 1)), VertexId::branch(2, 0));
  EXPECT_EQ(t.outside_parent(VertexId::branch(1, -4)), VertexId::branch(1, -5));
  EXPECT_TRUE(t.children_outside(VertexId::branch(1, 4)));
  EXPECT_EQ(t.vertices().size(), 6u + 2u * 9u);
  EXPECT_THROW(build_grid_tree({-3, 2, 2, 0, 4}), InvalidArgument);
}

TEST(LineTree, RootedAndBilateral) {
  auto rooted = build_line_tree({1, 6, 0, 0, 0}, true);
  EXPECT_TRUE(validate(rooted).empty());
  EXPECT_EQ(rooted.roots(), std::vector<VertexId>{VertexId::line(1)});
  auto line = build_line_tree({-4, 4, 0, 0, 0}, false);
  EXPECT_EQ(line.outside_parent(VertexId::line(-4)), VertexId::line(-5));
  EXPECT_THROW(build_line_tree({2, 1, 0, 0, 0}, false), InvalidArgument);
}

TEST(Validate, ReportsEachAxiom) {
  DirectedTree t(TreeKind::Custom, {});
  for (int n = 0; n < 4; ++n) t.add_vertex(VertexId::line(n));
  t.add_edge(VertexId::line(0), VertexId::line(1));
  t.add_edge(VertexId::line(2), VertexId::line(1));  // second parent
  t.add_edge(VertexId::line(3), VertexId::line(3));  // self loop
  std::set<std::string> axioms;
  for (const auto& v : validate(t)) axioms.insert(v.axiom);
  EXPECT_TRUE(axioms.count("multiple parents"));
  EXPECT_TRUE(axioms.count("self loop"));
  EXPECT_THROW(require_valid(t), InvalidTree);
}

TEST(Validate, DetectsCyclesAndDisconnection) {
  DirectedTree cyc(TreeKind::Custom, {});
  for (int n = 0; n < 3; ++n) cyc.add_vertex(VertexId::line(n));
  cyc.add_edge(VertexId::line(0), VertexId::line(1));
  cyc.add_edge(VertexId::line(1), VertexId::line(2));
  cyc.add_edge(VertexId::line(2), VertexId::line(0));
  bool cycle = false;
  for (const auto& v : validate(cyc)) cycle = cycle || v.axiom == "cycle";
  EXPECT_TRUE(cycle);

  DirectedTree split(TreeKind::Custom, {});
  split.add_vertex(VertexId::line(0));
  split.add_vertex(VertexId::line(5));
  bool disconnected = false;
  for (const auto& v : validate(split)) disconnected = disconnected || v.axiom == "disconnected";
  EXPECT_TRUE(disconnected);
}

TEST(Exhaustion, BreadthFirstBallsGrowToTheWindow) {
  auto t = build_comb_tree(comb_params(2));
  auto ex = breadth_first_exhaustion(t, VertexId::line(0));
  EXPECT_EQ(ex.at(1), std::set<VertexId>{VertexId::line(0)});
  EXPECT_EQ(ex.at(2).size(), 3u);  // -1, 0, 1
  EXPECT_TRUE(ex.covers(t.vertices()));
  for (std::size_t k = 2; k <= ex.size(); ++k) EXPECT_TRUE(std::includes(ex.at(k).begin(), ex.at(k).end(), ex.at(k - 1).begin(), ex.at(k - 1).end()));
  EXPECT_THROW(breadth_first_exhaustion(t, VertexId::line(99)), InvalidArgument);
}
