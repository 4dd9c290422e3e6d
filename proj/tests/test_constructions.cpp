#include <gtest/gtest.h>

#include "support.hpp"

using namespace chainrec;

namespace {

// Independent scans of the defining inequalities, starting from the smallest allowed length.
std::int64_t scan_m1(const Rational& delta, const Rational& mu1) {
  for (std::int64_t m = 2;; ++m)
    if (1 < delta * ipow(mu1, m - 1)) return m;
}
std::int64_t scan_m2(const Rational& delta, const Rational& mu1, const Rational& mu2) {
  for (std::int64_t m = 2;; ++m)
    if (ipow(mu1, m) < delta * ipow(mu2, m - 1)) return m;
}

struct Setup {
  Rational mu1, mu2;
};
const std::vector<Setup> parameter_grid{{Rational(3, 2), 2}, {2, 4}, {3, 5}};
const std::vector<Rational> delta_grid{1, Rational(1, 10), Rational(1, 100), Rational(1, 1000)};

std::shared_ptr<const LinearOp<Rational>> op_for(OpFamily family, const Setup& s, const std::vector<std::int64_t>& ns,
                                                 const std::vector<Rational>& deltas) {
  std::optional<WindowRequirement> all;
  std::int64_t k = 1;
  for (const auto& d : deltas)
    for (auto n : ns)
      for (auto dir : {Direction::FromZero, Direction::ToZero}) {
        auto r = requirement_for_basis<Rational>(n, d, family, s.mu1, s.mu2, dir);
        k = std::max(k, r.branch_k);
        all = all ? merge(*all, r) : r;
      }
  auto w = WeightAssignment<Rational>::standard(s.mu1, s.mu2);
  if (family == OpFamily::GridT) {
    auto p = all->minimal(TreeKind::Grid);
    p.k_max = std::max(p.k_max, k);
    return share(build_grid_T(build_grid_tree(p), w));
  }
  auto p = all->minimal(TreeKind::Comb);
  p.k_max = std::max(p.k_max, k);
  p.j_max = p.k_max;
  p.n_min = std::min(p.n_min, -p.k_max);
  return share(shift_from_weights(build_comb_tree(p), w));
}

const auto zero = SeqVector<Rational>{};
SeqVector<Rational> e(std::int64_t n) { return SeqVector<Rational>::unit(VertexId::line(n)); }

}  // namespace

TEST(Lengths, PaperValues) {
  EXPECT_EQ(m1_for<Rational>(Rational(1, 10), Rational(2)), 5);
  EXPECT_EQ(m1_for<Rational>(Rational(2), Rational(2)), 2);
  EXPECT_EQ(m2_for<Rational>(Rational(1, 10), Rational(2), Rational(4)), 6);
  EXPECT_EQ(grid_n_for<Rational>(Rational(1, 10), Rational(2), Rational(4)), 6);
  EXPECT_THROW(m1_for<Rational>(Rational(1, 10), Rational(1)), InvalidArgument);
  EXPECT_THROW(m2_for<Rational>(Rational(1, 10), Rational(4), Rational(2)), InvalidArgument);
  EXPECT_THROW(m1_for<Rational>(Rational(0), Rational(2)), InvalidArgument);
}

TEST(Lengths, MinimalOverTheGrid) {
  for (const auto& s : parameter_grid)
    for (const auto& d : delta_grid) {
      const auto m1 = m1_for<Rational>(d, s.mu1);
      EXPECT_EQ(m1, scan_m1(d, s.mu1));
      if (m1 > 2) {  // the boundary: m1 - 1 fails
        EXPECT_FALSE(1 < d * ipow(s.mu1, m1 - 2));
      }
      const auto m2 = m2_for<Rational>(d, s.mu1, s.mu2);
      EXPECT_EQ(m2, scan_m2(d, s.mu1, s.mu2));
      if (m2 > 2) {
        EXPECT_FALSE(ipow(s.mu1, m2 - 1) < d * ipow(s.mu2, m2 - 2));
      }
    }
}

TEST(Lengths, FloatAgreesWithExactOnTheGrid) {
  for (const auto& s : parameter_grid)
    for (const auto& d : delta_grid) {
      const double df = d.convert_to<double>(), m1 = s.mu1.convert_to<double>(), m2 = s.mu2.convert_to<double>();
      EXPECT_EQ(m1_for<double>(df, m1), m1_for<Rational>(d, s.mu1));
      EXPECT_EQ(m2_for<double>(df, m1, m2), m2_for<Rational>(d, s.mu1, s.mu2));
    }
}

TEST(Step1, PaperExample) {
  auto op = op_for(OpFamily::CombShift, {2, 4}, {0}, {Rational(1, 10)});
  auto b = chain_zero_to_e0<Rational>(Rational(1, 10), op);
  EXPECT_EQ(b.chain.length(), 5u);
  EXPECT_EQ(b.chain.front(), zero);
  EXPECT_EQ(b.chain.back(), e(0));
  EXPECT_EQ(defect(b.chain), Rational(1, 16));
  auto links = link_defects(b.chain);
  EXPECT_EQ(std::count_if(links.begin(), links.end(), [](const Rational& x) { return x != 0; }), 1);
  EXPECT_EQ(*b.recipe.predicted_defect, Rational(1, 16));
}

TEST(Step1, GridGivesTheSameChain) {
  auto comb = op_for(OpFamily::CombShift, {2, 4}, {0}, {Rational(1, 10)});
  auto grid = op_for(OpFamily::GridT, {2, 4}, {0}, {Rational(1, 10)});
  EXPECT_EQ(chain_zero_to_e0<Rational>(Rational(1, 10), comb).chain.vectors,
            chain_zero_to_e0<Rational>(Rational(1, 10), grid).chain.vectors);
}

TEST(Step2Comb, PaperExample) {
  auto op = op_for(OpFamily::CombShift, {2, 4}, {0}, {Rational(1, 10)});
  auto b = chain_e0_to_zero_comb<Rational>(Rational(1, 10), op);
  EXPECT_EQ(b.chain.length(), 6u);
  EXPECT_EQ(b.chain.front(), e(0));
  EXPECT_EQ(b.chain.back(), zero);
  // (1/4)^5 * 2^6
  EXPECT_EQ(defect(b.chain), Rational(1, 16));
  auto g = to_perturbations(b.chain).g;
  EXPECT_EQ(std::count_if(g.begin(), g.end(), [](const auto& x) { return !x.empty(); }), 1);
  // The last orbit step cancels: mu1^m2 e_{-m2} - mu1^m2 e_{-m2}.
  EXPECT_TRUE(op->apply(b.chain.vectors[5]).empty());
}

TEST(Step2Grid, PaperExample) {
  auto op = op_for(OpFamily::GridT, {2, 4}, {0}, {Rational(1, 10)});
  auto b = chain_e0_to_zero_grid<Rational>(Rational(1, 10), op);
  ASSERT_EQ(*b.recipe.grid_n, 6);
  EXPECT_EQ(b.chain.length(), 11u);
  EXPECT_EQ(b.chain.back(), zero);
  EXPECT_EQ(b.chain.vectors[6], SeqVector<Rational>::unit(VertexId::branch(6, 0), Rational(-64)));
  auto links = link_defects(b.chain);
  std::vector<std::size_t> nonzero;
  for (std::size_t l = 0; l < links.size(); ++l)
    if (links[l] != 0) nonzero.push_back(l);
  ASSERT_EQ(nonzero, (std::vector<std::size_t>{0, 10}));
  EXPECT_EQ(links[0], links[10]);
  EXPECT_EQ(links[0], ipow(Rational(1, 4), 5) * ipow(Rational(2), 6));
}

TEST(Recipes, ValidWithExactEndpointsOverTheGrid) {
  for (auto family : {OpFamily::CombShift, OpFamily::GridT})
    for (const auto& s : parameter_grid) {
      auto op = op_for(family, s, {0}, delta_grid);
      for (const auto& d : delta_grid) {
        auto up = chain_zero_to_e0<Rational>(d, op);
        auto down = chain_line_to_zero<Rational>(0, d, op);
        EXPECT_TRUE(is_valid(up.chain)) << s.mu1 << " " << d;
        EXPECT_TRUE(is_valid(down.chain)) << s.mu1 << " " << d;
        EXPECT_EQ(up.chain.front(), zero);
        EXPECT_EQ(up.chain.back(), e(0));
        EXPECT_EQ(down.chain.front(), e(0));
        EXPECT_EQ(down.chain.back(), zero);
        EXPECT_EQ(defect(down.chain), *down.recipe.predicted_defect);
      }
    }
}

TEST(Recipes, ShiftedBasisVectors) {
  const Rational d(1, 10);
  for (auto family : {OpFamily::CombShift, OpFamily::GridT}) {
    auto op = op_for(family, {2, 4}, {-2, 3}, {d});
    auto minus2 = chain_for_basis<Rational>(-2, d, op, Direction::FromZero);
    EXPECT_EQ(minus2.chain.back(), e(-2));
    EXPECT_LT(defect(minus2.chain), d);
    auto plus3 = chain_for_basis<Rational>(3, d, op, Direction::ToZero);
    EXPECT_EQ(plus3.chain.front(), e(3));
    EXPECT_EQ(plus3.chain.back(), zero);
    EXPECT_LT(defect(plus3.chain), d);
    auto links = link_defects(plus3.chain);
    for (int l = 0; l < 3; ++l) EXPECT_EQ(links[l], 0) << l;  // the exact orbit prefix
    EXPECT_EQ(plus3.chain.vectors[3], SeqVector<Rational>::unit(VertexId::line(0), 8));
    EXPECT_EQ(*plus3.recipe.inner_delta, d / 8);
    auto minus2_back = chain_for_basis<Rational>(-2, d, op, Direction::ToZero);
    EXPECT_EQ(minus2_back.recipe.kind, RecipeKind::ShiftedMinusN);
    EXPECT_EQ(minus2_back.chain.back(), zero);
  }
}

TEST(Recipes, ZeroIndexReducesToTheBaseRecipes) {
  const Rational d(1, 10);
  auto op = op_for(OpFamily::CombShift, {2, 4}, {0}, {d});
  EXPECT_EQ(chain_for_basis<Rational>(0, d, op, Direction::FromZero).chain.vectors, chain_zero_to_e0<Rational>(d, op).chain.vectors);
  EXPECT_EQ(chain_for_basis<Rational>(0, d, op, Direction::ToZero).chain.vectors,
            chain_e0_to_zero_comb<Rational>(d, op).chain.vectors);
}

TEST(Recipes, RoundTripsWitnessMembership) {
  const Rational d(1, 100);
  for (auto family : {OpFamily::CombShift, OpFamily::GridT}) {
    std::vector<std::int64_t> ns{-3, -1, 0, 2, 4};
    auto op = op_for(family, {3, 5}, ns, {d});
    for (auto n : ns) {
      auto trip = round_trip_chain<Rational>(n, d, op);
      EXPECT_EQ(trip.front(), e(n));
      EXPECT_EQ(trip.back(), e(n));
      EXPECT_TRUE(is_valid(trip)) << n;
    }
  }
}

TEST(Recipes, ScaledStep1) {
  const Rational d(1, 10);
  auto op = op_for(OpFamily::CombShift, {2, 4}, {0}, {d});
  auto c = scale_chain(Rational(2), chain_zero_to_e0<Rational>(d, op).chain);
  EXPECT_EQ(c.back(), SeqVector<Rational>::unit(VertexId::line(0), 2));
  EXPECT_EQ(defect(c), Rational(1, 8));
  EXPECT_TRUE(is_valid(c));
}

TEST(Windows, RequirementsAreTight) {
  const Rational d(1, 10);
  for (auto family : {OpFamily::CombShift, OpFamily::GridT})
    for (std::int64_t n : {-2, 0, 2})
      for (auto dir : {Direction::FromZero, Direction::ToZero}) {
        auto req = requirement_for_basis<Rational>(n, d, family, Rational(2), Rational(4), dir);
        auto w = WeightAssignment<Rational>::standard(2, 4);
        auto build = [&](TruncationParams p) {
          if (family == OpFamily::GridT) return share(build_grid_T(build_grid_tree(p), w));
          p.j_min = 1;
          p.j_max = p.k_max;
          return share(shift_from_weights(build_comb_tree(p), w));
        };
        auto p = req.minimal(family == OpFamily::GridT ? TreeKind::Grid : TreeKind::Comb);
        EXPECT_NO_THROW(chain_for_basis<Rational>(n, d, build(p), dir)) << n;
        // Shrink each dimension by one vertex.
        std::vector<TruncationParams> smaller;
        if (req.line_hi >= 1 && req.line_hi == p.n_max && p.n_max > 1) smaller.push_back(p), smaller.back().n_max -= 1;
        if (req.needs_branch()) {
          auto q = p;
          q.k_max -= 1;
          smaller.push_back(q);
          if (family == OpFamily::GridT) {
            q = p;
            if (req.j_lo == p.j_min && p.j_min < -1) q.j_min += 1, smaller.push_back(q);
            q = p;
            if (req.j_hi == p.j_max && p.j_max > 1) q.j_max -= 1, smaller.push_back(q);
          }
        }
        if (dir == Direction::FromZero && p.n_max > 1) {
          auto q = p;
          q.n_max = req.line_hi - 1;
          if (q.n_max >= 1) smaller.push_back(q);
        }
        for (const auto& q : smaller) EXPECT_THROW(chain_for_basis<Rational>(n, d, build(q), dir), UndersizedWindow) << n;
      }
}

TEST(Windows, ComesWithAVertexName) {
  const Rational d(1, 10);
  auto w = WeightAssignment<Rational>::standard(2, 4);
  auto small = share(shift_from_weights(build_comb_tree({-3, 2, 3, 1, 3}), w));
  try {
    chain_e0_to_zero_comb<Rational>(d, small);
    FAIL();
  } catch (const UndersizedWindow& e) {
    EXPECT_NE(std::string(e.what()).find("needs vertex"), std::string::npos);
  }
}

TEST(Recipes, FloatModeBehaviour) {
  auto w = WeightAssignment<double>::standard(2.0, 4.0);
  auto req = merge(requirement_for_basis<double>(0, 0.1, OpFamily::GridT, 2.0, 4.0, Direction::ToZero),
                   requirement_for_basis<double>(0, 0.1, OpFamily::GridT, 2.0, 4.0, Direction::FromZero));
  auto op = share(build_grid_T(build_grid_tree(req.minimal(TreeKind::Grid)), w));
  auto trip = round_trip_chain<double>(0, 0.1, op);
  EXPECT_TRUE(is_valid(trip));
  EXPECT_NEAR(defect(trip), 1.0 / 16, 1e-12);
}

TEST(Recipes, FloatCancellationNoiseIsVisible) {
  // |mu1|^m eps exceeds a small delta: the float Step 2 link defects are not all exact.
  auto w = WeightAssignment<double>::standard(3.0, 5.0);
  auto req = requirement_for_basis<double>(3, 0.001, OpFamily::GridT, 3.0, 5.0, Direction::ToZero);
  auto op = share(build_grid_T(build_grid_tree(req.minimal(TreeKind::Grid)), w));
  auto c = chain_for_basis<double>(3, 0.001, op, Direction::ToZero);
  EXPECT_EQ(c.chain.back(), SeqVector<double>{});
  EXPECT_GT(defect(c.chain), 0.0);
}

TEST(Recipes, RejectsNonPositiveDelta) {
  auto op = op_for(OpFamily::CombShift, {2, 4}, {0}, {Rational(1)});
  EXPECT_THROW(chain_zero_to_e0<Rational>(Rational(0), op), InvalidArgument);
  EXPECT_THROW(chain_for_basis<Rational>(0, Rational(-1), op, Direction::ToZero), InvalidArgument);
}
