#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace chainrec;

namespace {

const auto w24 = WeightAssignment<Rational>::standard(2, 4);

std::shared_ptr<const LinearOp<Rational>> comb(std::int64_t k_max) {
  return share(shift_from_weights(build_comb_tree({-k_max - 2, 2, k_max, 1, k_max}), w24));
}

SeqVector<Rational> unit(VertexId v) { return SeqVector<Rational>::unit(v); }

/// Smallest max|g_l| over the lattice g_l ∈ (G/N)·{-N..N} that cancels coordinate -m of
/// the perturbed orbit of e_0 under the 2-weighted bilateral shift. A perturbation added
/// at step l reaches -m only from coordinate -l, with factor 2^{m-l}.
double brute_force_line(int m, int N, double G) {
  double best = INFINITY;
  std::vector<int> idx(static_cast<std::size_t>(m), -N);
  for (;;) {
    double reached = std::pow(2.0, m);  // orbit of e_0, coefficient at -m
    double sup = 0;
    for (int l = 1; l <= m; ++l) {
      const double g = G * idx[static_cast<std::size_t>(l - 1)] / N;
      reached += std::pow(2.0, m - l) * g;
      sup = std::max(sup, std::fabs(g));
    }
    if (std::fabs(reached) < 1e-12) best = std::min(best, sup);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] > N) idx[i++] = -N;
    if (i == idx.size()) break;
  }
  return best;
}

}  // namespace

TEST(InfluencePath, CombFingerCoefficients) {
  auto op = comb(5);
  auto path = influence_path(*op, VertexId::branch(5, 2), 6);
  ASSERT_EQ(path.coefficients.size(), 7u);
  for (std::size_t l = 0; l <= 3; ++l) EXPECT_EQ(path.coefficients[l], ipow(Rational(4), static_cast<std::int64_t>(l)));
  for (std::size_t l = 4; l <= 6; ++l) EXPECT_EQ(path.coefficients[l], 0);
  EXPECT_EQ(*path.source(3), VertexId::branch(5, 5));
  EXPECT_FALSE(path.source(4).has_value());
}

TEST(InfluencePath, HorizonZeroAndLineTargets) {
  auto op = comb(3);
  auto p0 = influence_path(*op, VertexId::branch(3, 1), 0);
  EXPECT_EQ(p0.coefficients, std::vector<Rational>{1});
  EXPECT_THROW(influence_path(*op, VertexId::line(-2), 3), NonUniqueInfluence);
  EXPECT_THROW(influence_path(*op, VertexId::line(2), 3), InfluenceTruncated);  // row of n_max is partial
}

TEST(MinDeltaReach, ScaledLineShiftClosedForm) {
  auto op = build_classical_shift(ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, Rational(2)), -12, 2);
  for (std::size_t m = 1; m <= 10; ++m) {
    auto v = min_delta_reach(op, unit(VertexId::line(0)), VertexId::line(-static_cast<std::int64_t>(m)), Rational(0), m, Sup{});
    const Rational p = ipow(Rational(2), static_cast<std::int64_t>(m));
    ASSERT_TRUE(v);
    EXPECT_EQ(*v, p / (p - 1)) << m;
  }
  auto five = min_delta_reach(op, unit(VertexId::line(0)), VertexId::line(-5), Rational(0), 5, Sup{});
  EXPECT_EQ(*five, Rational(32, 31));
}

TEST(MinDeltaReach, AgreesWithLatticeSearchForShortChains) {
  auto op = build_classical_shift(ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, Rational(2)), -6, 2);
  for (int m = 1; m <= 3; ++m) {
    auto exact = min_delta_reach(op, unit(VertexId::line(0)), VertexId::line(-m), Rational(0), static_cast<std::size_t>(m), Sup{});
    const double closed = exact->convert_to<double>();
    // Lattice containing the optimum exactly: steps of closed/N.
    const int N = 12;
    EXPECT_NEAR(brute_force_line(m, N, closed), closed, 1e-12) << m;
    // A slightly smaller box has no solution.
    EXPECT_TRUE(std::isinf(brute_force_line(m, N, closed * (1 - 1e-3)))) << m;
  }
}

TEST(MinDeltaReach, ZeroWhenTheOrbitAlreadyHits) {
  auto op = comb(3);
  auto v = min_delta_reach(*op, unit(VertexId::branch(3, 3)), VertexId::branch(3, 1), Rational(16), 2, Sup{});
  EXPECT_EQ(*v, 0);
}

TEST(MinDeltaReach, UnreachableAndErrors) {
  // The finger tip has no predecessor, so only the last perturbation helps.
  auto op = comb(3);
  auto v = min_delta_reach(*op, unit(VertexId::branch(3, 3)), VertexId::branch(3, 3), Rational(1), 4, Sup{});
  EXPECT_EQ(*v, Rational(1));
  EXPECT_THROW(min_delta_reach(*op, unit(VertexId::branch(3, 3)), VertexId::branch(3, 3), Rational(1), 0, Sup{}), InvalidArgument);
  auto ex = std::make_shared<const Exhaustion>(std::vector<std::set<VertexId>>{{VertexId::line(0)}});
  EXPECT_THROW(min_delta_reach(*op, unit(VertexId::branch(3, 3)), VertexId::branch(3, 3), Rational(1), 1,
                               NormSpec{ProductSeminorm{ex, 1}}),
               InvalidArgument);
}

TEST(MinDeltaReach, MonotoneInTheLength) {
  auto op = comb(6);
  for (std::int64_t k = 1; k <= 6; ++k)
    for (std::int64_t j = 1; j <= k; ++j) {
      const VertexId v = VertexId::branch(k, j);
      Rational prev = -1;
      for (std::size_t m = 1; m <= 12; ++m) {
        auto x = *min_delta_reach(*op, unit(v), v, Rational(1), m, Sup{});
        if (prev >= 0) {
          EXPECT_LE(x, prev);
        }
        if (m > static_cast<std::size_t>(k - j + 1)) {  // the path has ended
          EXPECT_EQ(x, prev);
        }
        prev = x;
      }
    }
}

TEST(CombCertificate, PaperValues) {
  auto v = noncr_bound_comb(unit(VertexId::branch(3, 1)), w24);
  EXPECT_EQ(v.kind, VerdictKind::NotChainRecurrent);
  EXPECT_EQ(*v.bound, Rational(1, 48));
  EXPECT_EQ(*noncr_bound_comb(unit(VertexId::branch(4, 4)), w24).bound, Rational(1));
  EXPECT_THROW(noncr_bound_comb(unit(VertexId::line(5)), w24), NotApplicable);
}

TEST(CombCertificate, PicksTheFingerWithTheLargestBound) {
  SeqVector<Rational> f{{VertexId::branch(5, 1), Rational(1)}, {VertexId::branch(2, 2), Rational(1, 2)}, {VertexId::line(0), Rational(7)}};
  auto v = noncr_bound_comb(f, w24);
  EXPECT_EQ(*v.bound, Rational(1, 2));
  bool alternative = false;
  for (const auto& t : v.trace) alternative = alternative || t.step == "alternative";
  EXPECT_TRUE(alternative);
}

TEST(CombCertificate, UsesTheTopNonzeroFingerIndex) {
  SeqVector<Rational> f{{VertexId::branch(4, 1), Rational(9)}, {VertexId::branch(4, 3), Rational(-2)}};
  // j_k = 3, k - j_k = 1: 2 / (2 * 4).
  EXPECT_EQ(*noncr_bound_comb(f, w24).bound, Rational(1, 4));
}

TEST(CombCertificate, CaseSplitTraceCoversBothCases) {
  auto v = noncr_bound_comb(unit(VertexId::branch(4, 2)), w24, true);
  std::set<std::string> steps;
  for (const auto& t : v.trace) steps.insert(t.step);
  EXPECT_TRUE(steps.count("case 1 (m <= k - j_k)"));
  EXPECT_TRUE(steps.count("case 2 (m > k - j_k)"));
}

TEST(CombCertificate, OracleNeverUndercutsTheBound) {
  auto op = comb(6);
  for (std::int64_t k = 1; k <= 6; ++k)
    for (std::int64_t j = 1; j <= k; ++j) {
      const VertexId v = VertexId::branch(k, j);
      const Rational bound = *noncr_bound_comb(unit(v), w24).bound;
      for (std::size_t m = 1; m <= 40; ++m) EXPECT_GE(*min_delta_reach(*op, unit(v), v, Rational(1), m, Sup{}), bound);
    }
}

TEST(CombCertificate, FloatBoundIsRoundedDown) {
  auto wf = WeightAssignment<double>::standard(2.0, 4.0);
  auto v = noncr_bound_comb(SeqVector<double>::unit(VertexId::branch(3, 1)), wf);
  EXPECT_LT(*v.bound, 1.0 / 48);
  EXPECT_GT(*v.bound, 1.0 / 48 * (1 - 1e-14));
}

TEST(GridCertificate, DefaultGeneratorBothCases) {
  auto cands = grid_candidates(unit(VertexId::branch(2, 1)), w24);
  ASSERT_EQ(cands.size(), 1u);
  const auto& c = cands.front();
  // Forward from j0 = 1: |λ_2| = 4, then factors 1/4: 4 + 1 + 1/4 + ... = 16/3.
  EXPECT_EQ(c.forward.total(), Rational(16, 3));
  EXPECT_EQ(*c.forward_bound, Rational(3, 19));
  // Backward: 1/4 + 1 + 4 + 16, then the ratio 4 tail 16/3.
  EXPECT_EQ(c.backward.total(), Rational(85, 4) + Rational(16, 3));
  EXPECT_LT(*c.backward_bound, *c.forward_bound);
  auto v = noncr_bound_grid(unit(VertexId::branch(2, 1)), w24);
  EXPECT_EQ(*v.bound, Rational(3, 19));
  EXPECT_THROW(noncr_bound_grid(unit(VertexId::line(0)), w24), NotApplicable);
}

TEST(GridCertificate, OracleAgreesOnTheWindow) {
  auto T = share(build_grid_T(build_grid_tree({-4, 2, 3, -30, 30}), w24));
  for (std::int64_t k = 1; k <= 3; ++k)
    for (std::int64_t j = -4; j <= 4; ++j) {
      const VertexId v = VertexId::branch(k, j);
      auto c = grid_candidates(unit(v), w24).front();
      for (std::size_t m = 1; m <= 20; ++m) {
        if (c.forward_bound) {
          EXPECT_GE(*min_delta_reach(*T, SeqVector<Rational>{}, v, Rational(1), m, Sup{}), *c.forward_bound);
        }
        if (c.backward_bound) {
          EXPECT_GE(*min_delta_reach(*T, unit(v), VertexId::branch(k, j - static_cast<std::int64_t>(m)), Rational(0), m, Sup{}),
                    *c.backward_bound);
        }
      }
    }
}

TEST(GridCertificate, UndeclaredTailsAreInconclusive) {
  auto w = w24;
  w.grid_custom[1] = w24.default_branch(1);
  w.grid_custom[1].above.reset();
  w.grid_custom[1].below.reset();
  auto v = noncr_bound_grid(unit(VertexId::branch(1, 1)), w);
  EXPECT_EQ(v.kind, VerdictKind::Inconclusive);
}

TEST(RandomSearch, FindsNoReturnChainBelowTheBound) {
  auto wf = WeightAssignment<double>::standard(2.0, 4.0);
  auto op = shift_from_weights(build_comb_tree({-30, 27, 3, 1, 3}), wf);
  for (auto v : {VertexId::branch(3, 1), VertexId::branch(2, 2)}) {
    const double bound = *noncr_bound_comb(SeqVector<double>::unit(v), wf).bound;
    SearchConfig cfg;
    cfg.trials = 1000;
    cfg.seed = 17;
    cfg.perturbation = bound / 2;
    cfg.accept_below = bound;
    auto res = random_return_search(op, SeqVector<double>::unit(v), v, cfg);
    EXPECT_EQ(res.found, 0u);
    EXPECT_EQ(res.trials, 1000u);
    EXPECT_EQ(res.adversarial, 500u);
    EXPECT_GE(res.best_closing, bound);
  }
}

TEST(RandomSearch, SucceedsAboveTheOracleThreshold) {
  // Sanity check of the search itself: e_(-1,1) returns to itself once perturbations reach 1.
  auto wf = WeightAssignment<double>::standard(2.0, 4.0);
  auto op = shift_from_weights(build_comb_tree({-30, 27, 3, 1, 3}), wf);
  SearchConfig cfg;
  cfg.trials = 200;
  cfg.max_length = 1;
  cfg.perturbation = 2.0;
  cfg.accept_below = 2.0;
  auto res = random_return_search(op, SeqVector<double>::unit(VertexId::branch(1, 1)), VertexId::branch(1, 1), cfg);
  EXPECT_EQ(res.found, 0u);  // the only length-1 chain closes with |f - Tf| = 4
  cfg.accept_below = 4.5;
  res = random_return_search(op, SeqVector<double>::unit(VertexId::branch(1, 1)), VertexId::branch(1, 1), cfg);
  EXPECT_EQ(res.found, 200u);
}

TEST(RandomSearch, IsDeterministicForAFixedSeed) {
  auto wf = WeightAssignment<double>::standard(2.0, 4.0);
  auto op = shift_from_weights(build_comb_tree({-30, 27, 3, 1, 3}), wf);
  SearchConfig cfg;
  cfg.trials = 300;
  cfg.seed = 5;
  cfg.perturbation = 0.01;
  cfg.accept_below = 0.02;
  auto a = random_return_search(op, SeqVector<double>::unit(VertexId::branch(3, 2)), VertexId::branch(3, 2), cfg);
  auto b = random_return_search(op, SeqVector<double>::unit(VertexId::branch(3, 2)), VertexId::branch(3, 2), cfg);
  EXPECT_EQ(a.best_closing, b.best_closing);
  EXPECT_EQ(a.best_length, b.best_length);
}
