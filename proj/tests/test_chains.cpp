#include <gtest/gtest.h>

#include "chainrec/serialize.hpp"
#include "support.hpp"

using namespace chainrec;
using testing_support::Gen;

namespace {

struct RandomOperator {
  std::shared_ptr<const LinearOp<Rational>> op;
  std::vector<VertexId> safe;  // basis vectors whose orbit stays in the window for `depth` steps
};

/// Random comb, grid or line operator with random weights 1 < |mu1| < |mu2|.
RandomOperator random_operator(Gen& gen, std::size_t depth) {
  const Rational mu1 = Rational(gen.integer(5, 12), 4) * (gen.coin() ? 1 : -1);
  const Rational mu2 = (mu1 < 0 ? -mu1 : mu1) + Rational(gen.integer(1, 8), 3);
  const auto w = WeightAssignment<Rational>::standard(mu1, mu2);
  const std::int64_t k = gen.integer(1, 4);
  const auto d = static_cast<std::int64_t>(depth);
  LinearOp<Rational> op;
  switch (gen.integer(0, 2)) {
    case 0: op = shift_from_weights(build_comb_tree({-k - d - 1, 4, k, 1, k}), w); break;
    case 1: op = build_grid_T(build_grid_tree({-k - d - 1, 4, k, -d - 2, 3}), w); break;
    default: op = build_classical_shift(ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, mu1), -d - 1, 4);
  }
  RandomOperator out{share(std::move(op)), {}};
  for (VertexId v : out.op->window()) {
    try {
      out.op->apply_power(SeqVector<Rational>::unit(v), depth);
      out.safe.push_back(v);
    } catch (const LeakageOutOfWindow&) {
    }
  }
  return out;
}

DeltaChain<Rational> random_chain(Gen& gen, const RandomOperator& r, std::size_t length) {
  DeltaChain<Rational> c;
  c.op = r.op;
  c.delta = Rational(gen.integer(1, 20));
  for (std::size_t l = 0; l <= length; ++l) c.vectors.push_back(gen.sparse(r.safe, 4));
  return c;
}

}  // namespace

TEST(ChainProperty, ReconstructionIsExact) {
  Gen gen(2024);
  for (int trial = 0; trial < 120; ++trial) {
    auto r = random_operator(gen, 13);
    auto c = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 12)));
    auto perts = to_perturbations(c);
    ASSERT_EQ(perts.g.size(), c.length());
    // Independent evaluation of T^m f_0 + Σ_l T^{m-l} g_l.
    const std::size_t m = c.length();
    auto sum = r.op->apply_power(c.front(), m);
    for (std::size_t l = 1; l <= m; ++l) sum += r.op->apply_power(perts.g[l - 1], m - l);
    EXPECT_EQ(sum, c.back());
    EXPECT_EQ(reconstruct(c.front(), perts, *r.op), c.back());
  }
}

TEST(ChainProperty, DefectIsTheLargestPerturbation) {
  Gen gen(7);
  for (int trial = 0; trial < 80; ++trial) {
    auto r = random_operator(gen, 13);
    auto c = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 12)));
    c.norm = gen.coin() ? NormSpec{Sup{}} : NormSpec{Lp{1.0}};
    Rational biggest = 0;
    for (std::size_t l = 1; l <= c.length(); ++l)
      biggest = std::max(biggest, norm(SeqVector<Rational>(c.vectors[l] - r.op->apply(c.vectors[l - 1])), c.norm));
    EXPECT_EQ(defect(c), biggest);
    EXPECT_EQ(is_valid(c), biggest < c.delta);
    EXPECT_EQ(margin(c), c.delta - biggest);
  }
}

TEST(ChainProperty, ConcatenationIsAssociative) {
  Gen gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    auto r = random_operator(gen, 40);
    auto a = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 5)));
    auto b = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 5)));
    auto c = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 5)));
    b.vectors.front() = a.back();
    c.vectors.front() = b.back();
    auto left = concat(concat(a, b), c);
    auto right = concat(a, concat(b, c));
    EXPECT_EQ(defect(left), defect(right));
    EXPECT_EQ(left.vectors, right.vectors);
    EXPECT_EQ(left.length(), a.length() + b.length() + c.length());
    EXPECT_EQ(left.delta, std::max({a.delta, b.delta, c.delta}));
  }
}

TEST(ChainProperty, DefectScalesLinearly) {
  Gen gen(31);
  for (int trial = 0; trial < 80; ++trial) {
    auto r = random_operator(gen, 13);
    auto c = random_chain(gen, r, static_cast<std::size_t>(gen.integer(1, 12)));
    c.norm = gen.coin() ? NormSpec{Sup{}} : NormSpec{Lp{1.0}};
    const Rational alpha = gen.rational(true);
    auto s = scale_chain(alpha, c);
    const Rational a = alpha < 0 ? Rational(-alpha) : alpha;
    EXPECT_EQ(defect(s), a * defect(c));
    EXPECT_EQ(s.delta, a * c.delta);
  }
}

TEST(Chain, ConcatRejectsMismatchedEndpoints) {
  Gen gen(1);
  auto r = random_operator(gen, 4);
  auto a = zero_chain<Rational>(2, Rational(1), r.op);
  auto b = zero_chain<Rational>(2, Rational(1), r.op);
  b.vectors.front() = SeqVector<Rational>::unit(r.safe.front());
  EXPECT_THROW(concat(a, b), EndpointMismatch);
  auto doubled = concat(a, a);
  EXPECT_EQ(doubled.length(), 4u);
  EXPECT_TRUE(is_valid(doubled));
}

TEST(Chain, ConcatRejectsDifferentOperators) {
  Gen gen(3);
  auto r1 = random_operator(gen, 4);
  auto r2 = random_operator(gen, 4);
  auto a = zero_chain<Rational>(1, Rational(1), r1.op);
  auto b = zero_chain<Rational>(1, Rational(1), r2.op);
  if (!same_operator(*r1.op, *r2.op)) {
    EXPECT_THROW(concat(a, b), InvalidArgument);
  }
}

TEST(Chain, FloatJunctionToleranceIsRecorded) {
  auto op = share(build_classical_shift(ClassicalWeights<double>::constant(ShiftDomain::Bilateral, 2.0), -5, 5));
  auto a = zero_chain<double>(1, 1.0, op);
  auto b = zero_chain<double>(1, 1.0, op);
  a.vectors.back() = SeqVector<double>::unit(VertexId::line(0), 1e-13);
  auto c = concat(a, b);
  ASSERT_TRUE(c.junction_tolerance.has_value());
  EXPECT_EQ(*c.junction_tolerance, default_junction_tolerance);
  a.vectors.back() = SeqVector<double>::unit(VertexId::line(0), 1e-3);
  EXPECT_THROW(concat(a, b), EndpointMismatch);
}

TEST(Chain, ScaleByZeroIsRejected) {
  Gen gen(4);
  auto r = random_operator(gen, 4);
  EXPECT_THROW(scale_chain(Rational(0), zero_chain<Rational>(1, Rational(1), r.op)), InvalidArgument);
  auto c = random_chain(gen, r, 3);
  auto same = scale_chain(Rational(1), c);
  EXPECT_EQ(same.vectors, c.vectors);
  EXPECT_EQ(defect(scale_chain(Rational(-1), c)), defect(c));
}

TEST(Chain, LeakageReportsTheStep) {
  auto op = share(build_classical_shift(ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, Rational(2)), -2, 2));
  DeltaChain<Rational> c;
  c.op = op;
  c.delta = 1;
  c.vectors = {{}, {}, SeqVector<Rational>::unit(VertexId::line(-2))};
  c.vectors.push_back({});
  try {
    to_perturbations(c);
    FAIL();
  } catch (const LeakageOutOfWindow& e) {
    ASSERT_TRUE(e.step().has_value());
    EXPECT_EQ(*e.step(), 3u);
  }
}

TEST(Chain, ValidityIsStrict) {
  auto op = share(build_classical_shift(ClassicalWeights<Rational>::constant(ShiftDomain::Bilateral, Rational(2)), -3, 3));
  DeltaChain<Rational> c;
  c.op = op;
  c.delta = Rational(1, 2);
  c.vectors = {{}, SeqVector<Rational>::unit(VertexId::line(0), Rational(1, 2))};
  EXPECT_EQ(defect(c), Rational(1, 2));
  EXPECT_FALSE(is_valid(c));
  EXPECT_EQ(margin(c), Rational(0));
}

TEST(Chain, JsonReplayGivesTheSameChain) {
  auto w = WeightAssignment<Rational>::standard(2, 4);
  auto op = share(shift_from_weights(build_comb_tree({-8, 5, 7, 1, 7}), w));
  auto built = chain_e0_to_zero_comb<Rational>(Rational(1, 10), op);
  auto j = to_json(built.chain);
  auto back = chain_from_json<Rational>(Json::parse(j.dump()), op, Sup{});
  EXPECT_EQ(back.vectors, built.chain.vectors);
  EXPECT_EQ(back.delta, built.chain.delta);
  EXPECT_EQ(defect(back), defect(built.chain));
}
