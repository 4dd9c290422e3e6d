#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chainrec/chainrec.hpp"

namespace testing_support {

using chainrec::Rational;
using chainrec::SeqVector;
using chainrec::VertexId;

/// Seeded generator for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); }
  bool coin() { return integer(0, 1) == 1; }

  /// p/q with |p| <= 9, 1 <= q <= 7; nonzero when asked.
  Rational rational(bool nonzero = false) {
    for (;;) {
      Rational r(integer(-9, 9), integer(1, 7));
      if (!nonzero || r != 0) return r;
    }
  }

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(xs.size()) - 1))];
  }

  SeqVector<Rational> sparse(const std::vector<VertexId>& support, std::size_t max_terms) {
    SeqVector<Rational> f;
    const auto n = integer(0, static_cast<std::int64_t>(max_terms));
    for (std::int64_t i = 0; i < n; ++i) f.add(pick(support), rational(true));
    return f;
  }

  std::mt19937_64 rng;
};

inline std::vector<VertexId> as_list(const std::set<VertexId>& s) { return {s.begin(), s.end()}; }

/// Direct matrix-free evaluation of the comb shift: [Bf](v) = Σ_{u child of v} λ_u f(u).
inline SeqVector<Rational> comb_apply_reference(const SeqVector<Rational>& f, const Rational& mu1, const Rational& mu2) {
  SeqVector<Rational> out;
  for (const auto& [u, x] : f) {
    if (u.is_line())
      out.add(VertexId::line(u.n() - 1), mu1 * x);
    else if (u.j() == 1)
      out.add(VertexId::line(-u.k()), mu2 * x);
    else
      out.add(VertexId::branch(u.k(), u.j() - 1), mu2 * x);
  }
  return out;
}

}  // namespace testing_support
