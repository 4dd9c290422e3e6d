#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chainrec/influence.hpp"
#include "chainrec/verdict.hpp"
#include "chainrec/weights.hpp"

namespace chainrec {

/// One candidate finger for the comb certificate.
template <class R>
struct CombCandidate {
  std::int64_t k = 0;
  std::int64_t j = 0;  // largest finger index with f(-k, j) != 0
  R bound{};
};

template <Scalar S>
std::vector<CombCandidate<real_t<S>>> comb_candidates(const SeqVector<S>& f, const WeightAssignment<S>& weights) {
  using R = real_t<S>;
  std::map<std::int64_t, std::int64_t> top;
  for (const auto& [v, x] : f) {
    if (!v.is_branch()) continue;
    if (v.j() < 1 || v.j() > v.k()) throw InvalidArgument("vertex " + v.str() + " is not on a comb finger");
    if (weights.overrides.count(v)) throw NotApplicable("comb certificate assumes the weight mu2 on every finger vertex");
    auto [it, inserted] = top.emplace(v.k(), v.j());
    if (!inserted) it->second = std::max(it->second, v.j());
  }
  const R mu2 = magnitude(weights.mu2);
  std::vector<CombCandidate<R>> out;
  for (const auto& [k, j] : top) {
    const std::int64_t d = k - j;
    out.push_back({k, j, magnitude(f.at(VertexId::branch(k, j))) / (R(d + 1) * ipow(mu2, d))});
  }
  return out;
}

/// Case split for a hypothetical δ-chain of length m from f to itself, at finger k.
template <class R>
std::vector<TraceLine> comb_case_split(const CombCandidate<R>& c, const R& mu2_abs, std::int64_t m) {
  const std::int64_t d = c.k - c.j;
  const std::string coord = "f(-" + std::to_string(c.k) + "," + std::to_string(c.j) + ")";
  if (m <= d) {
    return {{"case 1 (m <= k - j_k)",
             "|" + coord + "| <= sum_{l<" + std::to_string(m) + "} |mu2|^l |g| < (k-j_k)|mu2|^(k-j_k) delta = " +
                 format_real(R(d) * ipow(mu2_abs, d)) + " delta"}};
  }
  return {{"case 2 (m > k - j_k)", "|" + coord + "| <= sum_{l<=" + std::to_string(d) +
                                       "} |mu2|^l |g| < (k-j_k+1)|mu2|^(k-j_k) delta = " +
                                       format_real(R(d + 1) * ipow(mu2_abs, d)) + " delta"}};
}

/// Positive δ̄ with no δ̄-chain from f to itself for the comb shift.
///
/// δ̄ = |f(-k,j_k)| / ((k-j_k+1) |μ₂|^{k-j_k}) for the finger k giving the
/// largest value; the other fingers are recorded in the trace.
template <Scalar S>
Verdict<real_t<S>> noncr_bound_comb(const SeqVector<S>& f, const WeightAssignment<S>& weights,
                                    bool with_case_split = false) {
  using R = real_t<S>;
  auto cands = comb_candidates(f, weights);
  if (cands.empty()) throw NotApplicable("vector has no branch coordinate; it lies in the span of the line vectors");
  const auto* best = &cands.front();
  for (const auto& c : cands)
    if (c.bound > best->bound) best = &c;
  auto v = Verdict<R>::not_chain_recurrent("f", rigorous_lower(best->bound, 4));
  v.note("finger", "k = " + std::to_string(best->k) + ", j_k = " + std::to_string(best->j));
  v.note("bound", "|f(-k,j_k)| / ((k-j_k+1)|mu2|^(k-j_k)) = " + format_real(best->bound));
  for (const auto& c : cands)
    if (&c != best)
      v.note("alternative", "k = " + std::to_string(c.k) + ", j_k = " + std::to_string(c.j) +
                                ", bound = " + format_real(c.bound));
  if (with_case_split) {
    const R mu2 = magnitude(weights.mu2);
    const std::int64_t d = best->k - best->j;
    for (std::int64_t m : {std::max<std::int64_t>(d, 1), d + 1})
      for (auto& line : comb_case_split(*best, mu2, m)) v.trace.push_back(line);
  }
  v.evidence = "no delta-chain from f to f for delta <= bound";
  return v;
}

/// Series Σ_j |λ_{j0+1} ⋯ λ_{j0+j}| (forward) or Σ_j |λ_{j0-(j-1)} ⋯ λ_{j0}|^{-1}
/// (backward) along one branch: explicit terms through the stored range, then
/// the closed-form geometric tail.
template <class R>
struct BranchSeries {
  bool summable = false;
  R finite_part{};
  R tail{};
  std::size_t terms = 0;
  R total() const { return finite_part + tail; }
};

template <Scalar S>
BranchSeries<real_t<S>> forward_series(const BranchWeights<S>& b, std::int64_t j0) {
  using R = real_t<S>;
  BranchSeries<R> s;
  if (!b.above) return s;
  const R r = magnitude(*b.above);
  if (!(r < R(1))) return s;
  R p(1);
  for (std::int64_t j = j0 + 1; j <= b.hi(); ++j) {
    auto lam = b.at(j);
    if (!lam) return s;
    p *= magnitude(*lam);
    s.finite_part += p;
    ++s.terms;
  }
  s.tail = p * r / (R(1) - r);
  s.summable = true;
  return s;
}

template <Scalar S>
BranchSeries<real_t<S>> backward_series(const BranchWeights<S>& b, std::int64_t j0) {
  using R = real_t<S>;
  BranchSeries<R> s;
  if (!b.below) return s;
  const R r = magnitude(*b.below);
  if (!(r > R(1))) return s;
  R q(1);
  for (std::int64_t j = j0; j >= b.lo; --j) {
    auto lam = b.at(j);
    if (!lam || is_zero(*lam)) return s;
    q *= magnitude(*lam);
    s.finite_part += R(1) / q;
    ++s.terms;
  }
  s.tail = R(1) / (q * (r - R(1)));
  s.summable = true;
  return s;
}

/// Which inequality produced a grid certificate.
enum class GridCase { Forward = 1, Backward = 2 };

template <class R>
struct GridCandidate {
  VertexId at;
  std::optional<R> forward_bound;   // from 0 to f impossible
  std::optional<R> backward_bound;  // from f to 0 impossible
  BranchSeries<R> forward;
  BranchSeries<R> backward;
};

template <Scalar S>
std::vector<GridCandidate<real_t<S>>> grid_candidates(const SeqVector<S>& f, const WeightAssignment<S>& weights) {
  using R = real_t<S>;
  std::vector<GridCandidate<R>> out;
  for (const auto& [v, x] : f) {
    if (!v.is_branch()) continue;
    const auto b = weights.grid_branch(v.k());
    GridCandidate<R> c;
    c.at = v;
    const R a = magnitude(x);
    c.forward = forward_series(b, v.j());
    c.backward = backward_series(b, v.j());
    const int ops = 8;
    if (c.forward.summable)
      c.forward_bound = rigorous_lower(R(a / (R(1) + c.forward.total())), ops + static_cast<int>(c.forward.terms));
    if (c.backward.summable)
      c.backward_bound = rigorous_lower(R(a / c.backward.total()), ops + static_cast<int>(c.backward.terms));
    out.push_back(std::move(c));
  }
  return out;
}

/// Positive δ̄ certifying f is not chain recurrent for the grid operator.
///
/// Case 1 (forward series summable): no δ-chain from 0 to f for δ ≤
/// |f(v)| / (1 + Σ_j |λ_{j0+1}⋯λ_{j0+j}|). Case 2 (backward series summable):
/// no δ-chain from f to 0 for δ ≤ |f(v)| / Σ_j |λ_{j0-(j-1)}⋯λ_{j0}|^{-1}.
/// The coordinate and case with the largest bound are used.
template <Scalar S>
Verdict<real_t<S>> noncr_bound_grid(const SeqVector<S>& f, const WeightAssignment<S>& weights) {
  using R = real_t<S>;
  auto cands = grid_candidates(f, weights);
  if (cands.empty()) throw NotApplicable("vector has no branch coordinate; it lies in the span of the line vectors");
  std::optional<R> best;
  const GridCandidate<R>* best_c = nullptr;
  GridCase best_case = GridCase::Forward;
  for (const auto& c : cands) {
    if (c.forward_bound && (!best || *c.forward_bound > *best)) best = c.forward_bound, best_c = &c, best_case = GridCase::Forward;
    if (c.backward_bound && (!best || *c.backward_bound > *best))
      best = c.backward_bound, best_c = &c, best_case = GridCase::Backward;
  }
  if (!best) {
    auto v = Verdict<R>::inconclusive("f", "no branch of the support has an analytically summable product series");
    for (const auto& c : cands) v.note("coordinate", c.at.str() + ": both tails undeclared or not geometric");
    return v;
  }
  auto v = Verdict<R>::not_chain_recurrent("f", *best);
  const auto& s = best_case == GridCase::Forward ? best_c->forward : best_c->backward;
  v.note("coordinate", best_c->at.str());
  v.note("case", best_case == GridCase::Forward ? "1: forward product series summable"
                                                 : "2: backward product series summable");
  v.note("series", "finite part (" + std::to_string(s.terms) + " terms) = " + format_real(s.finite_part) +
                       ", geometric tail = " + format_real(s.tail));
  v.note("bound", best_case == GridCase::Forward ? "|f(v)| / (1 + series) rounded down = " + format_real(*best)
                                                 : "|f(v)| / series rounded down = " + format_real(*best));
  for (const auto& c : cands) {
    if (c.forward_bound && !(&c == best_c && best_case == GridCase::Forward))
      v.note("alternative", c.at.str() + " case 1 bound " + format_real(*c.forward_bound));
    if (c.backward_bound && !(&c == best_c && best_case == GridCase::Backward))
      v.note("alternative", c.at.str() + " case 2 bound " + format_real(*c.backward_bound));
  }
  v.evidence = best_case == GridCase::Forward ? "no delta-chain from 0 to f for delta <= bound"
                                              : "no delta-chain from f to 0 for delta <= bound";
  return v;
}

struct SearchConfig {
  std::size_t trials = 10000;
  std::size_t max_length = 25;
  std::uint64_t seed = 1;
  double perturbation = 0.0;  // norm bound for g_1 .. g_{m-1}
  double accept_below = 0.0;  // a trial succeeds when the closing link is below this
  std::size_t support = 3;     // random coordinates per perturbation
  NormSpec norm = Sup{};
};

struct SearchResult {
  std::size_t trials = 0;
  std::size_t adversarial = 0;
  std::size_t found = 0;
  std::size_t leaked = 0;
  double best_closing = 0.0;
  std::size_t best_length = 0;
};

/// Sampled attempts at a δ-chain from f back to f.
///
/// Each trial draws a length m, perturbations g_1..g_{m-1} of norm at most
/// `perturbation` and closes with g_m = f − T f_{m-1}. Half the trials push
/// along the influence path of `target` to help the closing coordinate.
inline SearchResult random_return_search(const LinearOp<double>& op, const SeqVector<double>& f, VertexId target,
                                         const SearchConfig& cfg) {
  if (cfg.max_length < 1) throw InvalidArgument("search needs max_length >= 1");
  if (!(cfg.perturbation > 0.0)) throw InvalidArgument("search needs a positive perturbation size");
  std::mt19937_64 rng(cfg.seed);
  // Only coordinates whose orbit stays inside the window for max_length steps.
  std::vector<VertexId> vertices;
  for (VertexId v : op.window()) {
    try {
      op.apply_power(SeqVector<double>::unit(v), cfg.max_length);
      vertices.push_back(v);
    } catch (const LeakageOutOfWindow&) {
    }
  }
  if (vertices.empty()) throw UndersizedWindow("random return search", target);
  std::uniform_int_distribution<std::size_t> pick_vertex(0, vertices.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_length(1, cfg.max_length);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Orbit of f and the influence path are shared by all trials.
  std::vector<SeqVector<double>> orbit{f};
  for (std::size_t l = 1; l <= cfg.max_length; ++l) orbit.push_back(op.apply(orbit.back()));
  const auto path = influence_path(op, target, cfg.max_length);
  const double shrink = 1.0 - 0x1p-20;

  SearchResult res;
  res.best_closing = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const bool adversarial = t % 2 == 1;
    const std::size_t m = pick_length(rng);
    const double deficit = f.at(target) - orbit[m].at(target);
    ++res.trials;
    if (adversarial) ++res.adversarial;
    try {
      SeqVector<double> cur = f;
      for (std::size_t l = 1; l < m; ++l) {
        SeqVector<double> g;
        for (std::size_t s = 0; s < cfg.support; ++s) g.add(vertices[pick_vertex(rng)], cfg.perturbation * unit(rng));
        if (adversarial) {
          if (auto u = path.source(m - l)) {
            const double w = path.coefficients[m - l];
            g.set(*u, (deficit * w >= 0 ? 1.0 : -1.0) * cfg.perturbation);
          }
        }
        const double size = norm(g, cfg.norm);
        if (size > 0) g *= std::min(1.0, cfg.perturbation * shrink / size);
        cur = op.apply(cur) + g;
      }
      const double closing = norm(SeqVector<double>(f - op.apply(cur)), cfg.norm);
      if (closing < res.best_closing) res.best_closing = closing, res.best_length = m;
      if (closing < cfg.accept_below) ++res.found;
    } catch (const LeakageOutOfWindow&) {
      ++res.leaked;
    }
  }
  return res;
}

}  // namespace chainrec
