#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/seq_vector.hpp"

namespace chainrec {

/// An increasing sequence of finite vertex sets F_1 ⊆ F_2 ⊆ ... (1-based).
class Exhaustion {
 public:
  Exhaustion() = default;
  explicit Exhaustion(std::vector<std::set<VertexId>> sets, std::string name = "custom")
      : sets_(std::move(sets)), name_(std::move(name)) {
    for (std::size_t k = 1; k < sets_.size(); ++k)
      if (!std::includes(sets_[k].begin(), sets_[k].end(), sets_[k - 1].begin(), sets_[k - 1].end()))
        throw InvalidArgument("exhaustion is not increasing at F_" + std::to_string(k + 1));
  }

  std::size_t size() const { return sets_.size(); }
  const std::set<VertexId>& at(std::size_t k) const {
    if (k < 1 || k > sets_.size()) throw InvalidArgument("exhaustion index out of range: " + std::to_string(k));
    return sets_[k - 1];
  }
  const std::string& name() const { return name_; }

  /// True when the last set covers the whole window.
  bool covers(const std::set<VertexId>& window) const {
    return !sets_.empty() && sets_.back() == window;
  }

 private:
  std::vector<std::set<VertexId>> sets_;
  std::string name_;
};

struct Lp {
  double p = 2.0;
};
struct Sup {};
/// The k-th seminorm ∥f∥_k = max_{v ∈ F_k} |f(v)| of the product topology.
struct ProductSeminorm {
  std::shared_ptr<const Exhaustion> exhaustion;
  std::size_t k = 1;
};

using NormSpec = std::variant<Lp, Sup, ProductSeminorm>;

inline void validate(const NormSpec& spec) {
  if (auto* lp = std::get_if<Lp>(&spec)) {
    if (!(lp->p >= 1.0) || !std::isfinite(lp->p)) throw InvalidArgument("Lp norm needs 1 <= p < inf");
  } else if (auto* ps = std::get_if<ProductSeminorm>(&spec)) {
    if (!ps->exhaustion) throw InvalidArgument("product seminorm without exhaustion");
    ps->exhaustion->at(ps->k);
  }
}

inline bool same_norm(const NormSpec& a, const NormSpec& b) {
  if (a.index() != b.index()) return false;
  if (auto* lp = std::get_if<Lp>(&a)) return lp->p == std::get<Lp>(b).p;
  if (auto* ps = std::get_if<ProductSeminorm>(&a)) {
    const auto& qs = std::get<ProductSeminorm>(b);
    return ps->exhaustion == qs.exhaustion && ps->k == qs.k;
  }
  return true;
}

/// True for norms that dominate every coordinate functional with constant 1.
inline bool dominates_coordinates(const NormSpec& spec) {
  return std::holds_alternative<Lp>(spec) || std::holds_alternative<Sup>(spec);
}

inline std::string describe(const NormSpec& spec) {
  if (auto* lp = std::get_if<Lp>(&spec)) {
    std::ostringstream os;
    os << "l" << lp->p;
    return os.str();
  }
  if (std::holds_alternative<Sup>(spec)) return "sup";
  const auto& ps = std::get<ProductSeminorm>(spec);
  return "product[" + (ps.exhaustion ? ps.exhaustion->name() : std::string("?")) + "]_" + std::to_string(ps.k);
}

namespace detail {

inline bool exact_sqrt(const BigInt& x, BigInt& root) {
  if (x < 0) return false;
  root = boost::multiprecision::sqrt(x);
  return root * root == x;
}

template <class R>
R lp_root(const R& sum, double p) {
  if constexpr (std::is_same_v<R, Rational>) {
    if (p == 1.0) return sum;
    if (p == 2.0) {
      BigInt rn, rd;
      if (exact_sqrt(boost::multiprecision::numerator(sum), rn) &&
          exact_sqrt(boost::multiprecision::denominator(sum), rd))
        return Rational(rn, rd);
    }
    return Rational(std::pow(sum.template convert_to<double>(), 1.0 / p));
  } else {
    if (p == 1.0) return sum;
    if (p == 2.0) return std::sqrt(sum);
    return std::pow(sum, 1.0 / p);
  }
}

}  // namespace detail

/// ℓ^p, sup (c₀) or product-seminorm value of a finitely supported vector.
///
/// In exact mode the sup norm, ℓ¹ and ℓ² of perfect squares (in particular every
/// single-entry vector) are exact; other ℓ^p values are correctly rounded doubles.
template <Scalar S>
real_t<S> norm(const SeqVector<S>& f, const NormSpec& spec) {
  using R = real_t<S>;
  validate(spec);
  if (f.empty()) return R(0);
  if (std::holds_alternative<Sup>(spec)) {
    R best(0);
    for (const auto& [v, x] : f) best = std::max<R>(best, magnitude(x));
    return best;
  }
  if (auto* ps = std::get_if<ProductSeminorm>(&spec)) {
    const auto& window = ps->exhaustion->at(ps->k);
    R best(0);
    for (const auto& [v, x] : f)
      if (window.count(v)) best = std::max<R>(best, magnitude(x));
    return best;
  }
  const double p = std::get<Lp>(spec).p;
  if (f.size() == 1) return magnitude(f.begin()->second);
  R sum(0);
  if (p == 1.0 || p == 2.0) {
    for (const auto& [v, x] : f) {
      R a = magnitude(x);
      sum += p == 1.0 ? a : R(a * a);
    }
    return detail::lp_root(sum, p);
  }
  // General p: scale by the largest entry to keep pow() in range.
  double top = 0.0;
  for (const auto& [v, x] : f) top = std::max(top, real_to_double(magnitude(x)));
  double acc = 0.0;
  for (const auto& [v, x] : f) acc += std::pow(real_to_double(magnitude(x)) / top, p);
  return scalar_traits<S>::real_from_double(top * std::pow(acc, 1.0 / p));
}

template <Scalar S>
using SeminormFn = std::function<real_t<S>(const SeqVector<S>&)>;

template <class R>
struct FNormValue {
  R value;       // Σ_{k ≤ K} 2^{-k} min(1, ∥f∥_k), plus the exact tail when known
  R tail_bound;  // upper bound on the omitted tail (0 when the tail was summed)
};

/// The F-norm Σ_k 2^{-k} min(1, ∥f∥_k) over a finite list of seminorms.
///
/// With `tail_repeats_last`, every seminorm beyond the list equals the last one
/// and the tail 2^{-K} min(1, ∥f∥_K) is added exactly. Otherwise the tail is
/// only bounded by 2^{-K}.
template <Scalar S>
FNormValue<real_t<S>> fnorm(const SeqVector<S>& f, std::span<const SeminormFn<S>> seminorms,
                            bool tail_repeats_last = false) {
  using R = real_t<S>;
  if (seminorms.empty()) throw InvalidArgument("fnorm needs at least one seminorm");
  R value(0);
  R weight(1);
  R previous(0);
  R last(0);
  for (std::size_t k = 0; k < seminorms.size(); ++k) {
    weight /= R(2);
    R s = seminorms[k](f);
    if (s < previous) throw InvalidArgument("seminorm list is not increasing at index " + std::to_string(k + 1));
    previous = s;
    last = std::min<R>(R(1), s);
    value += weight * last;
  }
  if (tail_repeats_last) return {value + weight * last, R(0)};
  return {value, weight};
}

}  // namespace chainrec
