#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chainrec/scalar.hpp"
#include "chainrec/vertex.hpp"

namespace chainrec {

/// Finitely supported sequence over a vertex set. Absent entries are zero and
/// no stored entry is ever exactly zero.
template <Scalar S>
class SeqVector {
 public:
  using scalar_type = S;
  using map_type = std::map<VertexId, S>;
  using const_iterator = typename map_type::const_iterator;

  SeqVector() = default;
  SeqVector(std::initializer_list<std::pair<const VertexId, S>> entries) {
    for (const auto& [v, x] : entries) add(v, x);
  }

  static SeqVector unit(VertexId v, const S& coefficient = S(1)) {
    SeqVector f;
    f.set(v, coefficient);
    return f;
  }

  S at(VertexId v) const {
    auto it = entries_.find(v);
    return it == entries_.end() ? S(0) : it->second;
  }

  bool contains(VertexId v) const { return entries_.count(v) != 0; }

  void set(VertexId v, const S& value) {
    if (is_zero(value))
      entries_.erase(v);
    else
      entries_[v] = value;
  }

  void add(VertexId v, const S& value) {
    if (is_zero(value)) return;
    auto [it, inserted] = entries_.try_emplace(v, value);
    if (inserted) return;
    it->second += value;
    if (is_zero(it->second)) entries_.erase(it);
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  const map_type& entries() const { return entries_; }

  std::vector<VertexId> support() const {
    std::vector<VertexId> out;
    out.reserve(entries_.size());
    for (const auto& [v, _] : entries_) out.push_back(v);
    return out;
  }

  SeqVector& operator+=(const SeqVector& g) {
    for (const auto& [v, x] : g) add(v, x);
    return *this;
  }
  SeqVector& operator-=(const SeqVector& g) {
    for (const auto& [v, x] : g) add(v, S(-x));
    return *this;
  }
  SeqVector& operator*=(const S& alpha) {
    if (is_zero(alpha)) {
      entries_.clear();
      return *this;
    }
    for (auto& [v, x] : entries_) x *= alpha;
    return *this;
  }

  friend SeqVector operator+(SeqVector f, const SeqVector& g) { return f += g; }
  friend SeqVector operator-(SeqVector f, const SeqVector& g) { return f -= g; }
  friend SeqVector operator-(SeqVector f) { return f *= S(-1); }
  friend SeqVector operator*(const S& alpha, SeqVector f) { return f *= alpha; }
  friend bool operator==(const SeqVector& f, const SeqVector& g) { return f.entries_ == g.entries_; }

 private:
  map_type entries_;
};

/// alpha * f + g. Both operands share the scalar type, so mixing exact and
/// floating vectors does not compile.
template <Scalar S>
SeqVector<S> axpy(const S& alpha, const SeqVector<S>& f, const SeqVector<S>& g) {
  SeqVector<S> out = g;
  if (is_zero(alpha)) return out;
  for (const auto& [v, x] : f) out.add(v, alpha * x);
  return out;
}

/// "{(-6,0): -64, 3: 1/2}"; "{}" for the zero vector.
template <Scalar S>
std::string to_string(const SeqVector<S>& f) {
  std::string out = "{";
  for (const auto& [v, x] : f) {
    if (out.size() > 1) out += ", ";
    out += v.str() + ": " + format_scalar(x);
  }
  return out + "}";
}

/// Converts between scalar modes (e.g. an exact chain replayed in floating point).
template <Scalar To, Scalar From>
SeqVector<To> convert_vector(const SeqVector<From>& f) {
  SeqVector<To> out;
  for (const auto& [v, x] : f) {
    if constexpr (std::is_same_v<From, Rational> && !std::is_same_v<To, Rational>)
      out.set(v, To(x.template convert_to<double>()));
    else if constexpr (std::is_same_v<To, Rational> && std::is_same_v<From, double>)
      out.set(v, Rational(x));
    else
      out.set(v, To(x));
  }
  return out;
}

}  // namespace chainrec
