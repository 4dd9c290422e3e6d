#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/seq_vector.hpp"
#include "chainrec/tree.hpp"

namespace chainrec {

enum class OpFamily { CombShift, GridT, GridTInverse, ClassicalShift, Custom };

inline const char* to_string(OpFamily f) {
  switch (f) {
    case OpFamily::CombShift: return "CombShift";
    case OpFamily::GridT: return "GridT";
    case OpFamily::GridTInverse: return "GridTInverse";
    case OpFamily::ClassicalShift: return "ClassicalShift";
    case OpFamily::Custom: return "Custom";
  }
  return "?";
}

/// Image of one basis vector. `leak_target` is set when the image leaves the window.
template <Scalar S>
struct Column {
  std::vector<std::pair<VertexId, S>> entries;
  std::optional<VertexId> leak_target;
};

/// Linear operator stored column-wise: the image of each basis vector e_u of the window.
///
/// Rows (which basis vectors feed a given coordinate) are derived from the
/// columns. `incomplete_rows` lists coordinates that also receive contributions
/// from basis vectors outside the window; row data there is partial.
template <Scalar S>
class LinearOp {
 public:
  using scalar_type = S;

  LinearOp() = default;
  LinearOp(OpFamily family, std::set<VertexId> window, TruncationParams params = {})
      : family_(family), window_(std::move(window)), params_(params) {}

  void set_column(VertexId u, Column<S> column) {
    if (!window_.count(u)) throw InvalidArgument("column for vertex outside window: " + u.str());
    if (auto old = columns_.find(u); old != columns_.end())
      for (const auto& [v, _] : old->second.entries) {
        auto& row = rows_[v];
        std::erase_if(row, [&](const auto& e) { return e.first == u; });
      }
    std::vector<std::pair<VertexId, S>> kept;
    for (auto& [v, x] : column.entries) {
      if (is_zero(x)) continue;
      if (!window_.count(v)) throw InvalidArgument("column target outside window must be a leak: " + v.str());
      kept.emplace_back(v, x);
    }
    column.entries = std::move(kept);
    for (const auto& [v, x] : column.entries) rows_[v].emplace_back(u, x);
    columns_[u] = std::move(column);
  }

  void mark_incomplete_row(VertexId v) { incomplete_rows_.insert(v); }

  OpFamily family() const { return family_; }
  const std::set<VertexId>& window() const { return window_; }
  const TruncationParams& params() const { return params_; }
  bool contains(VertexId v) const { return window_.count(v) != 0; }
  const std::map<VertexId, Column<S>>& columns() const { return columns_; }
  const Column<S>& column(VertexId u) const {
    auto it = columns_.find(u);
    if (it == columns_.end()) throw LeakageOutOfWindow(u);
    return it->second;
  }
  const std::set<VertexId>& incomplete_rows() const { return incomplete_rows_; }
  bool row_incomplete(VertexId v) const { return incomplete_rows_.count(v) != 0; }

  /// Basis vectors u with a nonzero coefficient at coordinate v, in the window.
  const std::vector<std::pair<VertexId, S>>& row(VertexId v) const {
    static const std::vector<std::pair<VertexId, S>> none;
    auto it = rows_.find(v);
    return it == rows_.end() ? none : it->second;
  }

  std::optional<S> mu1;
  std::optional<S> mu2;
  /// Free-form parameters recorded in reports (weights generator, labels).
  std::map<std::string, std::string> notes;

  /// Linear extension of the columns. Throws LeakageOutOfWindow when f touches
  /// a vertex outside the window or a column whose image leaves it.
  SeqVector<S> apply(const SeqVector<S>& f) const {
    SeqVector<S> out;
    for (const auto& [u, x] : f) {
      auto it = columns_.find(u);
      if (it == columns_.end()) throw LeakageOutOfWindow(u);
      if (it->second.leak_target) throw LeakageOutOfWindow(*it->second.leak_target);
      for (const auto& [v, a] : it->second.entries) out.add(v, a * x);
    }
    return out;
  }

  /// n-fold application; n = 0 is the identity. Leakage reports the failing step.
  SeqVector<S> apply_power(const SeqVector<S>& f, std::size_t n) const {
    SeqVector<S> cur = f;
    for (std::size_t step = 1; step <= n; ++step) {
      if (cur.empty()) break;
      try {
        cur = apply(cur);
      } catch (const LeakageOutOfWindow& e) {
        throw e.at_step(step);
      }
    }
    return cur;
  }

 private:
  OpFamily family_ = OpFamily::Custom;
  std::set<VertexId> window_;
  TruncationParams params_{};
  std::map<VertexId, Column<S>> columns_;
  std::map<VertexId, std::vector<std::pair<VertexId, S>>> rows_;
  std::set<VertexId> incomplete_rows_;
};

template <Scalar S>
SeqVector<S> apply(const LinearOp<S>& op, const SeqVector<S>& f) {
  return op.apply(f);
}

template <Scalar S>
SeqVector<S> apply_power(const LinearOp<S>& op, const SeqVector<S>& f, std::size_t n) {
  return op.apply_power(f, n);
}

/// a ∘ b on the window of b. A column leaks when either factor leaks on it.
template <Scalar S>
LinearOp<S> compose(const LinearOp<S>& a, const LinearOp<S>& b) {
  LinearOp<S> out(OpFamily::Custom, b.window(), b.params());
  for (const auto& [u, col] : b.columns()) {
    Column<S> c;
    if (col.leak_target) {
      c.leak_target = col.leak_target;
    } else {
      SeqVector<S> image;
      for (const auto& [v, x] : col.entries) image.add(v, x);
      try {
        SeqVector<S> composed = a.apply(image);
        for (const auto& [v, x] : composed) {
          if (!out.contains(v)) {
            c.leak_target = v;
            c.entries.clear();
            break;
          }
          c.entries.emplace_back(v, x);
        }
      } catch (const LeakageOutOfWindow& e) {
        c.leak_target = e.vertex();
      }
    }
    out.set_column(u, std::move(c));
  }
  return out;
}

/// Basis vectors of `basis` on which a∘b differs from the identity (or leaks).
template <Scalar S>
std::vector<VertexId> identity_failures(const LinearOp<S>& a, const LinearOp<S>& b, const std::set<VertexId>& basis) {
  std::vector<VertexId> bad;
  for (VertexId v : basis) {
    try {
      if (!(a.apply(b.apply(SeqVector<S>::unit(v))) == SeqVector<S>::unit(v))) bad.push_back(v);
    } catch (const LeakageOutOfWindow&) {
      bad.push_back(v);
    }
  }
  return bad;
}

}  // namespace chainrec
