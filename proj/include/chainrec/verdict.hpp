#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainrec/error.hpp"
#include "chainrec/scalar.hpp"

namespace chainrec {

enum class VerdictKind { ChainRecurrent, NotChainRecurrent, Inconclusive };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::ChainRecurrent: return "ChainRecurrent";
    case VerdictKind::NotChainRecurrent: return "NotChainRecurrent";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct TraceLine {
  std::string step;
  std::string detail;
};

/// Outcome of a chain-recurrence question about one vector or one operator.
///
/// NotChainRecurrent carries a positive δ̄: no δ-chain of the stated kind exists
/// for any δ ≤ δ̄. The trace records the inequalities behind it.
template <class R>
struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<R> bound;
  std::string subject;
  std::string evidence;
  std::string reason;
  std::vector<TraceLine> trace;

  static Verdict chain_recurrent(std::string subject, std::string evidence) {
    Verdict v;
    v.kind = VerdictKind::ChainRecurrent;
    v.subject = std::move(subject);
    v.evidence = std::move(evidence);
    return v;
  }

  static Verdict not_chain_recurrent(std::string subject, R bound) {
    if (!(bound > R(0))) throw InvalidArgument("non-recurrence bound must be positive");
    Verdict v;
    v.kind = VerdictKind::NotChainRecurrent;
    v.subject = std::move(subject);
    v.bound = std::move(bound);
    return v;
  }

  static Verdict inconclusive(std::string subject, std::string reason) {
    Verdict v;
    v.kind = VerdictKind::Inconclusive;
    v.subject = std::move(subject);
    v.reason = std::move(reason);
    return v;
  }

  Verdict& note(std::string step, std::string detail) {
    trace.push_back({std::move(step), std::move(detail)});
    return *this;
  }
};

/// A non-negative real or +∞ (the convention c/0 = ∞ of the series criteria).
template <class R>
struct Extended {
  R value{};
  bool infinite = false;

  static Extended inf() { return {R(0), true}; }
  Extended& operator+=(const Extended& o) {
    if (o.infinite) infinite = true;
    if (!infinite) value += o.value;
    return *this;
  }
  std::string str() const { return infinite ? std::string("inf") : format_real(value); }
};

}  // namespace chainrec
