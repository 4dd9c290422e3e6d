#pragma once

#include <string>

#include <json.hpp>

#include "chainrec/certificates.hpp"
#include "chainrec/classical.hpp"
#include "chainrec/constructions.hpp"

namespace chainrec {

using Json = nlohmann::json;

inline Json to_json(const TruncationParams& p) {
  return {{"n_min", p.n_min}, {"n_max", p.n_max}, {"k_max", p.k_max}, {"j_min", p.j_min}, {"j_max", p.j_max}};
}

/// {vertices, edges, flags}.
inline Json to_json(const DirectedTree& tree) {
  Json vertices = Json::array();
  for (VertexId v : tree.vertices()) vertices.push_back(v.str());
  Json edges = Json::array();
  for (const auto& [p, c] : tree.edges()) edges.push_back({p.str(), c.str()});
  Json outside = Json::object();
  for (const auto& [v, p] : tree.outside_parents()) outside[v.str()] = p.str();
  Json children = Json::array();
  for (VertexId v : tree.children_outside_set()) children.push_back(v.str());
  return {{"kind", to_string(tree.kind())},
          {"params", to_json(tree.params())},
          {"vertices", vertices},
          {"edges", edges},
          {"flags", {{"parent_outside", outside}, {"children_outside", children}}}};
}

template <Scalar S>
Json to_json(const SeqVector<S>& f) {
  Json out = Json::object();
  for (const auto& [v, x] : f) out[v.str()] = format_scalar(x);
  return out;
}

template <Scalar S>
SeqVector<S> vector_from_json(const Json& j) {
  SeqVector<S> f;
  for (const auto& [key, value] : j.items()) f.add(VertexId::parse(key), scalar_traits<S>::parse(value.template get<std::string>()));
  return f;
}

/// Family tag, parameters and window shape; columns are omitted.
template <Scalar S>
Json describe_op(const LinearOp<S>& op) {
  Json out = {{"family", to_string(op.family())},
              {"mode", scalar_traits<S>::mode_name},
              {"params", to_json(op.params())},
              {"window_size", op.window().size()},
              {"leaking_columns", 0}};
  std::size_t leaks = 0;
  for (const auto& [u, c] : op.columns())
    if (c.leak_target) ++leaks;
  out["leaking_columns"] = leaks;
  if (op.mu1) out["mu1"] = format_scalar(*op.mu1);
  if (op.mu2) out["mu2"] = format_scalar(*op.mu2);
  for (const auto& [k, v] : op.notes) out["notes"][k] = v;
  return out;
}

inline Json to_json(const NormSpec& n) { return describe(n); }

template <Scalar S>
Json to_json(const DeltaChain<S>& c) {
  Json vectors = Json::array();
  for (const auto& f : c.vectors) vectors.push_back(to_json(f));
  Json out = {{"label", c.label},
              {"length", c.length()},
              {"delta", format_real(c.delta)},
              {"norm", to_json(c.norm)},
              {"operator", c.op ? to_string(c.op->family()) : "none"},
              {"vectors", vectors}};
  if (c.junction_tolerance) out["junction_tolerance"] = format_real(*c.junction_tolerance);
  return out;
}

/// Replays a serialized chain against an operator. The norm must be supplied.
template <Scalar S>
DeltaChain<S> chain_from_json(const Json& j, std::shared_ptr<const LinearOp<S>> op, NormSpec norm) {
  DeltaChain<S> c;
  c.label = j.value("label", std::string());
  c.delta = magnitude(scalar_traits<S>::parse(j.at("delta").get<std::string>()));
  for (const auto& v : j.at("vectors")) c.vectors.push_back(vector_from_json<S>(v));
  c.op = std::move(op);
  c.norm = std::move(norm);
  return c;
}

inline Json to_json(const WindowRequirement& w) {
  Json out = {{"line", {w.line_lo, w.line_hi}}};
  if (w.needs_branch()) out["branch"] = {{"k", w.branch_k}, {"j", {w.j_lo, w.j_hi}}};
  return out;
}

template <class R>
Json to_json(const ChainRecipe<R>& r) {
  Json out = {{"kind", to_string(r.kind)},
              {"direction", to_string(r.direction)},
              {"delta", format_real(r.delta)},
              {"target", r.target},
              {"inequality", r.inequality},
              {"window", to_json(r.window)}};
  if (r.m1) out["m1"] = *r.m1;
  if (r.m2) out["m2"] = *r.m2;
  if (r.grid_n) out["n"] = *r.grid_n;
  if (r.inner_delta) out["inner_delta"] = format_real(*r.inner_delta);
  if (r.predicted_defect) out["predicted_defect"] = format_real(*r.predicted_defect);
  return out;
}

template <class R>
Json to_json(const Verdict<R>& v) {
  Json trace = Json::array();
  for (const auto& t : v.trace) trace.push_back({{"step", t.step}, {"detail", t.detail}});
  Json out = {{"kind", to_string(v.kind)}, {"subject", v.subject}, {"trace", trace}};
  if (v.bound) {
    out["bound"] = format_real(*v.bound);
    out["bound_f64"] = real_to_double(*v.bound);
  }
  if (!v.evidence.empty()) out["evidence"] = v.evidence;
  if (!v.reason.empty()) out["reason"] = v.reason;
  return out;
}

template <class R>
Json to_json(const SeriesResult<R>& s) {
  Json out = {{"decided", s.decided}, {"diverges", s.diverges}, {"terms", s.terms}, {"reason", s.reason}};
  if (s.decided && !s.diverges) {
    out["finite_part"] = s.finite_part.str();
    out["tail"] = format_real(s.tail);
    out["total"] = s.total().str();
  }
  return out;
}

template <class R>
Json to_json(const ClassicalReport<R>& rep) {
  Json sweep = Json::array();
  for (const auto& row : rep.sweep) {
    Json plus = Json::array(), minus = Json::array();
    for (const auto& s : row.plus) plus.push_back(to_json(s));
    for (const auto& s : row.minus) minus.push_back(to_json(s));
    Json r = {{"n0", row.n0}, {"kind", to_string(row.kind)}, {"plus", plus}};
    if (!row.minus.empty()) r["minus"] = minus;
    sweep.push_back(r);
  }
  Json oracle = Json::array();
  for (const auto& o : rep.oracle)
    oracle.push_back({{"m", o.m}, {"value", o.value ? format_real(*o.value) : std::string("inf")}});
  Json out = {{"verdict", to_json(rep.verdict)}, {"n0_sweep", sweep}};
  if (!rep.oracle.empty()) {
    out["oracle"] = {{"description", rep.oracle_description}, {"table", oracle}};
    if (rep.oracle_infimum) out["oracle"]["infimum"] = format_real(*rep.oracle_infimum);
  }
  return out;
}

template <class R>
Json to_json(const ZeroWeightReport<R>& rep) {
  Json series = Json::array();
  for (const auto& s : rep.upper_series) series.push_back(to_json(s));
  Json out = {{"cr", to_string(rep.shape)},
              {"zeros_unbounded_above", rep.zeros_unbounded_above},
              {"reason", rep.reason},
              {"upper_series", series},
              {"restriction", to_json(rep.restriction)}};
  if (rep.n0) {
    out["n0"] = *rep.n0;
    out["y_minus"] = rep.lower_subspace;
    out["y_plus"] = rep.upper_subspace;
  }
  return out;
}

inline Json to_json(const SearchResult& r) {
  return {{"trials", r.trials},           {"adversarial_trials", r.adversarial}, {"found", r.found},
          {"leaked", r.leaked},           {"best_closing", r.best_closing},      {"best_length", r.best_length}};
}

}  // namespace chainrec
