#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chainrec/chainrec.hpp"
#include "chainrec/serialize.hpp"
#include "scenario.hpp"

namespace chainrec::cli {

inline constexpr int schema_version = 1;

struct RunOptions {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

struct Report {
  Json json;
  bool ok = true;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  std::string csv() const {
    auto line = [](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
        if (!quote) {
          s += cells[i];
          continue;
        }
        s += '"';
        for (char c : cells[i]) s += c == '"' ? std::string("\"\"") : std::string(1, c);
        s += '"';
      }
      return s + "\n";
    };
    std::string out = line(csv_header);
    for (const auto& r : csv_rows) out += line(r);
    return out;
  }
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

inline NormSpec norm_from(const NormConfig& c) {
  if (c.type == "lp") return Lp{c.p};
  return Sup{};
}

template <Scalar S>
WeightAssignment<S> weights_from(const Scenario& s) {
  auto w = WeightAssignment<S>::standard(scalar_traits<S>::parse(s.mu1), scalar_traits<S>::parse(s.mu2));
  for (const auto& b : s.branches) {
    BranchWeights<S> bw;
    bw.lo = b.lo;
    for (const auto& x : b.values) bw.values.push_back(scalar_traits<S>::parse(x));
    if (b.above) bw.above = scalar_traits<S>::parse(*b.above);
    if (b.below) bw.below = scalar_traits<S>::parse(*b.below);
    w.grid_custom[b.k] = std::move(bw);
  }
  return w;
}

inline void require_branch_family(const Scenario& s, const std::string& command) {
  if (s.family != "comb" && s.family != "grid")
    throw ConfigError(command + " needs operator.family comb or grid (got '" + s.family + "')");
}

/// Library errors raised while validating the scenario are configuration errors.
template <class F>
auto as_config(const std::string& what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

/// Operator on the truncation declared in the scenario, with missing fields
/// filled from `fallback`.
template <Scalar S>
std::shared_ptr<const LinearOp<S>> build_branch_op(const Scenario& s, const WeightAssignment<S>& w,
                                                   TruncationParams fallback) {
  TruncationParams p = fallback;
  const auto& t = s.truncation;
  if (t.n_min) p.n_min = *t.n_min;
  if (t.n_max) p.n_max = *t.n_max;
  if (t.k_max) p.k_max = *t.k_max;
  if (t.j_min) p.j_min = *t.j_min;
  if (t.j_max) p.j_max = *t.j_max;
  return as_config("operator", [&] {
    w.validate_mu();
    if (s.family == "grid") return share(build_grid_T(build_grid_tree(p), w));
    if (t.j_min || t.j_max) throw ConfigError("truncation.j_min/j_max apply to the grid only");
    p.j_min = 1;
    p.j_max = p.k_max;
    return share(shift_from_weights(build_comb_tree(p), w));
  });
}

template <Scalar S>
Json head(const Scenario& s, const std::string& command) {
  return {{"schema_version", schema_version},
          {"command", command},
          {"scenario", s.name},
          {"scenario_hash", scenario_hash(s)},
          {"mode", s.mode},
          {"seed", s.seed}};
}

template <Scalar S>
std::vector<real_t<S>> deltas_from(const Scenario& s) {
  std::vector<real_t<S>> out;
  for (const auto& d : s.deltas) out.push_back(magnitude(scalar_traits<S>::parse(d)));
  return out;
}

/// Truncation large enough for every chain of the (δ, n, direction) grid.
template <Scalar S>
std::pair<TruncationParams, std::vector<std::pair<std::string, WindowRequirement>>> construction_window(
    const Scenario& s, const WeightAssignment<S>& w) {
  const auto family = s.family == "grid" ? OpFamily::GridT : OpFamily::CombShift;
  std::vector<std::pair<std::string, WindowRequirement>> reqs;
  std::optional<WindowRequirement> all;
  as_config("operator", [&] { w.validate_mu(); });
  for (const auto& d : deltas_from<S>(s))
    for (std::int64_t n = s.line_min; n <= s.line_max; ++n)
      for (auto dir : {Direction::FromZero, Direction::ToZero}) {
        auto r = requirement_for_basis<S>(n, d, family, w.mu1, w.mu2, dir);
        reqs.push_back({std::string(to_string(dir)) + " e_" + std::to_string(n) + " at delta " + format_real(d), r});
        all = all ? merge(*all, r) : r;
      }
  TruncationParams p = (all ? *all : WindowRequirement{}).minimal(family == OpFamily::GridT ? TreeKind::Grid : TreeKind::Comb);
  // merge() keeps one branch index; make sure every required finger fits.
  for (const auto& [_, r] : reqs) p.k_max = std::max(p.k_max, r.branch_k);
  if (family == OpFamily::CombShift) p.j_max = p.k_max;
  p.n_min = std::min(p.n_min, -p.k_max);
  return {p, reqs};
}

template <Scalar S>
Json chain_summary(const DeltaChain<S>& c, const SeqVector<S>& start, const SeqVector<S>& end) {
  const auto d = defect(c);
  Json out = {{"length", c.length()},
              {"defect", format_real(d)},
              {"defect_f64", real_to_double(d)},
              {"margin", format_real(margin(c))},
              {"valid", is_valid(c)},
              {"endpoints_exact", c.front() == start && c.back() == end}};
  if constexpr (!is_exact_v<S>) {
    out["endpoint_gap"] = std::max(norm(SeqVector<S>(c.front() - start), Sup{}), norm(SeqVector<S>(c.back() - end), Sup{}));
    if (c.junction_tolerance) out["junction_tolerance"] = *c.junction_tolerance;
  }
  return out;
}

template <Scalar S>
Report run_verify_constructions(const Scenario& s, const RunOptions& opt) {
  require_branch_family(s, "verify-constructions");
  const auto w = as_config("operator", [&] { return weights_from<S>(s); });
  auto [fallback, reqs] = construction_window<S>(s, w);
  auto op = build_branch_op<S>(s, w, fallback);
  if (s.truncation.any())
    for (const auto& [what, r] : reqs) as_config("truncation too small", [&, &what = what, &r = r] { r.check(op->window(), what); });
  const NormSpec nrm = norm_from(s.norm);

  struct Job {
    real_t<S> delta;
    std::int64_t n;
  };
  std::vector<Job> jobs;
  for (const auto& d : deltas_from<S>(s))
    for (std::int64_t n = s.line_min; n <= s.line_max; ++n) jobs.push_back({d, n});

  auto results = parallel_map<Json>(jobs.size(), opt.jobs, [&](std::size_t i) {
    const auto& [d, n] = jobs[i];
    const auto e = SeqVector<S>::unit(VertexId::line(n));
    Json entry = {{"delta", format_real(d)}, {"n", n}};
    try {
      auto from = chain_for_basis<S>(n, d, op, Direction::FromZero, nrm);
      auto to = chain_for_basis<S>(n, d, op, Direction::ToZero, nrm);
      Json fz = chain_summary(from.chain, SeqVector<S>{}, e);
      fz["recipe"] = to_json(from.recipe);
      Json tz = chain_summary(to.chain, e, SeqVector<S>{});
      tz["recipe"] = to_json(to.recipe);
      const auto trip = concat(to.chain, from.chain);
      entry["from_zero"] = fz;
      entry["to_zero"] = tz;
      entry["round_trip"] = chain_summary(trip, e, e);
    } catch (const Error& ex) {
      entry["error"] = ex.what();
    }
    return entry;
  });

  Report rep;
  rep.json = head<S>(s, "verify-constructions");
  rep.json["window"] = to_json(op->params());
  rep.json["norm"] = describe(nrm);
  rep.csv_header = {"delta", "n", "direction", "length", "defect", "margin", "valid", "endpoints_exact"};
  Json entries = Json::array();
  for (auto& e : results) {
    if (e.contains("error")) rep.ok = false;
    for (const char* key : {"from_zero", "to_zero", "round_trip"}) {
      if (!e.contains(key)) continue;
      const auto& c = e[key];
      const bool good = c["valid"].template get<bool>() && (!is_exact_v<S> || c["endpoints_exact"].template get<bool>());
      if (!good) rep.ok = false;
      rep.csv_rows.push_back({e["delta"].template get<std::string>(), std::to_string(e["n"].template get<std::int64_t>()), key,
                              std::to_string(c["length"].template get<std::size_t>()), c["defect"].template get<std::string>(),
                              c["margin"].template get<std::string>(), c["valid"].template get<bool>() ? "true" : "false",
                              c["endpoints_exact"].template get<bool>() ? "true" : "false"});
    }
    entries.push_back(std::move(e));
  }
  rep.json["entries"] = std::move(entries);
  rep.json["ok"] = rep.ok;
  return rep;
}

namespace detail {

template <class R>
struct OracleScan {
  std::optional<R> infimum;
  std::size_t evaluated = 0;
  bool unreachable_seen = false;
};

/// Infimum of min_delta_reach over m = 1..horizon, stopping at the first m the
/// window cannot support.
template <Scalar S, class Source, class Target, class Value>
OracleScan<real_t<S>> scan_oracle(const LinearOp<S>& op, std::size_t horizon, const NormSpec& nrm, Source source,
                                  Target target, Value value) {
  OracleScan<real_t<S>> out;
  for (std::size_t m = 1; m <= horizon; ++m) {
    std::optional<real_t<S>> v;
    try {
      v = min_delta_reach(op, source(m), target(m), value(m), m, nrm);
    } catch (const InfluenceTruncated&) {
      break;
    } catch (const LeakageOutOfWindow&) {
      break;
    }
    ++out.evaluated;
    if (!v) {
      out.unreachable_seen = true;
      continue;
    }
    if (!out.infimum || *v < *out.infimum) out.infimum = v;
  }
  return out;
}

template <class R>
bool not_below(const std::optional<R>& oracle, const R& bound) {
  if (!oracle) return true;  // unreachable: the infimum is +inf
  if constexpr (std::is_same_v<R, Rational>)
    return *oracle >= bound;
  else
    return *oracle >= bound * (1.0 - 64 * std::numeric_limits<double>::epsilon());
}

template <class R>
Json opt_real(const std::optional<R>& x) {
  return x ? Json(format_real(*x)) : Json("inf");
}

}  // namespace detail

/// Line span: round-trip chains for every δ. Branch vectors: certificates,
/// oracle cross-checks and (comb) a randomized return-chain search.
template <Scalar S>
Report run_certify(const Scenario& s, const RunOptions& opt) {
  using R = real_t<S>;
  require_branch_family(s, "certify");
  const auto w = as_config("operator", [&] { return weights_from<S>(s); });
  as_config("operator", [&] { w.validate_mu(); });
  const std::int64_t k_max = s.branch_k_max;
  const NormSpec nrm = norm_from(s.norm);
  const bool grid = s.family == "grid";
  const std::int64_t j_min = s.branch_j_min.value_or(-(k_max + 1));
  const std::int64_t j_max = s.branch_j_max.value_or(k_max + 1);
  if (grid && j_min > j_max) throw ConfigError("basis.j_min > basis.j_max");

  Report rep;
  rep.json = head<S>(s, "certify");
  rep.json["norm"] = describe(nrm);
  rep.csv_header = {"k", "j", "verdict", "bound", "case", "oracle_infimum", "oracle_ok"};

  struct BranchJob {
    std::int64_t k, j;
  };
  std::vector<BranchJob> branch_jobs;
  for (std::int64_t k = 1; k <= k_max; ++k)
    for (std::int64_t j = grid ? j_min : 1; j <= (grid ? j_max : k); ++j) branch_jobs.push_back({k, j});

  std::shared_ptr<const LinearOp<S>> cert_op;
  std::shared_ptr<const LinearOp<double>> search_op;
  WeightAssignment<double> wd;
  const std::size_t H = static_cast<std::size_t>(s.oracle_horizon);
  const std::size_t L = static_cast<std::size_t>(s.search_max_length);
  if (k_max > 0) {
    const auto hj = static_cast<std::int64_t>(H);
    TruncationParams p{-k_max - 1, 1, k_max, grid ? j_min - hj : 1, grid ? j_max + hj : k_max};
    cert_op = build_branch_op<S>(s, w, p);
    for (const auto& job : branch_jobs)
      if (!cert_op->contains(VertexId::branch(job.k, job.j)))
        throw ConfigError("truncation too small: basis vector " + VertexId::branch(job.k, job.j).str() +
                          " lies outside the window");
    if (!grid && s.search_trials > 0) {
      wd = weights_from<double>(s);
      const auto ll = static_cast<std::int64_t>(L);
      search_op = share(shift_from_weights(build_comb_tree({-k_max - ll - 2, ll + 2, k_max, 1, k_max}), wd));
    }
  } else {
    rep.json["fallback"] = {
        {"note", "k_max = 0: no branch vectors; on the line span the operator is the mu1-scaled bilateral shift"}};
    auto cw = ClassicalWeights<S>::constant(ShiftDomain::Bilateral, w.mu1);
    auto fam = SeminormFamily<R>::banach(nrm);
    rep.json["fallback"]["classical"] = to_json(classify_classical(cw, fam));
  }

  auto branch_results = parallel_map<Json>(branch_jobs.size(), opt.jobs, [&](std::size_t i) {
    const auto [k, j] = branch_jobs[i];
    const VertexId v = VertexId::branch(k, j);
    const auto f = SeqVector<S>::unit(v);
    Json e = {{"vertex", v.str()}, {"k", k}, {"j", j}};
    bool ok = true;
    if (!grid) {
      auto verdict = noncr_bound_comb(f, w, true);
      const R bound = *verdict.bound;
      const std::int64_t d = k - j;
      // Same endpoint condition as the certificate: coordinate v back to f(v) at step m.
      auto scan = [&](std::size_t lo, std::size_t hi) {
        detail::OracleScan<R> out;
        for (std::size_t m = std::max<std::size_t>(lo, 1); m <= hi; ++m) {
          auto val = min_delta_reach(*cert_op, f, v, S(1), m, nrm);
          ++out.evaluated;
          if (val && (!out.infimum || *val < *out.infimum)) out.infimum = val;
          if (!val) out.unreachable_seen = true;
        }
        return out;
      };
      auto short_scan = scan(1, std::min<std::size_t>(H, static_cast<std::size_t>(d)));
      auto long_scan = scan(static_cast<std::size_t>(d) + 1, H);
      std::optional<R> inf = short_scan.infimum;
      if (long_scan.infimum && (!inf || *long_scan.infimum < *inf)) inf = long_scan.infimum;
      ok = detail::not_below(inf, bound);
      e["verdict"] = to_json(verdict);
      e["case"] = "both: m <= k-j_k and m > k-j_k";
      e["oracle"] = {{"horizon", H},
                     {"infimum", detail::opt_real(inf)},
                     {"short_lengths", short_scan.evaluated},
                     {"short_infimum", detail::opt_real(short_scan.infimum)},
                     {"long_lengths", long_scan.evaluated},
                     {"long_infimum", detail::opt_real(long_scan.infimum)},
                     {"not_below_bound", ok}};
      if (search_op) {
        SearchConfig cfg;
        cfg.trials = static_cast<std::size_t>(s.search_trials);
        cfg.max_length = L;
        cfg.seed = s.seed + static_cast<std::uint64_t>(i);
        cfg.perturbation = real_to_double(bound) / 2;
        cfg.accept_below = real_to_double(bound);
        cfg.norm = nrm;
        auto res = random_return_search(*search_op, SeqVector<double>::unit(v), v, cfg);
        e["search"] = to_json(res);
        e["search"]["perturbation"] = cfg.perturbation;
        e["search"]["seed"] = cfg.seed;
        if (res.found > 0) ok = false;
      }
    } else {
      auto verdict = noncr_bound_grid(f, w);
      e["verdict"] = to_json(verdict);
      auto cands = grid_candidates(f, w);
      const auto& c = cands.front();
      auto fwd = detail::scan_oracle<S>(
          *cert_op, H, nrm, [](std::size_t) { return SeqVector<S>{}; }, [&](std::size_t) { return v; },
          [](std::size_t) { return S(1); });
      auto bwd = detail::scan_oracle<S>(
          *cert_op, H, nrm, [&](std::size_t) { return f; },
          [&](std::size_t m) { return VertexId::branch(k, j - static_cast<std::int64_t>(m)); },
          [](std::size_t) { return S(0); });
      Json o = {{"horizon", H}};
      if (c.forward_bound) {
        const bool good = detail::not_below(fwd.infimum, *c.forward_bound);
        o["case1"] = {{"bound", format_real(*c.forward_bound)},
                      {"lengths", fwd.evaluated},
                      {"infimum", detail::opt_real(fwd.infimum)},
                      {"not_below_bound", good}};
        ok = ok && good;
      }
      if (c.backward_bound) {
        const bool good = detail::not_below(bwd.infimum, *c.backward_bound);
        o["case2"] = {{"bound", format_real(*c.backward_bound)},
                      {"lengths", bwd.evaluated},
                      {"infimum", detail::opt_real(bwd.infimum)},
                      {"not_below_bound", good}};
        ok = ok && good;
      }
      std::string taken = "none";
      for (const auto& t : verdict.trace)
        if (t.step == "case") taken = t.detail.substr(0, 1);
      e["case"] = taken;
      e["oracle"] = o;
      if (verdict.kind != VerdictKind::NotChainRecurrent) ok = false;
    }
    e["ok"] = ok;
    return e;
  });

  Json branch = Json::array();
  for (auto& e : branch_results) {
    if (!e["ok"].template get<bool>()) rep.ok = false;
    const auto& vj = e["verdict"];
    std::string inf = "";
    if (e["oracle"].contains("infimum")) inf = e["oracle"]["infimum"].template get<std::string>();
    else if (e["case"] == "1" && e["oracle"].contains("case1")) inf = e["oracle"]["case1"]["infimum"].template get<std::string>();
    else if (e["case"] == "2" && e["oracle"].contains("case2")) inf = e["oracle"]["case2"]["infimum"].template get<std::string>();
    rep.csv_rows.push_back({std::to_string(e["k"].template get<std::int64_t>()), std::to_string(e["j"].template get<std::int64_t>()),
                            vj["kind"].template get<std::string>(),
                            vj.contains("bound") ? vj["bound"].template get<std::string>() : "",
                            e["case"].template get<std::string>(), inf, e["ok"].template get<bool>() ? "true" : "false"});
    branch.push_back(std::move(e));
  }
  rep.json["branch_vectors"] = std::move(branch);
  if (cert_op) rep.json["certificate_window"] = to_json(cert_op->params());

  // Membership of the line vectors: a round trip through 0 for every δ.
  Json line = Json::array();
  if (!s.deltas.empty() && s.line_min <= s.line_max) {
    auto [p, reqs] = construction_window<S>(s, w);
    auto op = build_branch_op<S>(s, w, p);
    if (s.truncation.any())
      for (const auto& [what, r] : reqs) as_config("truncation too small", [&, &what = what, &r = r] { r.check(op->window(), what); });
    rep.json["membership_window"] = to_json(op->params());
    std::vector<std::int64_t> ns;
    for (std::int64_t n = s.line_min; n <= s.line_max; ++n) ns.push_back(n);
    const auto deltas = deltas_from<S>(s);
    auto results = parallel_map<Json>(ns.size(), opt.jobs, [&](std::size_t i) {
      const std::int64_t n = ns[i];
      const auto e = SeqVector<S>::unit(VertexId::line(n));
      Json chains = Json::array();
      bool all_valid = true;
      for (const auto& d : deltas) {
        Json c = {{"delta", format_real(d)}};
        try {
          auto trip = round_trip_chain<S>(n, d, op, nrm);
          c.update(chain_summary(trip, e, e));
          all_valid = all_valid && trip.front() == e && is_valid(trip);
        } catch (const Error& ex) {
          c["error"] = ex.what();
          all_valid = false;
        }
        chains.push_back(std::move(c));
      }
      return Json{{"vertex", VertexId::line(n).str()},
                  {"verdict", all_valid ? "ChainRecurrent" : "Inconclusive"},
                  {"evidence", "round-trip delta-chain e_n -> 0 -> e_n for each delta"},
                  {"chains", chains}};
    });
    for (auto& r : results) {
      if (r["verdict"] != "ChainRecurrent") rep.ok = false;
      line.push_back(std::move(r));
    }
  }
  rep.json["line_vectors"] = std::move(line);
  rep.json["ok"] = rep.ok;
  return rep;
}

template <Scalar S>
ClassicalWeights<S> classical_weights_from(const ClassicalSpec& c) {
  const auto domain = c.domain == "unilateral" ? ShiftDomain::Unilateral : ShiftDomain::Bilateral;
  if (c.constant) {
    auto w = ClassicalWeights<S>::constant(domain, scalar_traits<S>::parse(*c.constant));
    if (c.zero_pattern) w.zero_pattern = ZeroPattern{c.zero_pattern->first, c.zero_pattern->second};
    return w;
  }
  ClassicalWeights<S> w;
  w.domain = domain;
  w.lo = c.core_lo;
  for (const auto& x : c.core) w.core.push_back(scalar_traits<S>::parse(x));
  if (c.tail_plus) w.tail_plus = scalar_traits<S>::parse(*c.tail_plus);
  if (c.tail_minus) w.tail_minus = scalar_traits<S>::parse(*c.tail_minus);
  if (c.zero_pattern) w.zero_pattern = ZeroPattern{c.zero_pattern->first, c.zero_pattern->second};
  return w;
}

/// F_k = [-k, k] (symmetric) or [-2k, k+3] (shifted), k = 1..sets.
inline std::shared_ptr<const Exhaustion> line_exhaustion(const std::string& kind, std::int64_t sets) {
  std::vector<std::set<VertexId>> out;
  for (std::int64_t k = 1; k <= sets; ++k) {
    std::set<VertexId> f;
    const std::int64_t lo = kind == "shifted" ? -2 * k : -k;
    const std::int64_t hi = kind == "shifted" ? k + 3 : k;
    for (std::int64_t n = lo; n <= hi; ++n) f.insert(VertexId::line(n));
    out.push_back(std::move(f));
  }
  return std::make_shared<const Exhaustion>(std::move(out), kind);
}

template <class R>
SeminormFamily<R> family_from(const SpaceSpec& sp) {
  if (sp.type == "scaled") {
    std::vector<R> scales;
    for (const auto& x : sp.scales) scales.push_back(magnitude(scalar_traits<R>::parse(x)));
    return SeminormFamily<R>::scaled(norm_from(sp.norm), std::move(scales));
  }
  if (sp.type == "product") return SeminormFamily<R>::product(line_exhaustion(sp.exhaustion, sp.sets));
  return SeminormFamily<R>::banach(norm_from(sp.norm));
}

template <Scalar S>
Report run_classify(const Scenario& s, const RunOptions& opt) {
  using R = real_t<S>;
  if (!s.classical) throw ConfigError("classify needs a 'classical' section");
  const auto& cs = *s.classical;
  const auto w = as_config("classical", [&] { return classical_weights_from<S>(cs); });
  std::vector<SeminormFamily<R>> fams;
  for (const auto& sp : cs.spaces) fams.push_back(as_config("classical.spaces", [&] { return family_from<R>(sp); }));
  ClassifyOptions copt;
  copt.n0_lo = cs.n0_lo;
  copt.n0_hi = cs.n0_hi;
  copt.oracle_horizon = static_cast<std::size_t>(cs.oracle_horizon);
  const bool zeros = w.any_zero().has_value();

  Report rep;
  rep.json = head<S>(s, "classify");
  rep.json["domain"] = cs.domain;
  rep.json["analysis"] = zeros ? "zero_weight" : "criterion";
  rep.csv_header = {"space", "table", "index", "seminorm", "value"};

  auto results = parallel_map<std::pair<Json, std::vector<std::vector<std::string>>>>(
      fams.size(), opt.jobs, [&](std::size_t i) {
        const auto& fam = fams[i];
        Json e = {{"space", fam.name}};
        std::vector<std::vector<std::string>> rows;
        bool ok = true;
        std::string kind;
        if (zeros) {
          auto z = as_config("classical", [&] { return zero_weight_analysis(w, fam); });
          e["zero_weight"] = to_json(z);
          kind = std::string("CR=") + to_string(z.shape);
          ok = z.shape != CRShape::Unknown && z.restriction.kind == VerdictKind::ChainRecurrent;
          for (std::size_t k = 0; k < z.upper_series.size(); ++k)
            rows.push_back({fam.name, "upper_series_at_n0", z.n0 ? std::to_string(*z.n0) : "", std::to_string(k + 1),
                            z.upper_series[k].total().str()});
        } else {
          auto c = as_config("classical", [&] { return classify_classical(w, fam, copt); });
          e["report"] = to_json(c);
          kind = to_string(c.verdict.kind);
          ok = c.verdict.kind != VerdictKind::Inconclusive;
          if (c.verdict.bound && c.oracle_infimum) {
            const bool good = detail::not_below(c.oracle_infimum, *c.verdict.bound);
            e["oracle_not_below_bound"] = good;
            ok = ok && good;
          }
          for (const auto& row : c.sweep)
            for (std::size_t k = 0; k < row.plus.size(); ++k) {
              rows.push_back({fam.name, "S+", std::to_string(row.n0), std::to_string(k + 1), row.plus[k].total().str()});
              if (k < row.minus.size())
                rows.push_back({fam.name, "S-", std::to_string(row.n0), std::to_string(k + 1), row.minus[k].total().str()});
            }
          for (const auto& o : c.oracle)
            rows.push_back({fam.name, "oracle", std::to_string(o.m), "1", o.value ? format_real(*o.value) : "inf"});
        }
        e["verdict"] = kind;
        e["ok"] = ok;
        return std::pair{e, rows};
      });

  Json entries = Json::array();
  std::optional<std::string> first;
  bool agree = true;
  for (auto& [e, rows] : results) {
    if (!e["ok"].template get<bool>()) rep.ok = false;
    const auto kind = e["verdict"].template get<std::string>();
    if (first && *first != kind) agree = false;
    if (!first) first = kind;
    for (auto& r : rows) rep.csv_rows.push_back(std::move(r));
    entries.push_back(std::move(e));
  }
  rep.json["entries"] = std::move(entries);
  rep.json["verdicts_agree_across_spaces"] = agree;
  rep.json["ok"] = rep.ok;
  return rep;
}

/// Window for ad-hoc oracle queries: every referenced vertex plus room for the
/// longest influence path.
template <Scalar S>
std::shared_ptr<const LinearOp<S>> oracle_op(const Scenario& s, const std::vector<VertexId>& touched, std::int64_t reach) {
  std::int64_t n_lo = 0, n_hi = 0, k_hi = 1, j_lo = -1, j_hi = 1;
  for (VertexId v : touched) {
    if (v.is_line()) {
      n_lo = std::min(n_lo, v.n());
      n_hi = std::max(n_hi, v.n());
    } else {
      k_hi = std::max(k_hi, v.k());
      j_lo = std::min(j_lo, v.j());
      j_hi = std::max(j_hi, v.j());
      n_lo = std::min(n_lo, -v.k());
    }
  }
  if (s.family == "classical") {
    if (!s.classical) throw ConfigError("operator.family classical needs a 'classical' section");
    const auto w = as_config("classical", [&] { return classical_weights_from<S>(*s.classical); });
    const std::int64_t lo = s.classical->domain == "unilateral" ? 1 : n_lo - reach - 1;
    return as_config("classical", [&] { return share(build_classical_shift(w, lo, n_hi + reach + 1)); });
  }
  const auto w = as_config("operator", [&] { return weights_from<S>(s); });
  TruncationParams p{n_lo - reach - 1, n_hi + reach + 1, k_hi, j_lo - reach - 1, j_hi + reach + 1};
  if (s.family == "comb") p.j_min = 1, p.j_max = p.k_max;
  return build_branch_op<S>(s, w, p);
}

template <Scalar S>
Report run_oracle(const Scenario& s, const RunOptions& opt) {
  using R = real_t<S>;
  const NormSpec nrm = norm_from(s.norm);
  struct Parsed {
    SeqVector<S> source;
    VertexId target;
    S value;
    const OracleQuery* q;
  };
  std::vector<Parsed> parsed;
  std::vector<VertexId> touched;
  std::int64_t reach = 1;
  for (std::size_t i = 0; i < s.oracle.size(); ++i) {
    const auto& q = s.oracle[i];
    Parsed p{{}, VertexId::line(0), S(0), &q};
    try {
      p.target = VertexId::parse(q.target);
      for (const auto& [v, x] : q.source) p.source.add(VertexId::parse(v), scalar_traits<S>::parse(x));
      p.value = scalar_traits<S>::parse(q.value);
    } catch (const std::exception& e) {
      throw ConfigError("oracle[" + std::to_string(i) + "]: " + e.what());
    }
    touched.push_back(p.target);
    for (const auto& [v, _] : p.source) touched.push_back(v);
    reach = std::max(reach, q.m_max);
    parsed.push_back(std::move(p));
  }
  auto op = oracle_op<S>(s, touched, reach);

  Report rep;
  rep.json = head<S>(s, "oracle");
  rep.json["window"] = to_json(op->params());
  rep.json["norm"] = describe(nrm);
  rep.csv_header = {"query", "m", "min_delta"};
  auto results = parallel_map<Json>(parsed.size(), opt.jobs, [&](std::size_t i) {
    const auto& p = parsed[i];
    Json e = {{"source", to_json(p.source)}, {"target", p.target.str()}, {"value", format_scalar(p.value)}};
    Json rows = Json::array();
    std::optional<R> inf;
    try {
      for (auto m = p.q->m_min; m <= p.q->m_max; ++m) {
        auto v = min_delta_reach(*op, p.source, p.target, p.value, static_cast<std::size_t>(m), nrm);
        rows.push_back({{"m", m}, {"min_delta", detail::opt_real(v)}});
        if (v && (!inf || *v < *inf)) inf = v;
      }
      e["infimum"] = detail::opt_real(inf);
    } catch (const Error& ex) {
      e["error"] = ex.what();
    }
    e["rows"] = rows;
    return e;
  });
  Json entries = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].contains("error")) rep.ok = false;
    for (const auto& r : results[i]["rows"])
      rep.csv_rows.push_back({std::to_string(i), std::to_string(r["m"].template get<std::int64_t>()),
                              r["min_delta"].template get<std::string>()});
    entries.push_back(std::move(results[i]));
  }
  rep.json["entries"] = std::move(entries);
  rep.json["ok"] = rep.ok;
  return rep;
}

/// Applies --mode/--seed overrides and runs `command` in the scenario's scalar mode.
inline Report run_command(const std::string& command, Scenario s, const RunOptions& opt) {
  if (opt.mode) {
    if (*opt.mode != "exact" && *opt.mode != "float") throw ConfigError("--mode must be exact or float");
    s.mode = *opt.mode;
  }
  if (opt.seed) s.seed = *opt.seed;
  auto dispatch = [&](auto tag) {
    using S = decltype(tag);
    if (command == "verify-constructions") return run_verify_constructions<S>(s, opt);
    if (command == "certify") return run_certify<S>(s, opt);
    if (command == "classify") return run_classify<S>(s, opt);
    if (command == "oracle") return run_oracle<S>(s, opt);
    throw ConfigError("unknown command '" + command + "'");
  };
  return s.mode == "exact" ? dispatch(Rational{}) : dispatch(double{});
}

}  // namespace chainrec::cli
