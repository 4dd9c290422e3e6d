#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "chainrec/scalar.hpp"

namespace chainrec::cli {

/// Scenario problems: bad YAML, missing or malformed fields, parameters that
/// violate an operator precondition. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numbers are kept as text until the scalar mode is known, so exact mode
/// sees "0.1" as 1/10.
using Number = std::string;

struct BranchSpec {
  std::int64_t k = 0;
  std::int64_t lo = 0;
  std::vector<Number> values;
  std::optional<Number> above;
  std::optional<Number> below;
};

struct TruncationSpec {
  std::optional<std::int64_t> n_min, n_max, k_max, j_min, j_max;
  bool any() const { return n_min || n_max || k_max || j_min || j_max; }
};

struct NormConfig {
  std::string type = "sup";  // sup | lp
  double p = 2.0;
};

struct SpaceSpec {
  std::string type = "banach";  // banach | scaled | product
  NormConfig norm;
  std::vector<Number> scales;
  std::string exhaustion = "symmetric";  // symmetric | shifted
  std::int64_t sets = 6;
};

struct ClassicalSpec {
  std::string domain = "bilateral";
  std::optional<Number> constant;
  std::int64_t core_lo = 0;
  std::vector<Number> core;
  std::optional<Number> tail_plus;
  std::optional<Number> tail_minus;
  std::optional<std::pair<std::int64_t, std::int64_t>> zero_pattern;  // modulus, residue
  std::vector<SpaceSpec> spaces;
  std::int64_t n0_lo = -5;
  std::int64_t n0_hi = 5;
  std::int64_t oracle_horizon = 60;
};

struct OracleQuery {
  std::vector<std::pair<std::string, Number>> source;
  std::string target;
  Number value = "0";
  std::int64_t m_min = 1;
  std::int64_t m_max = 1;
};

struct Scenario {
  std::string name;
  std::string mode = "exact";
  std::uint64_t seed = 1;
  std::string family = "comb";  // comb | grid | classical
  Number mu1 = "2";
  Number mu2 = "4";
  std::vector<BranchSpec> branches;
  TruncationSpec truncation;
  NormConfig norm;
  std::vector<Number> deltas;
  std::int64_t line_min = 0;
  std::int64_t line_max = 0;
  std::int64_t branch_k_max = 4;
  std::optional<std::int64_t> branch_j_min, branch_j_max;
  std::int64_t oracle_horizon = 40;
  std::int64_t search_trials = 0;
  std::int64_t search_max_length = 25;
  std::optional<ClassicalSpec> classical;
  std::vector<OracleQuery> oracle;
  std::string source_text;
};

namespace detail {

inline std::string where(const YAML::Node& n, const std::string& field) {
  const auto mark = n.Mark();
  std::string s = "field '" + field + "'";
  if (mark.line >= 0) s += " (line " + std::to_string(mark.line + 1) + ")";
  return s;
}

template <class T>
T read(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(n, field) + ": malformed value");
  }
}

inline Number read_number(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(where(n, field) + ": expected a number");
  auto text = n.as<std::string>();
  try {
    parse_rational(text);
  } catch (const std::exception&) {
    throw ConfigError(where(n, field) + ": malformed number '" + text + "'");
  }
  return text;
}

inline std::vector<Number> read_numbers(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(where(n, field) + ": expected a list of numbers");
  std::vector<Number> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(read_number(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline void check_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) throw ConfigError(where(n, section) + ": expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where(kv.first, section.empty() ? key : section + "." + key) + ": unknown key");
  }
}

inline NormConfig read_norm(const YAML::Node& n, const std::string& field) {
  check_keys(n, field, {"type", "p"});
  NormConfig c;
  if (n["type"]) c.type = read<std::string>(n["type"], field + ".type");
  if (c.type != "sup" && c.type != "lp") throw ConfigError(where(n, field + ".type") + ": expected sup or lp");
  if (n["p"]) c.p = read<double>(n["p"], field + ".p");
  if (c.type == "lp" && !(c.p >= 1.0)) throw ConfigError(where(n, field + ".p") + ": p must be >= 1");
  return c;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("scenario is empty");
  check_keys(root, "", {"name", "mode", "seed", "operator", "truncation", "norm", "deltas", "basis", "horizons",
                        "search", "classical", "oracle"});
  Scenario s;
  s.source_text = text;
  if (root["name"]) s.name = read<std::string>(root["name"], "name");
  if (root["mode"]) s.mode = read<std::string>(root["mode"], "mode");
  if (s.mode != "exact" && s.mode != "float") throw ConfigError(where(root["mode"], "mode") + ": expected exact or float");
  if (root["seed"]) s.seed = read<std::uint64_t>(root["seed"], "seed");

  if (auto op = root["operator"]) {
    check_keys(op, "operator", {"family", "mu1", "mu2", "grid_weights"});
    if (op["family"]) s.family = read<std::string>(op["family"], "operator.family");
    if (s.family != "comb" && s.family != "grid" && s.family != "classical")
      throw ConfigError(where(op["family"], "operator.family") + ": expected comb, grid or classical");
    if (op["mu1"]) s.mu1 = read_number(op["mu1"], "operator.mu1");
    if (op["mu2"]) s.mu2 = read_number(op["mu2"], "operator.mu2");
    if (auto gw = op["grid_weights"]) {
      check_keys(gw, "operator.grid_weights", {"branches"});
      auto list = gw["branches"];
      if (list && !list.IsSequence()) throw ConfigError(where(list, "operator.grid_weights.branches") + ": expected a list");
      for (std::size_t i = 0; list && i < list.size(); ++i) {
        const std::string f = "operator.grid_weights.branches[" + std::to_string(i) + "]";
        const auto b = list[i];
        check_keys(b, f, {"k", "lo", "values", "above", "below"});
        if (!b["k"] || !b["lo"] || !b["values"]) throw ConfigError(where(b, f) + ": needs k, lo and values");
        BranchSpec spec;
        spec.k = read<std::int64_t>(b["k"], f + ".k");
        spec.lo = read<std::int64_t>(b["lo"], f + ".lo");
        spec.values = read_numbers(b["values"], f + ".values");
        if (b["above"]) spec.above = read_number(b["above"], f + ".above");
        if (b["below"]) spec.below = read_number(b["below"], f + ".below");
        s.branches.push_back(std::move(spec));
      }
    }
  }
  if (auto t = root["truncation"]) {
    check_keys(t, "truncation", {"n_min", "n_max", "k_max", "j_min", "j_max"});
    auto opt = [&](const char* key, std::optional<std::int64_t>& into) {
      if (t[key]) into = read<std::int64_t>(t[key], std::string("truncation.") + key);
    };
    opt("n_min", s.truncation.n_min);
    opt("n_max", s.truncation.n_max);
    opt("k_max", s.truncation.k_max);
    opt("j_min", s.truncation.j_min);
    opt("j_max", s.truncation.j_max);
  }
  if (root["norm"]) s.norm = read_norm(root["norm"], "norm");
  if (root["deltas"]) {
    s.deltas = read_numbers(root["deltas"], "deltas");
    for (std::size_t i = 0; i < s.deltas.size(); ++i)
      if (!(parse_rational(s.deltas[i]) > 0))
        throw ConfigError(where(root["deltas"][i], "deltas[" + std::to_string(i) + "]") + ": delta must be positive");
  }
  if (auto b = root["basis"]) {
    check_keys(b, "basis", {"line_min", "line_max", "k_max", "j_min", "j_max"});
    if (b["line_min"]) s.line_min = read<std::int64_t>(b["line_min"], "basis.line_min");
    if (b["line_max"]) s.line_max = read<std::int64_t>(b["line_max"], "basis.line_max");
    if (s.line_min > s.line_max) throw ConfigError(where(b, "basis") + ": line_min > line_max");
    if (b["k_max"]) s.branch_k_max = read<std::int64_t>(b["k_max"], "basis.k_max");
    if (s.branch_k_max < 0) throw ConfigError(where(b["k_max"], "basis.k_max") + ": must be >= 0");
    if (b["j_min"]) s.branch_j_min = read<std::int64_t>(b["j_min"], "basis.j_min");
    if (b["j_max"]) s.branch_j_max = read<std::int64_t>(b["j_max"], "basis.j_max");
  }
  if (auto h = root["horizons"]) {
    check_keys(h, "horizons", {"oracle"});
    if (h["oracle"]) s.oracle_horizon = read<std::int64_t>(h["oracle"], "horizons.oracle");
    if (s.oracle_horizon < 1) throw ConfigError(where(h, "horizons.oracle") + ": must be >= 1");
  }
  if (auto sr = root["search"]) {
    check_keys(sr, "search", {"trials", "max_length"});
    if (sr["trials"]) s.search_trials = read<std::int64_t>(sr["trials"], "search.trials");
    if (sr["max_length"]) s.search_max_length = read<std::int64_t>(sr["max_length"], "search.max_length");
    if (s.search_trials < 0 || s.search_max_length < 1) throw ConfigError(where(sr, "search") + ": out of range");
  }
  if (auto c = root["classical"]) {
    check_keys(c, "classical", {"domain", "constant", "core", "tail_plus", "tail_minus", "zero_pattern", "spaces",
                                "n0_window", "oracle_horizon"});
    ClassicalSpec cs;
    if (c["domain"]) cs.domain = read<std::string>(c["domain"], "classical.domain");
    if (cs.domain != "bilateral" && cs.domain != "unilateral")
      throw ConfigError(where(c["domain"], "classical.domain") + ": expected bilateral or unilateral");
    if (c["constant"]) cs.constant = read_number(c["constant"], "classical.constant");
    if (auto core = c["core"]) {
      check_keys(core, "classical.core", {"lo", "values"});
      if (core["lo"]) cs.core_lo = read<std::int64_t>(core["lo"], "classical.core.lo");
      if (core["values"]) cs.core = read_numbers(core["values"], "classical.core.values");
    }
    if (c["tail_plus"]) cs.tail_plus = read_number(c["tail_plus"], "classical.tail_plus");
    if (c["tail_minus"]) cs.tail_minus = read_number(c["tail_minus"], "classical.tail_minus");
    if (cs.constant && (cs.tail_plus || cs.tail_minus || !cs.core.empty()))
      throw ConfigError(where(c, "classical") + ": 'constant' excludes core and tails");
    if (auto zp = c["zero_pattern"]) {
      check_keys(zp, "classical.zero_pattern", {"modulus", "residue"});
      if (!zp["modulus"]) throw ConfigError(where(zp, "classical.zero_pattern") + ": needs modulus");
      auto mod = read<std::int64_t>(zp["modulus"], "classical.zero_pattern.modulus");
      if (mod < 1) throw ConfigError(where(zp, "classical.zero_pattern.modulus") + ": must be >= 1");
      cs.zero_pattern = {mod, zp["residue"] ? read<std::int64_t>(zp["residue"], "classical.zero_pattern.residue") : 0};
    }
    if (auto sp = c["spaces"]) {
      if (!sp.IsSequence()) throw ConfigError(where(sp, "classical.spaces") + ": expected a list");
      for (std::size_t i = 0; i < sp.size(); ++i) {
        const std::string f = "classical.spaces[" + std::to_string(i) + "]";
        check_keys(sp[i], f, {"type", "norm", "scales", "exhaustion", "sets"});
        SpaceSpec space;
        if (sp[i]["type"]) space.type = read<std::string>(sp[i]["type"], f + ".type");
        if (space.type != "banach" && space.type != "scaled" && space.type != "product")
          throw ConfigError(where(sp[i], f + ".type") + ": expected banach, scaled or product");
        if (sp[i]["norm"]) space.norm = read_norm(sp[i]["norm"], f + ".norm");
        if (sp[i]["scales"]) space.scales = read_numbers(sp[i]["scales"], f + ".scales");
        if (sp[i]["exhaustion"]) space.exhaustion = read<std::string>(sp[i]["exhaustion"], f + ".exhaustion");
        if (space.exhaustion != "symmetric" && space.exhaustion != "shifted")
          throw ConfigError(where(sp[i], f + ".exhaustion") + ": expected symmetric or shifted");
        if (sp[i]["sets"]) space.sets = read<std::int64_t>(sp[i]["sets"], f + ".sets");
        if (space.type == "scaled" && space.scales.empty()) throw ConfigError(where(sp[i], f) + ": scaled needs scales");
        if (space.sets < 1) throw ConfigError(where(sp[i], f + ".sets") + ": must be >= 1");
        cs.spaces.push_back(std::move(space));
      }
    }
    if (cs.spaces.empty()) cs.spaces.push_back({});
    if (auto w = c["n0_window"]) {
      if (!w.IsSequence() || w.size() != 2) throw ConfigError(where(w, "classical.n0_window") + ": expected [lo, hi]");
      cs.n0_lo = read<std::int64_t>(w[0], "classical.n0_window[0]");
      cs.n0_hi = read<std::int64_t>(w[1], "classical.n0_window[1]");
      if (cs.n0_lo > cs.n0_hi) throw ConfigError(where(w, "classical.n0_window") + ": lo > hi");
    }
    if (c["oracle_horizon"]) cs.oracle_horizon = read<std::int64_t>(c["oracle_horizon"], "classical.oracle_horizon");
    if (cs.oracle_horizon < 0) throw ConfigError(where(c, "classical.oracle_horizon") + ": must be >= 0");
    s.classical = std::move(cs);
  }
  if (auto o = root["oracle"]) {
    if (!o.IsSequence()) throw ConfigError(where(o, "oracle") + ": expected a list of queries");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string f = "oracle[" + std::to_string(i) + "]";
      check_keys(o[i], f, {"source", "target", "value", "lengths"});
      OracleQuery q;
      if (auto src = o[i]["source"]) {
        if (!src.IsMap()) throw ConfigError(where(src, f + ".source") + ": expected a mapping vertex -> coefficient");
        for (const auto& kv : src) {
          const auto key = kv.first.as<std::string>();
          q.source.push_back({key, read_number(kv.second, f + ".source." + key)});
        }
      }
      if (!o[i]["target"]) throw ConfigError(where(o[i], f) + ": needs target");
      q.target = read<std::string>(o[i]["target"], f + ".target");
      if (o[i]["value"]) q.value = read_number(o[i]["value"], f + ".value");
      if (auto len = o[i]["lengths"]) {
        if (!len.IsSequence() || len.size() != 2) throw ConfigError(where(len, f + ".lengths") + ": expected [min, max]");
        q.m_min = read<std::int64_t>(len[0], f + ".lengths[0]");
        q.m_max = read<std::int64_t>(len[1], f + ".lengths[1]");
        if (q.m_min < 1 || q.m_min > q.m_max) throw ConfigError(where(len, f + ".lengths") + ": need 1 <= min <= max");
      }
      s.oracle.push_back(std::move(q));
    }
  }
  return s;
}

/// FNV-1a 64 over the scenario text, mode and seed.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::string& text) {
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(s.source_text);
  mix("\n" + s.mode + "\n" + std::to_string(s.seed));
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

}  // namespace chainrec::cli
