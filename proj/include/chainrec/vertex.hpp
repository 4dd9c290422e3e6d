#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainrec {

/// A vertex of a line, comb or grid vertex set.
///
/// `Line(n)` is the integer n. `Branch(k, j)` is the vertex written (-k, j):
/// the j-th point of the branch attached at the line vertex -k.
struct VertexId {
  enum class Kind : std::uint8_t { Line = 0, Branch = 1 };

  Kind kind = Kind::Line;
  std::int64_t a = 0;  // n for Line, k for Branch
  std::int64_t b = 0;  // j for Branch

  static constexpr VertexId line(std::int64_t n) { return {Kind::Line, n, 0}; }
  static constexpr VertexId branch(std::int64_t k, std::int64_t j) { return {Kind::Branch, k, j}; }

  constexpr bool is_line() const { return kind == Kind::Line; }
  constexpr bool is_branch() const { return kind == Kind::Branch; }
  constexpr std::int64_t n() const { return a; }
  constexpr std::int64_t k() const { return a; }
  constexpr std::int64_t j() const { return b; }

  constexpr auto operator<=>(const VertexId&) const = default;

  /// "5", "-3" for line vertices; "(-3,2)" for Branch(3, 2).
  std::string str() const {
    if (is_line()) return std::to_string(a);
    return "(-" + std::to_string(a) + "," + std::to_string(b) + ")";
  }

  static VertexId parse(std::string_view text);
};

inline VertexId VertexId::parse(std::string_view text) {
  auto fail = [&]() -> VertexId { throw std::invalid_argument("malformed vertex: '" + std::string(text) + "'"); };
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto to_int = [&](std::string_view s) -> std::int64_t {
    s = trim(s);
    if (s.empty()) fail();
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(std::string(s), &pos);
    } catch (const std::exception&) {
      fail();
    }
    if (pos != s.size()) fail();
    return v;
  };
  std::string_view s = trim(text);
  if (s.empty()) fail();
  if (s.front() != '(') return line(to_int(s));
  if (s.back() != ')') fail();
  s = s.substr(1, s.size() - 2);
  auto comma = s.find(',');
  if (comma == std::string_view::npos) fail();
  std::int64_t minus_k = to_int(s.substr(0, comma));
  std::int64_t j = to_int(s.substr(comma + 1));
  if (minus_k >= 0) fail();
  return branch(-minus_k, j);
}

}  // namespace chainrec

template <>
struct std::hash<chainrec::VertexId> {
  std::size_t operator()(const chainrec::VertexId& v) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(v.a);
    h ^= std::hash<std::int64_t>{}(v.b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ static_cast<std::size_t>(v.kind);
  }
};
