#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "chainrec/error.hpp"

namespace chainrec {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-2/7", "0.125", "1e-3" or "2.5E+2" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational { throw InvalidArgument("malformed number: '" + std::string(text) + "'"); };
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s.empty()) fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  BigInt mantissa = 0;
  std::int64_t exponent = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (after_point) --exponent;
      any_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') fail();
    std::string exp_text = s.substr(i + 1);
    if (exp_text.empty()) fail();
    std::size_t used = 0;
    long long e = 0;
    try {
      e = std::stoll(exp_text, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != exp_text.size() || e > 4096 || e < -4096) fail();
    exponent += e;
  }
  Rational value(mantissa);
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0)
    value /= Rational(ten_pow);
  else
    value *= Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

template <class S>
struct scalar_traits;

/// Exact rational arithmetic; equality is exact and nothing is ever rounded.
template <>
struct scalar_traits<Rational> {
  using real_type = Rational;
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";
  static constexpr double epsilon = 0.0;

  static real_type abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational from_real(const real_type& r) { return r; }
  static real_type real_from_double(double d) { return Rational(d); }
  static Rational parse(std::string_view s) { return parse_rational(s); }
  static std::string to_string(const Rational& x) { return x.str(); }
  static std::string real_to_string(const real_type& x) { return x.str(); }
};

template <>
struct scalar_traits<double> {
  using real_type = double;
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";
  static constexpr double epsilon = std::numeric_limits<double>::epsilon();

  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double from_real(double r) { return r; }
  static double real_from_double(double d) { return d; }
  static double parse(std::string_view s) { return parse_rational(s).convert_to<double>(); }
  static std::string to_string(double x) { return real_to_string(x); }
  static std::string real_to_string(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
  }
};

/// Complex scalars are pairs of doubles; only magnitudes enter the dynamics.
template <>
struct scalar_traits<std::complex<double>> {
  using real_type = double;
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "complex";
  static constexpr double epsilon = std::numeric_limits<double>::epsilon();

  static double abs(const std::complex<double>& x) { return std::abs(x); }
  static double to_double(double x) { return x; }
  static std::complex<double> from_real(double r) { return {r, 0.0}; }
  static double real_from_double(double d) { return d; }
  /// Accepts "re" or "re,im" (each part in any parse_rational syntax).
  static std::complex<double> parse(std::string_view s) {
    auto comma = s.find(',');
    if (comma == std::string_view::npos) return {parse_rational(s).convert_to<double>(), 0.0};
    return {parse_rational(s.substr(0, comma)).convert_to<double>(),
            parse_rational(s.substr(comma + 1)).convert_to<double>()};
  }
  static std::string to_string(const std::complex<double>& x) {
    return scalar_traits<double>::real_to_string(x.real()) + "," + scalar_traits<double>::real_to_string(x.imag());
  }
  static std::string real_to_string(double x) { return scalar_traits<double>::real_to_string(x); }
};

template <class S>
concept Scalar = requires(const S& a, const S& b) {
  typename scalar_traits<S>::real_type;
  { a + b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  { a == b } -> std::convertible_to<bool>;
};

template <Scalar S>
using real_t = typename scalar_traits<S>::real_type;

template <Scalar S>
inline constexpr bool is_exact_v = scalar_traits<S>::exact;

template <Scalar S>
real_t<S> magnitude(const S& x) {
  return scalar_traits<S>::abs(x);
}

template <Scalar S>
bool is_zero(const S& x) {
  return x == S(0);
}

template <Scalar S>
std::string format_scalar(const S& x) {
  return scalar_traits<S>::to_string(x);
}

template <class R>
std::string format_real(const R& x) {
  if constexpr (std::is_same_v<R, Rational>)
    return x.str();
  else
    return scalar_traits<double>::real_to_string(static_cast<double>(x));
}

template <class R>
double real_to_double(const R& x) {
  if constexpr (std::is_same_v<R, Rational>)
    return x.template convert_to<double>();
  else
    return static_cast<double>(x);
}

/// x^n by repeated squaring; n may be negative for invertible x.
template <class T>
T ipow(T base, std::int64_t n) {
  if (n < 0) return T(1) / ipow(base, -n);
  T result(1);
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

/// Lower estimate of a non-negative floating value carrying `ops` rounding steps.
inline double round_down(double x, int ops) {
  double shrink = 1.0 - (ops + 2) * std::numeric_limits<double>::epsilon();
  return std::nextafter(x * shrink, 0.0);
}

template <class R>
R rigorous_lower(const R& x, int ops) {
  if constexpr (std::is_same_v<R, Rational>)
    return x;
  else
    return round_down(x, ops);
}

}  // namespace chainrec
