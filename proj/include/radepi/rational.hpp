#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radepi {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double to_double(const Rational& r) { return static_cast<double>(r); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw ParseError("non-finite value cannot become a rational");
  return Rational(v);
}

/// Accepts "p/q", integers ("-3"), and plain decimals ("1.5", "-0.25").
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw ParseError("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0) return Rational(BigInt(text.substr(0, dot)));
    BigInt den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(BigInt(digits), den);
  } catch (const std::exception&) {
    throw ParseError("cannot parse rational literal '" + text + "'");
  }
}

inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// sqrt of a nonnegative rational when it is again rational.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  BigInt num = numerator(r), den = denominator(r);
  BigInt sn = boost::multiprecision::sqrt(num);
  BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

/// A numeric value that stays exact as long as the computation allows.
struct Scalar {
  std::optional<Rational> exact;
  double approx = 0.0;

  Scalar() = default;
  static Scalar of(Rational r) {
    Scalar s;
    s.approx = to_double(r);
    s.exact = std::move(r);
    return s;
  }
  static Scalar of(double v) {
    Scalar s;
    s.approx = v;
    return s;
  }
  bool is_exact() const { return exact.has_value(); }
};

inline Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::of(Rational(*a.exact + *b.exact));
  return Scalar::of(a.approx + b.approx);
}
inline Scalar operator-(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::of(Rational(*a.exact - *b.exact));
  return Scalar::of(a.approx - b.approx);
}
inline Scalar operator-(const Scalar& a) {
  if (a.exact) return Scalar::of(Rational(-*a.exact));
  return Scalar::of(-a.approx);
}
inline Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::of(Rational(*a.exact * *b.exact));
  return Scalar::of(a.approx * b.approx);
}
inline Scalar operator/(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact && *b.exact != 0) return Scalar::of(Rational(*a.exact / *b.exact));
  return Scalar::of(a.approx / b.approx);
}

/// Order used everywhere a best value is selected: exact comparison when both
/// sides are exact, double comparison otherwise.
inline bool scalar_less(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  return a.approx < b.approx;
}
inline Scalar scalar_min(const Scalar& a, const Scalar& b) { return scalar_less(b, a) ? b : a; }
inline Scalar scalar_max(const Scalar& a, const Scalar& b) { return scalar_less(a, b) ? b : a; }
inline Scalar scalar_abs(const Scalar& a) {
  if (a.exact) return Scalar::of(Rational(*a.exact < 0 ? -*a.exact : *a.exact));
  return Scalar::of(std::fabs(a.approx));
}

/// -1 / 0 / +1 with a small double tolerance on the inexact path.
inline int scalar_sign(const Scalar& a, double tol = 1e-12) {
  if (a.exact) return *a.exact < 0 ? -1 : (*a.exact > 0 ? 1 : 0);
  if (a.approx < -tol) return -1;
  if (a.approx > tol) return 1;
  return 0;
}

using RationalVector = std::vector<Rational>;

inline std::vector<double> to_double_vector(std::span<const Rational> v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational max_norm(std::span<const Rational> v) {
  Rational m = 0;
  for (const auto& c : v) {
    Rational a = c < 0 ? Rational(-c) : c;
    if (a > m) m = a;
  }
  return m;
}

inline bool is_zero_vector(std::span<const Rational> v) {
  for (const auto& c : v)
    if (c != 0) return false;
  return true;
}

}  // namespace radepi
