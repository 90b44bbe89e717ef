#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <gmpxx.h>

namespace lagfib {

using Rational = mpq_class;
using Complex  = std::complex<double>;

/// Complex number with exact rational real and imaginary parts.
///
/// This is the coefficient field of the exact mode: equality is decidable,
/// so degeneracy and classification verdicts never depend on a tolerance.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long r) : re(r) {}
  GaussianRational(int r) : re(r) {}
  GaussianRational(long r, long i) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational conj() const { return {re, Rational(-im)}; }
  /// |z|^2 as an exact rational.
  Rational norm2() const { return Rational(re * re + im * im); }

  GaussianRational operator-() const { return {Rational(-re), Rational(-im)}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r(re * o.re - im * o.im);
    Rational i(re * o.im + im * o.re);
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    Rational n = o.norm2();
    if (n == 0) throw std::domain_error("GaussianRational: division by zero");
    Rational r((re * o.re + im * o.im) / n);
    Rational i((im * o.re - re * o.im) / n);
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline Complex to_complex(const GaussianRational& x) { return {x.re.get_d(), x.im.get_d()}; }
inline Complex to_complex(const Complex& x) { return x; }
inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Parses "p/q" or "p" (optionally signed). Throws std::invalid_argument on
/// malformed input or zero denominator.
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t slash = s.find('/');
  auto digits_ok = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t start = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (start == t.size()) return false;
    for (std::size_t i = start; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  if (slash == std::string::npos) {
    if (!digits_ok(s)) throw std::invalid_argument("bad rational literal: " + s);
  } else {
    if (!digits_ok(s.substr(0, slash)) || !digits_ok(s.substr(slash + 1)))
      throw std::invalid_argument("bad rational literal: " + s);
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

template <class K>
struct scalar_traits;

template <>
struct scalar_traits<GaussianRational> {
  static constexpr bool is_exact = true;
  using real_type = Rational;
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return {1}; }
  static GaussianRational i() { return {Rational(0), Rational(1)}; }
  static GaussianRational from_int(long n) { return {n}; }
  static GaussianRational from_parts(real_type r, real_type s) { return {std::move(r), std::move(s)}; }
  static bool is_zero(const GaussianRational& x) { return x.is_zero(); }
  static real_type real(const GaussianRational& x) { return x.re; }
  static real_type imag(const GaussianRational& x) { return x.im; }
  static GaussianRational conj(const GaussianRational& x) { return x.conj(); }
  static double abs_approx(const GaussianRational& x) { return std::abs(to_complex(x)); }
};

template <>
struct scalar_traits<Complex> {
  static constexpr bool is_exact = false;
  using real_type = double;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex i() { return {0.0, 1.0}; }
  static Complex from_int(long n) { return {static_cast<double>(n), 0.0}; }
  static Complex from_parts(double r, double s) { return {r, s}; }
  static bool is_zero(const Complex& x) { return x.real() == 0.0 && x.imag() == 0.0; }
  static double real(const Complex& x) { return x.real(); }
  static double imag(const Complex& x) { return x.imag(); }
  static Complex conj(const Complex& x) { return std::conj(x); }
  static double abs_approx(const Complex& x) { return std::abs(x); }
};

struct RationalApprox {
  long long num = 0;
  long long den = 1;
  double err = 0.0;
};

/// Best rational approximation p/q to x with 1 <= q <= max_den, by the
/// continued-fraction convergent/semiconvergent construction.
inline RationalApprox nearest_rational(double x, long long max_den) {
  if (max_den < 1) throw std::invalid_argument("nearest_rational: max_den < 1");
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(v);
    if (fa > 9.2e18 || fa < -9.2e18) break;
    long long a = static_cast<long long>(fa);
    long long p2 = a * p1 + p0;
    long long q2 = a * q1 + q0;
    if (q2 > max_den) {
      // largest semiconvergent with denominator within bound
      long long t = (q1 > 0) ? (max_den - q0) / q1 : 0;
      long long ps = t * p1 + p0, qs = t * q1 + q0;
      RationalApprox best{p1, q1, std::abs(x - double(p1) / double(q1))};
      if (qs >= 1) {
        double es = std::abs(x - double(ps) / double(qs));
        if (es < best.err || best.den < 1) best = {ps, qs, es};
      }
      if (best.den < 1) best = {ps, qs, std::abs(x - double(ps) / double(qs))};
      return best;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = v - fa;
    if (rem < 1e-15) break;
    v = 1.0 / rem;
  }
  return {p1, q1 == 0 ? 1 : q1, std::abs(x - double(p1) / double(q1 == 0 ? 1 : q1))};
}

}  // namespace lagfib
