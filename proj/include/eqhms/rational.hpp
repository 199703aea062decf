#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace eqhms {

using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
// Accepts "p", "p/q", "-p/q".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);
Rational floor_div(const Rational& q);

// Exact Gaussian rational re + i*im.
struct ComplexRational {
  Rational re;
  Rational im;

  ComplexRational() : re(0), im(0) {}
  ComplexRational(long v) : re(v), im(0) {}  // NOLINT(google-explicit-constructor)
  ComplexRational(Rational r) : re(std::move(r)), im(0) {}  // NOLINT
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static ComplexRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  ComplexRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  ComplexRational inverse() const;
  double abs() const;
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  ComplexRational& operator+=(const ComplexRational& o);
  ComplexRational& operator-=(const ComplexRational& o);
  ComplexRational& operator*=(const ComplexRational& o);
  ComplexRational& operator/=(const ComplexRational& o);
};

ComplexRational operator+(ComplexRational a, const ComplexRational& b);
ComplexRational operator-(ComplexRational a, const ComplexRational& b);
ComplexRational operator*(ComplexRational a, const ComplexRational& b);
ComplexRational operator/(ComplexRational a, const ComplexRational& b);
ComplexRational operator-(const ComplexRational& a);
bool operator==(const ComplexRational& a, const ComplexRational& b);
inline bool operator!=(const ComplexRational& a, const ComplexRational& b) { return !(a == b); }
std::ostream& operator<<(std::ostream& os, const ComplexRational& z);
std::string to_string(const ComplexRational& z);

}  // namespace eqhms
