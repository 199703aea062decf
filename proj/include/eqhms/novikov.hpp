#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "eqhms/linalg.hpp"
#include "eqhms/rational.hpp"

namespace eqhms::novikov {

using Coefficient = std::complex<double>;

// Precision cutoff E: the element is known modulo T^E.  nullopt means exact.
using Precision = std::optional<Rational>;

double zero_tolerance();
void set_zero_tolerance(double tol);

Precision min_precision(const Precision& a, const Precision& b);
Precision shift_precision(const Precision& p, const Rational& by);
std::string to_string(const Precision& p);

struct Term {
  Rational exponent;
  Coefficient coefficient;
};

// sum_i c_i T^{lambda_i} with lambda_i strictly increasing, |c_i| above the
// zero tolerance and every lambda_i below the precision cutoff.
class NovikovScalar {
 public:
  NovikovScalar() = default;

  static NovikovScalar zero(Precision precision = std::nullopt);
  static NovikovScalar constant(Coefficient c, Precision precision = std::nullopt);
  static NovikovScalar monomial(Coefficient c, const Rational& exponent, Precision precision = std::nullopt);
  static NovikovScalar from_terms(std::vector<Term> terms, Precision precision);

  const std::vector<Term>& terms() const { return terms_; }
  const Precision& precision() const { return precision_; }
  bool is_exact() const { return !precision_.has_value(); }
  // Zero to the known precision.
  bool is_zero() const { return terms_.empty(); }
  // nullopt for zero (valuation +infinity, or at least the precision).
  std::optional<Rational> valuation() const;
  Coefficient leading_coefficient() const;
  Coefficient coefficient(const Rational& exponent) const;
  double max_abs_coefficient() const;

  NovikovScalar with_precision(Precision precision) const;
  NovikovScalar truncated(const Rational& cutoff) const { return with_precision(min_precision(precision_, cutoff)); }
  // Multiply by T^by.
  NovikovScalar shifted(const Rational& by) const;
  NovikovScalar conj() const;

  NovikovScalar& operator+=(const NovikovScalar& o);
  NovikovScalar& operator-=(const NovikovScalar& o);
  NovikovScalar& operator*=(const NovikovScalar& o);
  NovikovScalar& operator*=(Coefficient c);

  std::string to_string() const;

 private:
  void normalize();

  std::vector<Term> terms_;
  Precision precision_;
};

// Drops terms with exponent >= cutoff; the cutoff may not exceed the precision.
NovikovScalar truncate(const NovikovScalar& a, const Rational& cutoff);

NovikovScalar operator+(NovikovScalar a, const NovikovScalar& b);
NovikovScalar operator-(NovikovScalar a, const NovikovScalar& b);
NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b);
NovikovScalar operator*(Coefficient c, NovikovScalar a);
NovikovScalar operator-(const NovikovScalar& a);
// Exact equality of terms and precision.
bool operator==(const NovikovScalar& a, const NovikovScalar& b);

// |coefficients of a - b| below tol, up to the common precision.
bool approx_equal(const NovikovScalar& a, const NovikovScalar& b, double tol = 1e-8);
// Same check restricted to exponents < cutoff.
bool approx_equal_below(const NovikovScalar& a, const NovikovScalar& b, const Rational& cutoff, double tol = 1e-8);

// Series operations need a precision cap when the input is exact and the
// result is an infinite series.
NovikovScalar inverse(const NovikovScalar& a, Precision cap = std::nullopt);
NovikovScalar exp_plus(const NovikovScalar& a, Precision cap = std::nullopt);
NovikovScalar log_one_plus(const NovikovScalar& a, Precision cap = std::nullopt);
NovikovScalar pow(const NovikovScalar& a, long n, Precision cap = std::nullopt);

// Shorthand grammar: sums of terms like "T", "2T^{1/2}", "-iT^2", "1", "(1+2i)T^3/2",
// "0.5T^{1/3}".  The resulting scalar carries the given precision.
NovikovScalar parse(const std::string& text, Precision precision);

// Polynomial sum_k a_k X^k with Novikov coefficients.
class NovikovPolynomial {
 public:
  NovikovPolynomial() = default;
  explicit NovikovPolynomial(std::vector<NovikovScalar> coefficients);

  const std::vector<NovikovScalar>& coefficients() const { return coeffs_; }
  int degree() const;  // -1 for the zero polynomial
  NovikovScalar operator()(const NovikovScalar& x) const;
  NovikovPolynomial derivative() const;

 private:
  std::vector<NovikovScalar> coeffs_;
};

struct NewtonSegment {
  int start = 0;  // degree of the left endpoint
  int end = 0;    // degree of the right endpoint
  Rational root_valuation;  // valuation of the roots on this segment (negated slope)
  // Coefficients of z^0..z^(end-start) of the leading equation.
  std::vector<Coefficient> leading_equation;
  int multiplicity() const { return end - start; }
};

std::vector<NewtonSegment> newton_polygon(const NovikovPolynomial& p);

struct LeadingRoot {
  Coefficient value;
  int multiplicity = 1;
};

// Roots of sum_k c_k z^k, merged when closer than 1e-6.
std::vector<LeadingRoot> solve_leading_equation(const std::vector<Coefficient>& coefficients);

struct RootSeed {
  Rational valuation;
  Coefficient leading;
  int multiplicity = 1;
};

// Every (valuation, leading coefficient) pair allowed by the Newton polygon.
std::vector<RootSeed> root_seeds(const NovikovPolynomial& p);

// Newton iteration from the seed c T^s.  The result satisfies p(X) = 0 up to
// its precision, which is at most target.
NovikovScalar newton_root(const NovikovPolynomial& p, const Rational& valuation, Coefficient leading,
                          const Rational& target);

}  // namespace eqhms::novikov

namespace eqhms {

template <>
struct FieldTraits<novikov::NovikovScalar> {
  static novikov::NovikovScalar zero() { return {}; }
  static novikov::NovikovScalar one() { return novikov::NovikovScalar::constant(1.0); }
  static bool is_zero(const novikov::NovikovScalar& a) { return a.is_zero(); }
  static novikov::NovikovScalar inverse(const novikov::NovikovScalar& a) { return novikov::inverse(a); }
  static bool prefer(const novikov::NovikovScalar& a, const novikov::NovikovScalar& b) {
    return *a.valuation() < *b.valuation();
  }
};

}  // namespace eqhms
