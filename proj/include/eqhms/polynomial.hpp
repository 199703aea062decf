#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqhms/error.hpp"
#include "eqhms/linalg.hpp"
#include "eqhms/novikov.hpp"
#include "eqhms/rational.hpp"

namespace eqhms {

// Conversions the polynomial code needs beyond FieldTraits.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<ComplexRational> {
  static ComplexRational from_rational(const Rational& q) { return ComplexRational(q); }
  static double magnitude(const ComplexRational& a) { return a.abs(); }
  static std::string str(const ComplexRational& a) { return to_string(a); }
};

template <>
struct ScalarOps<novikov::NovikovScalar> {
  static novikov::NovikovScalar from_rational(const Rational& q) { return novikov::NovikovScalar::constant(to_double(q)); }
  static double magnitude(const novikov::NovikovScalar& a) { return a.max_abs_coefficient(); }
  static std::string str(const novikov::NovikovScalar& a) { return a.to_string(); }
};

// Laurent polynomial in nvars variables; exponents may be negative.
template <class S>
class Polynomial {
 public:
  using Exponent = std::vector<int>;
  using F = FieldTraits<S>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const S& c) {
    Polynomial p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }
  static Polynomial variable(int nvars, int i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(e, F::one());
  }
  static Polynomial monomial(const Exponent& e, const S& c) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }

  int nvars() const { return nvars_; }
  const std::map<Exponent, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const S& c) {
    if (static_cast<int>(e.size()) != nvars_) throw InputError("monomial has the wrong number of variables");
    if (F::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (F::is_zero(it->second)) terms_.erase(it);
    }
  }

  S coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? F::zero() : it->second;
  }

  bool is_polynomial() const {
    for (const auto& [e, c] : terms_)
      for (int x : e)
        if (x < 0) return false;
    return true;
  }

  // Total degree; -1 for zero.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total(e));
    return d;
  }
  // Lowest total degree among the terms; -1 for zero.
  int order() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
      if (d < 0 || total(e) < d) d = total(e);
    return d;
  }

  Polynomial derivative(int i) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(i) == 0) continue;
      Exponent ne = e;
      ne[i] -= 1;
      p.add_term(ne, ScalarOps<S>::from_rational(Rational(e[i])) * c);
    }
    return p;
  }

  // Keeps terms of total degree <= order.
  Polynomial truncated(int order) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_)
      if (total(e) <= order) p.terms_.emplace(e, c);
    return p;
  }

  // Substitutes x = point + z; requires nonnegative exponents.
  Polynomial translated(const std::vector<S>& point) const {
    if (static_cast<int>(point.size()) != nvars_) throw InputError("point has the wrong number of coordinates");
    if (!is_polynomial()) throw InputError("cannot expand a Laurent polynomial around a point");
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      Polynomial prod = constant(nvars_, c);
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        Polynomial lin = variable(nvars_, i) + constant(nvars_, point[i]);
        Polynomial pw = constant(nvars_, F::one());
        for (int k = 0; k < e[i]; ++k) pw = pw * lin;
        prod = prod * pw;
      }
      out += prod;
    }
    return out;
  }

  S evaluate(const std::vector<S>& point) const {
    if (static_cast<int>(point.size()) != nvars_) throw InputError("point has the wrong number of coordinates");
    S total_value = F::zero();
    for (const auto& [e, c] : terms_) {
      S t = c;
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] < 0) {
          if (F::is_zero(point[i])) throw InputError("Laurent polynomial evaluated at a pole");
          S inv = F::inverse(point[i]);
          for (int k = 0; k < -e[i]; ++k) t = t * inv;
        }
        for (int k = 0; k < e[i]; ++k) t = t * point[i];
      }
      total_value += t;
    }
    return total_value;
  }

  // Multiplies by x^shift.
  Polynomial shifted(const Exponent& shift) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponent ne = e;
      for (int i = 0; i < nvars_; ++i) ne[i] += shift.at(i);
      p.terms_.emplace(ne, c);
    }
    return p;
  }

  // Componentwise minimum exponent over the terms.
  Exponent min_exponent() const {
    Exponent m(nvars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      for (int i = 0; i < nvars_; ++i) m[i] = first ? e[i] : std::min(m[i], e[i]);
      first = false;
    }
    return m;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial p(a.nvars_);
    for (const auto& [e, c] : a.terms_) p.terms_.emplace(e, -c);
    return p;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same(b);
    Polynomial p(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e = ea;
        for (int i = 0; i < a.nvars_; ++i) e[i] += eb[i];
        p.add_term(e, ca * cb);
      }
    return p;
  }
  friend Polynomial operator*(const S& s, const Polynomial& a) {
    Polynomial p(a.nvars_);
    for (const auto& [e, c] : a.terms_) p.add_term(e, s * c);
    return p;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
    auto it = b.terms_.begin();
    for (const auto& [e, c] : a.terms_) {
      if (e != it->first || !(c == it->second)) return false;
      ++it;
    }
    return true;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, ScalarOps<S>::magnitude(c));
    return m;
  }

  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << ScalarOps<S>::str(c) << ")";
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        os << "*" << (i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i + 1));
        if (e[i] != 1) os << "^" << e[i];
      }
    }
    return os.str();
  }

  static int total(const Exponent& e) {
    int s = 0;
    for (int x : e) s += x;
    return s;
  }

 private:
  void check_same(const Polynomial& o) const {
    if (nvars_ != o.nvars_) throw InputError("polynomials in different numbers of variables");
  }

  int nvars_ = 0;
  std::map<Exponent, S> terms_;
};

using CPolynomial = Polynomial<ComplexRational>;
using NPolynomial = Polynomial<novikov::NovikovScalar>;

// Monomials x^e with e >= 0 and |e| <= order, ordered by degree then lexicographically.
std::vector<std::vector<int>> monomials_up_to(int nvars, int order);

// Parses sums of monomials such as "x^2 + 3/2*x*y - i*y^-1" over the given
// variable names.  Coefficients are exact complex rationals.
CPolynomial parse_polynomial(const std::string& text, const std::vector<std::string>& vars);

}  // namespace eqhms
