#include "eqhms/novikov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "eqhms/error.hpp"

namespace eqhms::novikov {

namespace {

std::atomic<double> g_zero_tolerance{1e-9};

std::string format_coefficient(Coefficient c) {
  char buf[96];
  if (c.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", c.real());
  } else if (c.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12gi", c.imag());
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", c.real(), c.imag());
  }
  return buf;
}

}  // namespace

double zero_tolerance() { return g_zero_tolerance.load(); }

void set_zero_tolerance(double tol) {
  if (!(tol >= 0.0)) throw InputError("zero tolerance must be nonnegative");
  g_zero_tolerance.store(tol);
}

Precision min_precision(const Precision& a, const Precision& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? a : b;
}

Precision shift_precision(const Precision& p, const Rational& by) {
  if (!p) return p;
  return Rational(*p + by);
}

std::string to_string(const Precision& p) { return p ? eqhms::to_string(*p) : "inf"; }

NovikovScalar NovikovScalar::zero(Precision precision) {
  NovikovScalar z;
  z.precision_ = std::move(precision);
  return z;
}

NovikovScalar NovikovScalar::constant(Coefficient c, Precision precision) {
  return monomial(c, Rational(0), std::move(precision));
}

NovikovScalar NovikovScalar::monomial(Coefficient c, const Rational& exponent, Precision precision) {
  NovikovScalar m;
  m.terms_.push_back({exponent, c});
  m.precision_ = std::move(precision);
  m.normalize();
  return m;
}

NovikovScalar NovikovScalar::from_terms(std::vector<Term> terms, Precision precision) {
  NovikovScalar m;
  m.terms_ = std::move(terms);
  m.precision_ = std::move(precision);
  m.normalize();
  return m;
}

void NovikovScalar::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (precision_ && t.exponent >= *precision_) break;
    if (!out.empty() && out.back().exponent == t.exponent)
      out.back().coefficient += t.coefficient;
    else
      out.push_back(std::move(t));
  }
  const double tol = zero_tolerance();
  out.erase(std::remove_if(out.begin(), out.end(), [tol](const Term& t) { return std::abs(t.coefficient) <= tol; }),
            out.end());
  terms_ = std::move(out);
}

std::optional<Rational> NovikovScalar::valuation() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front().exponent;
}

Coefficient NovikovScalar::leading_coefficient() const {
  return terms_.empty() ? Coefficient(0.0) : terms_.front().coefficient;
}

Coefficient NovikovScalar::coefficient(const Rational& exponent) const {
  for (const auto& t : terms_)
    if (t.exponent == exponent) return t.coefficient;
  return 0.0;
}

double NovikovScalar::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coefficient));
  return m;
}

NovikovScalar NovikovScalar::with_precision(Precision precision) const {
  NovikovScalar out = *this;
  out.precision_ = std::move(precision);
  out.normalize();
  return out;
}

NovikovScalar NovikovScalar::shifted(const Rational& by) const {
  NovikovScalar out = *this;
  for (auto& t : out.terms_) t.exponent += by;
  out.precision_ = shift_precision(precision_, by);
  return out;
}

NovikovScalar NovikovScalar::conj() const {
  NovikovScalar out = *this;
  for (auto& t : out.terms_) t.coefficient = std::conj(t.coefficient);
  return out;
}

NovikovScalar& NovikovScalar::operator+=(const NovikovScalar& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  precision_ = min_precision(precision_, o.precision_);
  normalize();
  return *this;
}

NovikovScalar& NovikovScalar::operator-=(const NovikovScalar& o) { return *this += -o; }

NovikovScalar& NovikovScalar::operator*=(const NovikovScalar& o) {
  // Precision of a product: min(E_a + val b, E_b + val a, E_a + E_b).
  Precision p;
  auto va = valuation();
  auto vb = o.valuation();
  if (precision_) {
    if (vb) p = min_precision(p, Rational(*precision_ + *vb));
    if (o.precision_) p = min_precision(p, Rational(*precision_ + *o.precision_));
  }
  if (o.precision_ && va) p = min_precision(p, Rational(*o.precision_ + *va));
  std::map<Rational, Coefficient> acc;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      Rational e = a.exponent + b.exponent;
      if (p && e >= *p) continue;
      acc[e] += a.coefficient * b.coefficient;
    }
  terms_.clear();
  for (auto& [e, c] : acc) terms_.push_back({e, c});
  precision_ = std::move(p);
  normalize();
  return *this;
}

NovikovScalar& NovikovScalar::operator*=(Coefficient c) {
  for (auto& t : terms_) t.coefficient *= c;
  normalize();
  return *this;
}

std::string NovikovScalar::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << format_coefficient(t.coefficient);
    if (sgn(t.exponent) != 0) os << "*T^" << (t.exponent.get_den() == 1 ? "" : "{") << eqhms::to_string(t.exponent)
                                 << (t.exponent.get_den() == 1 ? "" : "}");
  }
  if (precision_) {
    if (!first) os << " + ";
    first = false;
    os << "O(T^" << eqhms::to_string(*precision_) << ")";
  }
  if (first) os << "0";
  return os.str();
}

NovikovScalar truncate(const NovikovScalar& a, const Rational& cutoff) {
  if (a.precision() && cutoff > *a.precision()) throw InputError("cannot refine by truncation");
  return a.with_precision(cutoff);
}

NovikovScalar operator+(NovikovScalar a, const NovikovScalar& b) { return a += b; }
NovikovScalar operator-(NovikovScalar a, const NovikovScalar& b) { return a -= b; }
NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b) {
  NovikovScalar out = a;
  out *= b;
  return out;
}
NovikovScalar operator*(Coefficient c, NovikovScalar a) { return a *= c; }
NovikovScalar operator-(const NovikovScalar& a) { return Coefficient(-1.0) * a; }

bool operator==(const NovikovScalar& a, const NovikovScalar& b) {
  if (a.precision() != b.precision() || a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i)
    if (a.terms()[i].exponent != b.terms()[i].exponent || a.terms()[i].coefficient != b.terms()[i].coefficient)
      return false;
  return true;
}

bool approx_equal(const NovikovScalar& a, const NovikovScalar& b, double tol) {
  return (a - b).max_abs_coefficient() <= tol;
}

bool approx_equal_below(const NovikovScalar& a, const NovikovScalar& b, const Rational& cutoff, double tol) {
  return (a - b).truncated(cutoff).max_abs_coefficient() <= tol;
}

namespace {

Precision series_precision(const NovikovScalar& a, const Precision& cap, const char* what) {
  Precision p = min_precision(a.precision(), cap);
  if (!p) throw InputError(std::string(what) + ": exact input needs a precision cap");
  return p;
}

void require_lambda_plus(const NovikovScalar& a) {
  auto v = a.valuation();
  if (v && sgn(*v) <= 0) throw HypothesisError("argument not in Lambda_+ (valuation " + eqhms::to_string(*v) + ")");
}

}  // namespace

NovikovScalar inverse(const NovikovScalar& a, Precision cap) {
  if (a.is_zero()) throw std::domain_error("division by zero scalar");
  const Rational v = *a.valuation();
  const Coefficient c = a.leading_coefficient();
  // a = c T^v (1 + r), val r > 0.
  NovikovScalar r = (Coefficient(1.0) / c) * a.shifted(-v) - NovikovScalar::constant(1.0);
  Precision rel = min_precision(r.precision(), shift_precision(cap, v));
  if (r.is_zero() && !rel) return NovikovScalar::monomial(Coefficient(1.0) / c, -v);
  if (!rel) throw InputError("inverse: exact non-monomial input needs a precision cap");
  r = r.with_precision(rel);
  NovikovScalar sum = NovikovScalar::constant(1.0, rel);
  NovikovScalar term = sum;
  const NovikovScalar minus_r = -r;
  while (true) {
    term = (term * minus_r).with_precision(rel);
    if (term.is_zero()) break;
    sum += term;
  }
  return (Coefficient(1.0) / c) * sum.shifted(-v);
}

NovikovScalar exp_plus(const NovikovScalar& a, Precision cap) {
  require_lambda_plus(a);
  if (a.is_zero() && !min_precision(a.precision(), cap)) return NovikovScalar::constant(1.0);
  Precision p = series_precision(a, cap, "exp");
  NovikovScalar x = a.with_precision(p);
  NovikovScalar sum = NovikovScalar::constant(1.0, p);
  NovikovScalar term = sum;
  for (long k = 1;; ++k) {
    term = (Coefficient(1.0 / static_cast<double>(k)) * (term * x)).with_precision(p);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

NovikovScalar log_one_plus(const NovikovScalar& a, Precision cap) {
  require_lambda_plus(a);
  if (a.is_zero() && !min_precision(a.precision(), cap)) return NovikovScalar::zero();
  Precision p = series_precision(a, cap, "log");
  NovikovScalar x = a.with_precision(p);
  NovikovScalar sum = NovikovScalar::zero(p);
  NovikovScalar power = NovikovScalar::constant(1.0, p);
  for (long k = 1;; ++k) {
    power = (power * x).with_precision(p);
    if (power.is_zero()) break;
    double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += Coefficient(sign / static_cast<double>(k)) * power;
  }
  return sum;
}

NovikovScalar pow(const NovikovScalar& a, long n, Precision cap) {
  if (n < 0) return pow(inverse(a, cap), -n, cap);
  NovikovScalar result = NovikovScalar::constant(1.0);
  NovikovScalar base = a;
  while (n > 0) {
    if (n & 1) result = (result * base).with_precision(min_precision(result.precision(), cap));
    n >>= 1;
    if (n) base = (base * base).with_precision(min_precision(base.precision(), cap));
  }
  return result.with_precision(min_precision(result.precision(), cap));
}

// ---------------------------------------------------------------------------
// Shorthand parser

namespace {

class ShorthandParser {
 public:
  explicit ShorthandParser(std::string text) : s_(std::move(text)) {
    s_.erase(std::remove_if(s_.begin(), s_.end(), [](unsigned char c) { return std::isspace(c); }), s_.end());
  }

  std::vector<Term> parse_sum() {
    std::vector<Term> terms;
    if (s_.empty()) fail("empty literal");
    bool first = true;
    while (pos_ < s_.size() && s_[pos_] != ')') {
      double sign = 1.0;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        sign = s_[pos_] == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      Term t = parse_term();
      t.coefficient *= sign;
      terms.push_back(std::move(t));
    }
    return terms;
  }

  bool done() const { return pos_ == s_.size(); }
  std::size_t pos() const { return pos_; }
  const std::string& text() const { return s_; }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("cannot parse Novikov literal '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }

  Term parse_term() {
    Coefficient c = 1.0;
    bool have_coef = false;
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("unbalanced parenthesis");
      ++pos_;
      c = 0.0;
      for (const auto& t : inner) {
        if (sgn(t.exponent) != 0) fail("T inside a parenthesized coefficient");
        c += t.coefficient;
      }
      have_coef = true;
    } else if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      c = parse_number();
      have_coef = true;
    }
    if (pos_ < s_.size() && s_[pos_] == 'i') {
      c *= Coefficient(0.0, 1.0);
      ++pos_;
      have_coef = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '*') ++pos_;
    Rational exponent(0);
    if (pos_ < s_.size() && s_[pos_] == 'T') {
      ++pos_;
      exponent = 1;
      if (pos_ < s_.size() && s_[pos_] == '^') {
        ++pos_;
        exponent = parse_exponent();
      }
    } else if (!have_coef) {
      fail("expected a coefficient or T");
    }
    return {exponent, c};
  }

  double parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    double value = std::stod(s_.substr(start, pos_ - start));
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      std::size_t ds = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (ds == pos_) fail("missing denominator");
      double den = std::stod(s_.substr(ds, pos_ - ds));
      if (den == 0.0) fail("zero denominator");
      value /= den;
    }
    return value;
  }

  Rational parse_exponent() {
    std::string body;
    if (pos_ < s_.size() && (s_[pos_] == '{' || s_[pos_] == '(')) {
      char close = s_[pos_] == '{' ? '}' : ')';
      std::size_t end = s_.find(close, pos_);
      if (end == std::string::npos) fail("unterminated exponent");
      body = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
    } else {
      std::size_t start = pos_;
      if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
      body = s_.substr(start, pos_ - start);
    }
    if (body.empty()) fail("empty exponent");
    return parse_rational(body);
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

NovikovScalar parse(const std::string& text, Precision precision) {
  ShorthandParser parser(text);
  auto terms = parser.parse_sum();
  if (!parser.done()) throw InputError("cannot parse Novikov literal '" + text + "': trailing input");
  return NovikovScalar::from_terms(std::move(terms), std::move(precision));
}

// ---------------------------------------------------------------------------
// Polynomials, Newton polygon, root lifting

NovikovPolynomial::NovikovPolynomial(std::vector<NovikovScalar> coefficients) : coeffs_(std::move(coefficients)) {}

int NovikovPolynomial::degree() const {
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
    if (!coeffs_[k].is_zero()) return k;
  return -1;
}

NovikovScalar NovikovPolynomial::operator()(const NovikovScalar& x) const {
  NovikovScalar sum;
  NovikovScalar power = NovikovScalar::constant(1.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k > 0) power = power * x;
    sum += coeffs_[k] * power;
  }
  return sum;
}

NovikovPolynomial NovikovPolynomial::derivative() const {
  std::vector<NovikovScalar> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(Coefficient(static_cast<double>(k)) * coeffs_[k]);
  return NovikovPolynomial(std::move(d));
}

std::vector<NewtonSegment> newton_polygon(const NovikovPolynomial& p) {
  struct Pt {
    int i;
    Rational v;
  };
  std::vector<Pt> pts;
  for (int i = 0; i < static_cast<int>(p.coefficients().size()); ++i)
    if (!p.coefficients()[i].is_zero()) pts.push_back({i, *p.coefficients()[i].valuation()});
  if (p.degree() < 1) return {};
  // Lower convex hull, dropping collinear interior points.
  std::vector<Pt> hull;
  for (const auto& q : pts) {
    while (hull.size() >= 2) {
      const Pt& a = hull[hull.size() - 2];
      const Pt& b = hull.back();
      Rational cross = Rational(b.i - a.i) * (q.v - a.v) - (b.v - a.v) * Rational(q.i - a.i);
      if (sgn(cross) <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(q);
  }
  std::vector<NewtonSegment> segs;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const Pt& a = hull[h];
    const Pt& b = hull[h + 1];
    Rational slope = (b.v - a.v) / Rational(b.i - a.i);
    NewtonSegment seg;
    seg.start = a.i;
    seg.end = b.i;
    seg.root_valuation = -slope;
    seg.leading_equation.assign(b.i - a.i + 1, 0.0);
    for (const auto& q : pts) {
      if (q.i < a.i || q.i > b.i) continue;
      if (q.v == a.v + slope * Rational(q.i - a.i))
        seg.leading_equation[q.i - a.i] = p.coefficients()[q.i].leading_coefficient();
    }
    segs.push_back(std::move(seg));
  }
  return segs;
}

namespace {

Coefficient horner(const std::vector<Coefficient>& c, Coefficient z) {
  Coefficient s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
  return s;
}

std::vector<Coefficient> derivative(const std::vector<Coefficient>& c) {
  std::vector<Coefficient> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

}  // namespace

std::vector<LeadingRoot> solve_leading_equation(const std::vector<Coefficient>& coefficients) {
  std::vector<Coefficient> c = coefficients;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  std::vector<Coefficient> raw;
  if (deg == 1) {
    raw.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    for (int i = 0; i < deg; ++i) raw.push_back(solver.eigenvalues()(i));
  }
  std::vector<LeadingRoot> roots;
  for (auto z : raw) {
    bool merged = false;
    for (auto& r : roots)
      if (std::abs(r.value - z) <= 1e-6 * std::max(1.0, std::abs(z))) {
        r.value = (r.value * static_cast<double>(r.multiplicity) + z) / static_cast<double>(r.multiplicity + 1);
        ++r.multiplicity;
        merged = true;
        break;
      }
    if (!merged) roots.push_back({z, 1});
  }
  // Polish simple roots.
  auto dc = derivative(c);
  for (auto& r : roots) {
    if (r.multiplicity != 1) continue;
    for (int it = 0; it < 8; ++it) {
      Coefficient d = horner(dc, r.value);
      if (d == 0.0) break;
      r.value -= horner(c, r.value) / d;
    }
  }
  return roots;
}

std::vector<RootSeed> root_seeds(const NovikovPolynomial& p) {
  std::vector<RootSeed> out;
  for (const auto& seg : newton_polygon(p))
    for (const auto& r : solve_leading_equation(seg.leading_equation))
      out.push_back({seg.root_valuation, r.value, r.multiplicity});
  return out;
}

NovikovScalar newton_root(const NovikovPolynomial& p, const Rational& valuation, Coefficient leading,
                          const Rational& target) {
  if (p.degree() < 1) throw InputError("newton_root: polynomial of degree < 1");
  if (leading == 0.0) throw InputError("newton_root: zero leading coefficient");
  const NewtonSegment* seg = nullptr;
  auto segs = newton_polygon(p);
  for (const auto& s : segs)
    if (s.root_valuation == valuation) seg = &s;
  if (!seg) throw HypothesisError("seed valuation " + eqhms::to_string(valuation) + " is not a root valuation");
  double scale = 0.0;
  for (std::size_t k = 0; k < seg->leading_equation.size(); ++k)
    scale = std::max(scale, std::abs(seg->leading_equation[k]) * std::pow(std::abs(leading), static_cast<double>(k)));
  // The leading equation is in z = X / T^s shifted by z^start; its derivative
  // at a nonzero root detects multiplicity.
  Coefficient qd = horner(derivative(seg->leading_equation), leading) * leading;
  if (std::abs(qd) <= 1e-7 * scale) throw HypothesisError("seed not Hensel-liftable: multiple root of the leading equation");
  if (std::abs(horner(seg->leading_equation, leading)) > 1e-4 * scale)
    throw HypothesisError("seed is not a root of the leading equation");

  const NovikovPolynomial dp = p.derivative();
  NovikovScalar x = NovikovScalar::monomial(leading, valuation, target);
  for (int it = 0; it < 256; ++it) {
    NovikovScalar px = p(x);
    NovikovScalar dpx = dp(x);
    if (dpx.is_zero()) throw HypothesisError("seed not Hensel-liftable: derivative vanishes");
    NovikovScalar delta = px * inverse(dpx, Rational(target));
    Precision pd = min_precision(delta.precision(), target);
    if (delta.is_zero()) return x.with_precision(min_precision(x.precision(), pd));
    if (*delta.valuation() <= valuation) throw HypothesisError("Newton iteration left the valuation class of the seed");
    const bool negligible = delta.max_abs_coefficient() <= 1e-13 * std::max(1.0, x.max_abs_coefficient());
    x = (x - delta).with_precision(min_precision(x.precision(), pd));
    if (negligible) return x;
  }
  throw HypothesisError("Newton iteration did not converge");
}

}  // namespace eqhms::novikov
