#include "eqhms/rational.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "eqhms/error.hpp"

namespace eqhms {

Rational make_rational(long num, long den) {
  if (den == 0) throw InputError("zero denominator");
  Rational q{mpz_class(num), mpz_class(den)};
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw InputError("empty rational literal");
  if (s[0] == '+') s.erase(0, 1);
  if (auto dot = s.find('.'); dot != std::string::npos && s.find('/') == std::string::npos) {
    std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    const bool neg = !whole.empty() && whole[0] == '-';
    if (neg) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) frac = "0";
    for (char c : whole + frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw InputError("bad rational literal '" + text + "'");
    mpz_class num(whole + frac, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw InputError("bad rational literal '" + text + "'");
  if (sgn(q.get_den()) == 0) throw InputError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

Rational floor_div(const Rational& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(out);
}

ComplexRational ComplexRational::inverse() const {
  Rational n = norm2();
  if (sgn(n) == 0) throw std::domain_error("division by zero");
  return {re / n, -im / n};
}

double ComplexRational::abs() const { return std::hypot(to_double(re), to_double(im)); }

ComplexRational& ComplexRational::operator+=(const ComplexRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexRational& ComplexRational::operator-=(const ComplexRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexRational& ComplexRational::operator*=(const ComplexRational& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ComplexRational& ComplexRational::operator/=(const ComplexRational& o) { return *this *= o.inverse(); }

ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }

bool operator==(const ComplexRational& a, const ComplexRational& b) { return a.re == b.re && a.im == b.im; }

std::ostream& operator<<(std::ostream& os, const ComplexRational& z) { return os << to_string(z); }

std::string to_string(const ComplexRational& z) {
  if (sgn(z.im) == 0) return to_string(z.re);
  std::ostringstream os;
  if (sgn(z.re) != 0) os << to_string(z.re) << (sgn(z.im) > 0 ? "+" : "");
  os << to_string(z.im) << "i";
  return os.str();
}

}  // namespace eqhms
