#include "eqhms/polynomial.hpp"

#include <cctype>
#include <functional>

namespace eqhms {

std::vector<std::vector<int>> monomials_up_to(int nvars, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(nvars, 0);
  for (int d = 0; d <= order; ++d) {
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == nvars - 1) {
        cur[i] = left;
        out.push_back(cur);
        return;
      }
      for (int k = left; k >= 0; --k) {
        cur[i] = k;
        rec(i + 1, left - k);
      }
    };
    if (nvars == 0) {
      if (d == 0) out.emplace_back();
      continue;
    }
    rec(0, d);
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  CPolynomial parse() {
    CPolynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("polynomial parse error at position " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int n() const { return static_cast<int>(vars_.size()); }

  CPolynomial expr() {
    CPolynomial acc(n());
    bool first = true;
    while (true) {
      bool neg = false;
      if (eat('-'))
        neg = true;
      else if (!first && !eat('+'))
        break;
      else if (first)
        eat('+');
      CPolynomial t = term();
      acc += neg ? -t : t;
      first = false;
      skip();
      if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) break;
    }
    return acc;
  }

  CPolynomial term() {
    CPolynomial acc = power();
    while (true) {
      if (eat('*')) {
        acc = acc * power();
      } else if (eat('/')) {
        CPolynomial d = power();
        if (d.degree() != 0 || d.order() != 0 || d.terms().size() != 1) fail("division by a non-constant");
        acc = d.terms().begin()->second.inverse() * acc;
      } else {
        // juxtaposition such as 3x or 2(x+1)
        skip();
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '('))
          acc = acc * power();
        else
          break;
      }
    }
    return acc;
  }

  CPolynomial power() {
    CPolynomial base = atom();
    if (eat('^')) {
      bool braces = eat('{');
      bool neg = eat('-');
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      int e = std::stoi(s_.substr(start, pos_ - start));
      if (braces && !eat('}')) fail("expected '}'");
      if (neg) {
        if (base.terms().size() != 1) fail("negative powers need a monomial base");
        const auto& [ex, c] = *base.terms().begin();
        std::vector<int> inv = ex;
        for (int& x : inv) x = -x;
        base = CPolynomial::monomial(inv, c.inverse());
      }
      CPolynomial out = CPolynomial::constant(n(), ComplexRational(1));
      for (int k = 0; k < e; ++k) out = out * base;
      return out;
    }
    return base;
  }

  CPolynomial atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      CPolynomial p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return CPolynomial::constant(n(), ComplexRational(parse_rational(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      for (int i = 0; i < n(); ++i)
        if (vars_[i] == name) return CPolynomial::variable(n(), i);
      if (name == "i") return CPolynomial::constant(n(), ComplexRational::i());
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

CPolynomial parse_polynomial(const std::string& text, const std::vector<std::string>& vars) {
  for (const auto& v : vars)
    if (v == "i") throw InputError("'i' is reserved for the imaginary unit");
  return PolyParser(text, vars).parse();
}

}  // namespace eqhms
