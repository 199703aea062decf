#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "eqhms/error.hpp"
#include "eqhms/novikov.hpp"

using namespace eqhms;
using namespace eqhms::novikov;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

NovikovScalar lit(const std::string& s, long prec = 6) { return parse(s, q(prec)); }

bool close(Coefficient a, Coefficient b, double tol = 1e-10) { return std::abs(a - b) <= tol; }

NovikovScalar random_scalar(std::mt19937& rng, const Rational& prec, int min_num = 0) {
  std::uniform_int_distribution<int> nterms(1, 4), num(min_num, 12), den(1, 4);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::vector<Term> t;
  int n = nterms(rng);
  for (int k = 0; k < n; ++k) t.push_back({q(num(rng), den(rng)), {coef(rng), coef(rng)}});
  auto s = NovikovScalar::from_terms(t, prec);
  return s.is_zero() ? random_scalar(rng, prec, min_num) : s;
}

// Binomial expansion of sqrt(1+x) coefficients.
std::vector<double> sqrt_series(int n) {
  std::vector<double> c(n, 0.0);
  c[0] = 1.0;
  for (int k = 1; k < n; ++k) c[k] = c[k - 1] * (0.5 - (k - 1)) / k;
  return c;
}

}  // namespace

TEST_CASE("arithmetic examples") {
  CHECK(lit("T^{1/2}") + lit("T^{1/2}") == lit("2T^{1/2}"));
  CHECK(approx_equal(lit("1+T") * lit("1-T"), lit("1-T^2")));
  auto p = NovikovScalar::monomial(1.0, q(1, 4)) * NovikovScalar::monomial(1.0, q(3, 4));
  CHECK(p == NovikovScalar::monomial(1.0, q(1)));
  CHECK(p.is_exact());
}

TEST_CASE("precision bookkeeping") {
  auto a = lit("T^{1/2}", 3);
  auto b = lit("1 + T", 2);
  CHECK(*(a + b).precision() == q(2));
  // min(E_a + val b, E_b + val a) = min(3 + 0, 2 + 1/2)
  CHECK(*(a * b).precision() == q(5, 2));
  auto z = NovikovScalar::zero(q(1));
  CHECK(*(z * lit("T", 4)).precision() == q(2));
  CHECK((NovikovScalar() * a).is_exact());
}

TEST_CASE("valuation and leading coefficient") {
  auto a = lit("3T^{1/2} - T");
  CHECK(*a.valuation() == q(1, 2));
  CHECK(close(a.leading_coefficient(), 3.0));
  CHECK_FALSE(NovikovScalar().valuation().has_value());
  auto b = lit("-2iT^1 + T^2");
  CHECK(*b.valuation() == q(1));
  CHECK(close(b.leading_coefficient(), Coefficient(0, -2)));
}

TEST_CASE("inverse") {
  auto inv = inverse(lit("1+T"));
  for (int k = 0; k < 6; ++k) CHECK(close(inv.coefficient(q(k)), k % 2 ? -1.0 : 1.0));
  CHECK(*inv.precision() == q(6));
  CHECK(inverse(NovikovScalar::monomial(1.0, q(1, 2))) == NovikovScalar::monomial(1.0, q(-1, 2)));
  // (2 + T^{1/3})^{-1} = sum_k (-1)^k T^{k/3} / 2^{k+1}
  auto w = inverse(lit("2+T^{1/3}"));
  for (int k = 0; k < 18; ++k) CHECK(close(w.coefficient(q(k, 3)), std::pow(-1.0, k) / std::pow(2.0, k + 1)));
  CHECK(approx_equal(w * lit("2+T^{1/3}"), NovikovScalar::constant(1.0)));
  CHECK_THROWS_WITH(inverse(NovikovScalar()), "division by zero scalar");
  CHECK_THROWS_AS(inverse(NovikovScalar::constant(1.0) + NovikovScalar::monomial(1.0, q(1))), InputError);
  auto capped = inverse(NovikovScalar::constant(1.0) + NovikovScalar::monomial(1.0, q(1)), q(3));
  CHECK(*capped.precision() == q(3));
  CHECK(*inverse(lit("T^{1/2} + T", 4)).valuation() == q(-1, 2));
  CHECK(*inverse(lit("T^{1/2} + T", 4)).precision() == q(3));
}

TEST_CASE("exp and log") {
  auto l = log_one_plus(lit("T"));
  for (int k = 1; k < 6; ++k) CHECK(close(l.coefficient(q(k)), std::pow(-1.0, k - 1) / k));
  CHECK(log_one_plus(NovikovScalar()).is_zero());
  auto e = exp_plus(lit("T^{1/2}"));
  double fact = 1.0;
  for (int k = 0; k < 12; ++k) {
    if (k > 0) fact *= k;
    CHECK(close(e.coefficient(q(k, 2)), 1.0 / fact));
  }
  CHECK(approx_equal(log_one_plus(e - NovikovScalar::constant(1.0)), lit("T^{1/2}")));
  CHECK_THROWS_AS(exp_plus(lit("1+T")), HypothesisError);
  CHECK_THROWS_AS(log_one_plus(lit("T^{-1}")), HypothesisError);
}

TEST_CASE("truncate") {
  CHECK(truncate(lit("1+T+T^2"), q(2)) == parse("1+T", q(2)));
  CHECK(truncate(NovikovScalar(), q(1)).is_zero());
  CHECK(truncate(lit("T^{1/2}+T^{3/2}"), q(1)) == parse("T^{1/2}", q(1)));
  CHECK_THROWS_WITH(truncate(lit("T", 2), q(3)), "cannot refine by truncation");
}

TEST_CASE("shorthand parser") {
  auto a = parse("(1+2i)T^3/2 - 0.5T^{1/3} + iT + 1", q(6));
  CHECK(close(a.coefficient(q(3, 2)), Coefficient(1, 2)));
  CHECK(close(a.coefficient(q(1, 3)), -0.5));
  CHECK(close(a.coefficient(q(1)), Coefficient(0, 1)));
  CHECK(close(a.coefficient(q(0)), 1.0));
  CHECK(parse("0", q(1)).is_zero());
  CHECK_THROWS_AS(parse("T^", q(1)), InputError);
  CHECK_THROWS_AS(parse("2x", q(1)), InputError);
  CHECK_THROWS_AS(parse("", q(1)), InputError);
}

TEST_CASE("field axioms to precision") {
  std::mt19937 rng(7);
  const Rational prec = q(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_scalar(rng, prec), b = random_scalar(rng, prec), c = random_scalar(rng, prec);
    CHECK(approx_equal((a * b) * c, a * (b * c), 1e-9));
    CHECK(approx_equal(a * (b + c), a * b + a * c, 1e-9));
    CHECK(approx_equal(a * inverse(a), NovikovScalar::constant(1.0), 1e-8));
    CHECK(*(a * b).valuation() == *a.valuation() + *b.valuation());
    auto s = a + b;
    if (!s.is_zero()) {
      CHECK(*s.valuation() >= std::min(*a.valuation(), *b.valuation()));
      if (*a.valuation() != *b.valuation()) CHECK(*s.valuation() == std::min(*a.valuation(), *b.valuation()));
    }
    auto p = random_scalar(rng, prec, 1);
    CHECK(approx_equal(log_one_plus(exp_plus(p) - NovikovScalar::constant(1.0)), p, 1e-8));
  }
}

TEST_CASE("newton polygon") {
  auto poly = [](const NovikovScalar& lambda) {
    return NovikovPolynomial({-NovikovScalar::monomial(1.0, q(1)), -lambda, NovikovScalar::constant(1.0)});
  };
  auto segs = newton_polygon(poly(lit("T")));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].root_valuation == q(1, 2));
  CHECK(segs[0].multiplicity() == 2);
  REQUIRE(segs[0].leading_equation.size() == 3);
  CHECK(close(segs[0].leading_equation[0], -1.0));
  CHECK(close(segs[0].leading_equation[1], 0.0));
  CHECK(close(segs[0].leading_equation[2], 1.0));

  segs = newton_polygon(poly(lit("T^{1/4}")));
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].root_valuation == q(3, 4));
  CHECK(segs[1].root_valuation == q(1, 4));
  CHECK(segs[0].multiplicity() == 1);
  CHECK(segs[1].multiplicity() == 1);

  segs = newton_polygon(NovikovPolynomial({-lit("T"), NovikovScalar::constant(1.0)}));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].root_valuation == q(1));
  CHECK(newton_polygon(NovikovPolynomial()).empty());
}

TEST_CASE("leading equation roots") {
  auto r = solve_leading_equation({-1.0, 0.0, 1.0});
  REQUIRE(r.size() == 2);
  CHECK(r[0].multiplicity == 1);
  auto d = solve_leading_equation({-1.0, Coefficient(0, -2), 1.0});  // (z - i)^2
  REQUIRE(d.size() == 1);
  CHECK(d[0].multiplicity == 2);
  CHECK(close(d[0].value, Coefficient(0, 1), 1e-6));
}

TEST_CASE("newton root matches quadratic formula") {
  const auto lambda = lit("T", 8);
  NovikovPolynomial p({-NovikovScalar::monomial(1.0, q(1)), -lambda, NovikovScalar::constant(1.0)});
  // (lambda +- sqrt(lambda^2 + 4T)) / 2 = T/2 +- T^{1/2} sum_k binom(1/2,k) (T/4)^k
  auto s = sqrt_series(10);
  for (double sign : {1.0, -1.0}) {
    auto x = newton_root(p, q(1, 2), sign, q(8));
    CHECK(*x.valuation() == q(1, 2));
    CHECK(close(x.leading_coefficient(), sign));
    CHECK(*x.precision() >= q(7));
    std::map<Rational, double> oracle;
    oracle[q(1)] += 0.5;
    for (int k = 0; k < 10; ++k) oracle[q(1, 2) + q(k)] += sign * s[k] * std::pow(0.25, k);
    for (auto& [e, c] : oracle)
      if (e < *x.precision()) CHECK(close(x.coefficient(e), c, 1e-9));
    CHECK(p(x).max_abs_coefficient() < 1e-9);
  }
  NovikovPolynomial lin({-lit("T"), NovikovScalar::constant(1.0)});
  CHECK(approx_equal(newton_root(lin, q(1), 1.0, q(6)), lit("T")));
}

TEST_CASE("newton root rejects multiple seeds") {
  // (X - iT^{1/2})^2
  NovikovPolynomial p({-NovikovScalar::monomial(1.0, q(1)), -lit("2iT^{1/2}"), NovikovScalar::constant(1.0)});
  CHECK_THROWS_WITH_AS(newton_root(p, q(1, 2), Coefficient(0, 1), q(6)), "seed not Hensel-liftable: multiple root of the leading equation",
                       HypothesisError);
  NovikovPolynomial lin({-lit("T"), NovikovScalar::constant(1.0)});
  CHECK_THROWS_AS(newton_root(lin, q(2), 1.0, q(6)), HypothesisError);
}

TEST_CASE("newton root property on random cubics") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<NovikovScalar> c;
    for (int k = 0; k < 4; ++k) c.push_back(random_scalar(rng, q(10)));
    NovikovPolynomial p(c);
    for (const auto& seed : root_seeds(p)) {
      if (seed.multiplicity != 1) continue;
      auto x = newton_root(p, seed.valuation, seed.leading, q(6));
      CHECK(*x.valuation() == seed.valuation);
      double scale = 1.0;
      auto power = NovikovScalar::constant(1.0);
      for (const auto& ck : c) {
        scale = std::max(scale, (ck * power).max_abs_coefficient());
        power = power * x;
      }
      CHECK(p(x).max_abs_coefficient() < 1e-9 * scale);
    }
  }
}
