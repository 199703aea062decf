#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eqhms/ainfty.hpp"
#include "eqhms/error.hpp"

using namespace eqhms;
using namespace eqhms::ainfty;
using eqhms::equivariant::CMatrix;

namespace {

GradedBasis circle_basis() { return {{"1", "e"}, {0, 1}, 0}; }

// Signed wedge product m2(x, y) = (-1)^{|x|} x ^ y on {1, e}.
void add_circle_product(GappedAInfty& a) {
  a.set(2, 0, {0, 0}, 0, Scalar(1));
  a.set(2, 0, {0, 1}, 1, Scalar(1));
  a.set(2, 0, {1, 0}, 1, Scalar(-1));
}

GAction free_circle_action() {
  GAction act;
  act.g = equivariant::LieAlgebraData::abelian(1);
  CMatrix i(2, 2);
  i(0, 1) = Scalar(1);
  act.interior = {i};
  act.lie = {CMatrix(2, 2)};
  return act;
}

// Disk classes with boundary pairing p_j against e: m_{k,b_j}(e..e) = p_j^k / k! 1.
GappedAInfty circle_model(const std::vector<int>& pairings, const Rational& energy, int kmax, const Rational& cutoff) {
  std::vector<DiskClassGenerator> gens;
  for (std::size_t j = 0; j < pairings.size(); ++j) gens.push_back({2, energy, "b" + std::to_string(j + 1)});
  GappedAInfty a(circle_basis(), GappedMonoid(gens, cutoff), kmax);
  a.declare_all();
  add_circle_product(a);
  for (std::size_t j = 0; j < pairings.size(); ++j) {
    GappedMonoid::Element el(pairings.size(), 0);
    el[j] = 1;
    const int beta = a.monoid().index(el);
    Rational fact(1);
    Rational pk(1);
    for (int k = 0; k <= kmax; ++k) {
      if (k > 0) {
        fact *= k;
        pk *= pairings[j];
      }
      a.set(k, beta, std::vector<int>(k, 1), 0, Scalar(pk / fact));
    }
  }
  a.action = free_circle_action();
  return a;
}

int inversions(unsigned x, unsigned y) {
  int s = 0;
  for (int i = 0; i < 32; ++i)
    if (x & (1u << i))
      for (int j = 0; j < i; ++j)
        if (y & (1u << j)) ++s;
  return s;
}

}  // namespace

TEST_CASE("gapped monoid enumerates classes below the cutoff") {
  GappedMonoid m({{2, make_rational(1, 2), "a"}, {2, make_rational(1, 2), "b"}}, Rational(1));
  CHECK(m.size() == 6);
  CHECK(m.index({0, 0}) == 0);
  CHECK(m.index({2, 1}) == -1);
  const int ab = m.index({1, 1});
  CHECK(m.maslov(ab) == 4);
  CHECK(m.energy(ab) == Rational(1));
  CHECK(m.splits(ab).size() == 4);
  CHECK(m.label(ab) == "a+b");
  CHECK_THROWS_AS(GappedMonoid({{1, Rational(1), "x"}}, Rational(1)), InputError);
  CHECK_THROWS_AS(GappedMonoid({{2, Rational(0), "x"}}, Rational(1)), InputError);
}

TEST_CASE("de Rham algebra of the circle") {
  GappedAInfty a(circle_basis(), GappedMonoid({}, Rational(0)), 3);
  a.declare_all();
  add_circle_product(a);
  auto rep = check_ainfty(a);
  CHECK(rep.pass);
  CHECK(rep.degree_violations.empty());
  CHECK(check_unitality(a).pass);
  a.action = free_circle_action();
  auto compat = check_gdiff_compat(a);
  CHECK(compat.space.pass);
  CHECK(compat.interior_pass);
  CHECK(compat.lie_pass);
  CHECK(compat.unit_pass);
  CHECK(compat.pass);
}

TEST_CASE("mutations are detected") {
  GappedAInfty a(circle_basis(), GappedMonoid({}, Rational(0)), 3);
  a.declare_all();
  add_circle_product(a);
  SUBCASE("wrong unit sign") {
    a.set(2, 0, {1, 0}, 1, Scalar(1));
    CHECK_FALSE(check_unitality(a).pass);
    CHECK_FALSE(check_ainfty(a).pass);
  }
  SUBCASE("degree violation") {
    a.set(2, 0, {1, 1}, 0, Scalar(1));
    auto rep = check_ainfty(a);
    CHECK(rep.degree_violations.size() == 1);
    CHECK_FALSE(rep.pass);
  }
  SUBCASE("unit in a higher operation") {
    a.set(3, 0, {0, 1, 1}, 1, Scalar(1));
    CHECK_FALSE(check_unitality(a).pass);
  }
  SUBCASE("action moves the unit") {
    GAction act = free_circle_action();
    act.lie[0](1, 0) = Scalar(1);
    a.action = act;
    CHECK_FALSE(check_gdiff_compat(a).unit_pass);
  }
}

TEST_CASE("undeclared structure maps are reported") {
  GappedAInfty a(circle_basis(), GappedMonoid({{2, Rational(1), "b"}}, Rational(1)), 2);
  add_circle_product(a);
  try {
    check_ainfty(a);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    std::string msg = e.what();
    CHECK(msg.find("(0,b)") != std::string::npos);
    CHECK(msg.find("(1,0)") != std::string::npos);
  }
  CHECK_THROWS_AS(check_gdiff_compat(a), InputError);
}

TEST_CASE("disk model on the circle satisfies the axioms") {
  auto a = circle_model({1, -1}, make_rational(1, 2), 6, Rational(2));
  auto rep = check_ainfty(a);
  CHECK(rep.pass);
  CHECK(check_unitality(a).pass);
  CHECK(check_gdiff_compat(a).pass);
  SUBCASE("output of the wrong degree") {
    GappedMonoid::Element el{1, 0};
    a.set(1, a.monoid().index(el), {1}, 1, Scalar(1));
    auto bad = check_ainfty(a);
    CHECK(bad.degree_violations.size() == 1);
    CHECK_FALSE(bad.pass);
  }
}

TEST_CASE("associated curved algebra and lambda evaluation") {
  auto a = circle_model({1, -1}, make_rational(1, 2), 4, Rational(2));
  const Coefficient r1(2.0, 0.0), r2(0.0, 1.0);
  auto c = associated_curved(a, Rational(2), {r1, r2});
  CHECK(check_curved(c).pass);
  auto w = curvature_unit_multiple(c);
  REQUIRE(w);
  // Classes b1, b2 each contribute rho T^{1/2}; 2 b1, b1 + b2 and 2 b2 have no m_0.
  CHECK(std::abs(w->coefficient(make_rational(1, 2)) - (r1 + r2)) < 1e-12);
  CHECK(w->terms().size() == 1);

  const auto lambda = novikov::NovikovScalar::monomial(1.0, make_rational(1, 4));
  auto cl = evaluate_lambda(a, {lambda}, Rational(2), {r1, r2});
  CHECK(check_curved(cl).pass);
  auto m1e = cl.get(1, {1}, 0);
  CHECK(std::abs(m1e.coefficient(make_rational(1, 4)) + 1.0) < 1e-12);
  CHECK(std::abs(m1e.coefficient(make_rational(1, 2)) - (r1 - r2)) < 1e-12);
  CHECK_THROWS_AS(associated_curved(a, Rational(3)), InputError);
  CHECK_THROWS_AS(associated_curved(a, Rational(1), {r1}), InputError);
}

TEST_CASE("deformation by a bounding cochain") {
  const Rational P(2);
  auto a = circle_model({1, -1}, make_rational(1, 2), 10, P);
  const auto lambda = novikov::NovikovScalar::monomial(1.0, make_rational(1, 4));
  auto s = novikov::NovikovScalar::monomial(1.0, make_rational(1, 4));
  BoundingCochainCandidate b{{novikov::NovikovScalar::zero(), s}};
  auto consts = validate_candidate(a, b);
  REQUIRE(consts.size() == 1);
  CHECK(consts[0] == s);

  auto cl = evaluate_lambda(a, {lambda}, P);
  auto cb = deform(cl, b.coefficients);
  CHECK(cb.max_arity() == 3);
  auto w = curvature_unit_multiple(cb);
  REQUIRE(w);
  // m_0^b = T^{1/2}(e^s + e^{-s}) - lambda s with s = T^{1/4}, oracle
  // coefficients from the even part of the exponential series.
  CHECK(std::abs(w->coefficient(make_rational(1, 2)) - 1.0) < 1e-12);  // 2 - 1
  CHECK(std::abs(w->coefficient(make_rational(3, 4))) < 1e-12);
  CHECK(std::abs(w->coefficient(Rational(1)) - 1.0) < 1e-12);
  CHECK(std::abs(w->coefficient(make_rational(3, 2)) - 2.0 / 24.0) < 1e-12);
  CHECK(std::abs(w->coefficient(Rational(2))) < 1e-12);
  // m_1^b(e) = T^{1/2}(e^s - e^{-s}) - lambda.
  auto m1 = cb.get(1, {1}, 0);
  CHECK(std::abs(m1.coefficient(make_rational(1, 4)) + 1.0) < 1e-12);
  CHECK(std::abs(m1.coefficient(make_rational(3, 4)) - 2.0) < 1e-12);
  CHECK(std::abs(m1.coefficient(make_rational(5, 4)) - 2.0 / 6.0) < 1e-12);
  CHECK(std::abs(m1.coefficient(make_rational(7, 4)) - 2.0 / 120.0) < 1e-12);

  auto direct = deform(a, b, P);
  CHECK(check_curved(direct).pass);

  SUBCASE("arity budget") {
    auto small = circle_model({1, -1}, make_rational(1, 2), 6, P);
    CHECK_THROWS_AS(deform(small, b, P), HypothesisError);
  }
  SUBCASE("candidate checks") {
    BoundingCochainCandidate even{{s, novikov::NovikovScalar::zero()}};
    CHECK_THROWS_AS(validate_candidate(a, even), HypothesisError);
    BoundingCochainCandidate flat{{novikov::NovikovScalar::zero(), novikov::NovikovScalar::constant(1.0)}};
    CHECK_THROWS_AS(validate_candidate(a, flat), HypothesisError);
    CHECK_THROWS_AS(deform(cl, flat.coefficients), HypothesisError);
  }
}

TEST_CASE("invariant part of the Chevalley-Eilenberg algebra of so(3)") {
  const auto g = equivariant::LieAlgebraData::so3();
  const auto w = equivariant::weil_algebra(g, 0);
  const auto space = w.as_gdiff();
  const int n = w.dim();
  GradedBasis basis{space.labels, space.degrees, 0};
  GappedAInfty a(basis, GappedMonoid({}, Rational(0)), 3);
  a.declare_all();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!space.delta(i, j).is_zero()) a.set(1, 0, {j}, i, space.delta(i, j));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const unsigned mx = w.basis[x].mask, my = w.basis[y].mask;
      if (mx & my) continue;
      const int sign = ((inversions(mx, my) + space.degrees[x]) % 2 == 0) ? 1 : -1;
      a.set(2, 0, {x, y}, w.index.at({mx | my, w.basis[x].f_exponents}), Scalar(sign));
    }
  a.action = GAction{g, space.interior, space.lie};
  REQUIRE(check_ainfty(a).pass);
  REQUIRE(check_unitality(a).pass);
  REQUIRE(check_gdiff_compat(a).pass);

  auto inv = invariant_part(a);
  CHECK(inv.dim() == 2);
  CHECK(inv.basis().degrees == std::vector<int>{0, 3});
  CHECK(check_ainfty(inv).pass);
  CHECK(check_unitality(inv).pass);
  CHECK_FALSE(inv.action.has_value());
  CHECK_THROWS_AS(evaluate_lambda(a, {{}, {}, {}}, Rational(0)), HypothesisError);

  SUBCASE("interior that is not a derivation") {
    const int t12 = w.index.at({0b011u, w.basis[0].f_exponents});
    auto act = *a.action;
    for (int r = 0; r < n; ++r) act.interior[0](r, t12) = Scalar{};
    a.action = act;
    auto compat = check_gdiff_compat(a);
    CHECK_FALSE(compat.interior_pass);
    CHECK_FALSE(compat.space.pass);
    CHECK_FALSE(compat.pass);
  }
}
