#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eqhms/equivariant.hpp"
#include "eqhms/error.hpp"

using namespace eqhms;
using namespace eqhms::equivariant;

namespace {

GDiffSpace direct_sum(const GDiffSpace& a, const GDiffSpace& b) {
  GDiffSpace s;
  const std::size_t n = a.dim() + b.dim();
  s.labels = a.labels;
  s.labels.insert(s.labels.end(), b.labels.begin(), b.labels.end());
  s.degrees = a.degrees;
  s.degrees.insert(s.degrees.end(), b.degrees.begin(), b.degrees.end());
  auto block = [&](const CMatrix& x, const CMatrix& y) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) m(i, j) = x(i, j);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) m(a.dim() + i, a.dim() + j) = y(i, j);
    return m;
  };
  s.delta = block(a.delta, b.delta);
  for (std::size_t j = 0; j < a.interior.size(); ++j) {
    s.interior.push_back(block(a.interior[j], b.interior[j]));
    s.lie.push_back(block(a.lie[j], b.lie[j]));
  }
  return s;
}

std::vector<int> dims(const std::map<int, int>& h) {
  std::vector<int> v;
  for (auto [k, d] : h) v.push_back(d);
  return v;
}

}  // namespace

TEST_CASE("g-differential axioms on standard spaces") {
  auto u1 = LieAlgebraData::abelian(1);
  CHECK(check_gdiff_axioms(point_space(1), u1).pass);
  CHECK(check_gdiff_axioms(circle_free(), u1).pass);
  CHECK(check_gdiff_axioms(circle_trivial(), u1).pass);
  auto so3 = LieAlgebraData::so3();
  CHECK(check_gdiff_axioms(chevalley_eilenberg(so3), so3).pass);
  CHECK(check_gdiff_axioms(weil_algebra(so3, 2).as_gdiff(), so3).pass);
  CHECK(check_gdiff_axioms(weil_algebra(LieAlgebraData::abelian(2), 3).as_gdiff(), LieAlgebraData::abelian(2)).pass);
}

TEST_CASE("mutations are detected") {
  auto u1 = LieAlgebraData::abelian(1);
  auto m = circle_free();
  m.interior[0](1, 0) = Scalar(1);  // i_{e1}(1) = e1
  auto rep = check_gdiff_axioms(m, u1);
  CHECK_FALSE(rep.pass);
  bool degree_failed = false;
  for (const auto& r : rep.residuals)
    if (r.name == "degree") degree_failed = !r.pass;
  CHECK(degree_failed);

  auto n = circle_free();
  n.lie[0](1, 1) = Scalar(1);  // L no longer equals delta i + i delta
  CHECK_FALSE(check_gdiff_axioms(n, u1).pass);
  CHECK_THROWS_AS(check_gdiff_axioms(circle_free(), LieAlgebraData::abelian(2)), InputError);
}

TEST_CASE("Lie algebra validation") {
  LieAlgebraData::so3().validate();
  auto bad = LieAlgebraData::abelian(2);
  bad.c(0, 0, 1) = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  CHECK_FALSE(LieAlgebraData::so3().is_abelian());
}

TEST_CASE("abelian rank one Weil algebra") {
  auto w = weil_algebra(LieAlgebraData::abelian(1), 2);
  REQUIRE(w.dim() == 6);
  std::vector<std::string> labels;
  for (int k = 0; k < w.dim(); ++k) labels.push_back(w.label(k));
  CHECK(labels == std::vector<std::string>{"1", "t1", "F1", "t1F1", "F1F1", "t1F1F1"});
  auto d = w.delta.dense();
  CHECK(d(2, 1) == Scalar(1));  // delta theta = F
  CHECK(d(4, 3) == Scalar(1));  // delta (theta F) = F^2
  CHECK(w.horizontal() == std::vector<int>{0, 2, 4});
  auto i = w.interior[0].dense();
  CHECK(i(0, 1) == Scalar(1));
  CHECK(i(2, 3) == Scalar(1));
}

TEST_CASE("so(3) Weil differential on curvatures") {
  auto g = LieAlgebraData::so3();
  auto w = weil_algebra(g, 2);
  WeilMonomial unit{0u, {0, 0, 0}};
  for (int i = 0; i < 3; ++i) {
    WeilMonomial f = unit;
    f.f_exponents[i] = 1;
    CVector expect(w.dim());
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (sgn(g.c(i, j, k)) == 0) continue;
        WeilMonomial t = unit;
        t.mask = 1u << k;
        t.f_exponents[j] = 1;
        expect[w.index.at(t)] += Scalar(g.c(i, j, k));
      }
    CVector e(w.dim());
    e[w.index.at(f)] = Scalar(1);
    CHECK(w.delta.apply(e) == expect);
  }
}

TEST_CASE("Cartan model of the free circle") {
  auto u1 = LieAlgebraData::abelian(1);
  auto t = tensor_model(circle_free(), u1, 3, ModelKind::Cartan);
  // ambient index m * dim_w + k for m in {1, e1}, F^k
  REQUIRE(t.dim_w == 4);
  for (int k = 0; k < 3; ++k) {
    CVector v(t.dim());
    v[1 * 4 + k] = Scalar(1);
    CVector expect(t.dim());
    expect[0 * 4 + k + 1] = Scalar(-1);
    CHECK(t.delta.apply(v) == expect);
  }
  auto c = build_model(circle_free(), u1, 3, ModelKind::Cartan);
  CHECK(c.squares_to_zero());
  for (int k = 0; k <= 5; ++k) CHECK(c.dim(k) == 1);
}

TEST_CASE("equivariant cohomology") {
  auto u1 = LieAlgebraData::abelian(1);
  for (auto kind : {ModelKind::Cartan, ModelKind::Weil}) {
    auto free = cohomology(build_model(circle_free(), u1, 4, kind));
    CHECK(dims(free) == std::vector<int>{1, 0, 0, 0, 0, 0, 0, 0});
    auto pt = cohomology(build_model(point_space(1), u1, 4, kind));
    CHECK(dims(pt) == std::vector<int>{1, 0, 1, 0, 1, 0, 1, 0});
    auto triv = cohomology(build_model(circle_trivial(), u1, 3, kind));
    CHECK(dims(triv) == std::vector<int>{1, 1, 1, 1, 1, 1});
  }
  auto c = build_model(point_space(1), u1, 2, ModelKind::Cartan);
  for (const auto& [k, d] : c.differential) CHECK(d.is_zero());
  CHECK_THROWS_AS(cohomology(c, 4), InputError);
}

TEST_CASE("so(3) acting on itself") {
  auto g = LieAlgebraData::so3();
  auto m = chevalley_eilenberg(g);
  auto cart = cohomology(build_model(m, g, 2, ModelKind::Cartan));
  CHECK(dims(cart) == std::vector<int>{1, 0, 0, 0});
  auto weil = cohomology(build_model(m, g, 2, ModelKind::Weil));
  CHECK(dims(weil) == dims(cart));
  auto rep = mathai_quillen(m, g, 2);
  CHECK(rep.invertible);
  CHECK(rep.lands_in_cartan);
  CHECK(rep.intertwines);
  CHECK(rep.dimensions_agree);
}

TEST_CASE("Mathai-Quillen map") {
  auto u1 = LieAlgebraData::abelian(1);
  auto pt = mathai_quillen(point_space(1), u1, 3);
  CHECK((pt.phi - SparseOperator::identity(pt.phi.rows())).is_zero());
  CHECK(pt.nilpotency_order == 1);
  for (int D : {2, 4}) {
    auto rep = mathai_quillen(circle_free(), u1, D);
    CHECK(rep.invertible);
    CHECK(rep.lands_in_cartan);
    CHECK(rep.intertwines);
    CHECK(rep.dimensions_agree);
    CHECK(rep.nilpotency_order == 2);
  }
  auto sum = direct_sum(circle_free(), circle_trivial());
  auto rep = mathai_quillen(sum, u1, 3);
  CHECK(rep.intertwines);
  CHECK(rep.lands_in_cartan);
}

TEST_CASE("Weil and Cartan cohomology agree") {
  auto u1 = LieAlgebraData::abelian(1);
  auto u2 = LieAlgebraData::abelian(2);
  std::vector<std::pair<GDiffSpace, LieAlgebraData>> cases = {
      {point_space(2), u2},
      {chevalley_eilenberg(u2), u2},
      {direct_sum(circle_free(), circle_trivial()), u1},
      {direct_sum(circle_free(), point_space(1)), u1},
  };
  for (const auto& [m, g] : cases) {
    auto a = cohomology(build_model(m, g, 2, ModelKind::Cartan));
    auto b = cohomology(build_model(m, g, 2, ModelKind::Weil));
    CHECK(a == b);
  }
  // T^2 acting freely on itself has H = C
  CHECK(dims(cohomology(build_model(chevalley_eilenberg(u2), u2, 2, ModelKind::Cartan))) ==
        std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("Cartan differential is linear over curvatures") {
  auto g = LieAlgebraData::so3();
  auto t = tensor_model(chevalley_eilenberg(g), g, 3, ModelKind::Cartan);
  for (int j = 0; j < 3; ++j) {
    auto comm = t.delta * t.multiply_f[j] - t.multiply_f[j] * t.delta;
    for (int a = 0; a < t.dim(); ++a) {
      if (t.f_degrees[a] > t.D - 2) continue;
      CVector e(t.dim());
      e[a] = Scalar(1);
      for (const auto& x : comm.apply(e)) CHECK(x.is_zero());
    }
  }
}
