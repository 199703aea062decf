#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "eqhms/error.hpp"
#include "eqhms/json_io.hpp"

using namespace eqhms;
using namespace eqhms::json_io;
using novikov::NovikovScalar;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(EQHMS_DATA_DIR) + "/" + name);
  REQUIRE(in);
  return json::parse(in);
}

NovikovScalar N(const std::string& s) { return novikov::parse(s, std::nullopt); }

}  // namespace

TEST_CASE("rationals and complex numbers") {
  for (auto q : {Rational(0), Rational(-7, 3), Rational(1, 12), Rational(mpz_class("123456789012345678901234567890"))}) {
    CHECK(rational_from_json(rational_to_json(q)) == q);
  }
  CHECK(rational_from_json(json(3)) == Rational(3));
  CHECK(rational_from_json(json("5/10")) == Rational(1, 2));
  CHECK_THROWS_AS(rational_from_json(json::array({1, 0})), InputError);
  CHECK_THROWS_AS(rational_from_json(json("x")), InputError);

  ComplexRational z(Rational(1, 2), Rational(-3));
  CHECK(complex_from_json(complex_to_json(z)) == z);
}

TEST_CASE("novikov literals round trip") {
  for (const auto& s : {"T", "2T^{1/2}", "iT", "1 + T^{1/3} - 3T^2", "0"}) {
    auto a = N(s);
    auto back = novikov_from_json(novikov_to_json(a));
    CHECK(back == a);
    CHECK(novikov_to_json(back) == novikov_to_json(a));
  }
  auto a = novikov::truncate(N("T + T^{5/2}"), Rational(2));
  REQUIRE(a.precision());
  CHECK(*novikov_from_json(novikov_to_json(a)).precision() == Rational(2));

  auto b = novikov_from_text(R"({"terms":[[1,1,1,0]],"precision":[6,1]})");
  CHECK(b == novikov::truncate(N("T"), Rational(6)));

  auto v = novikov_vector_from_text("[T^{1/4},2T^{1/4}]");
  REQUIRE(v.size() == 2);
  CHECK(v[1] == N("2T^{1/4}"));
  auto w = novikov_vector_from_text(R"(["T", {"terms":[[1,2,0,1]],"precision":null}])");
  REQUIRE(w.size() == 2);
  CHECK(w[1] == N("iT^{1/2}"));

  CHECK_THROWS_AS(novikov_from_text("{\"terms\": 3}"), InputError);
  CHECK_THROWS_AS(novikov_from_text("T^{"), InputError);
}

TEST_CASE("polynomials and factorizations") {
  std::vector<std::string> vars{"x", "y"};
  auto p = parse_polynomial("x^2*y - 3*y + 1/2", vars);
  CHECK(polynomial_from_json(polynomial_to_json(p, vars), vars) == p);

  auto doc = load("koszul_x2.json");
  auto v = vars_from_json(doc);
  auto m = mf_from_json(doc, v);
  CHECK(mf::mf_verify(m).pass);
  auto again = mf_from_json(mf_to_json(m, v), v);
  CHECK(again.w == m.w);
  CHECK(mf_to_json(again, v) == mf_to_json(m, v));

  auto explicit_doc = load("koszul_x2_explicit.json");
  auto e = mf_from_json(explicit_doc, vars_from_json(explicit_doc));
  CHECK(e.w == m.w);

  json bad = {{"vars", {"x"}}, {"w", "x^2"}, {"phi", {{"x"}}}, {"psi", {{"x", "1"}}}};
  CHECK_THROWS_AS(mf_from_json(bad, {"x"}), InputError);
}

TEST_CASE("fans") {
  auto doc = load("p2.json");
  auto [fan, phi] = fan_from_json(doc);
  auto ref = tropical::fans::p2();
  CHECK(fan.rays == ref.fan.rays);
  CHECK(fan.max_cones == ref.fan.max_cones);
  CHECK(phi == ref.phi);
  CHECK(fan_to_json(fan, phi) == fan_to_json(ref.fan, ref.phi));
  CHECK_THROWS_AS(fan_from_json(json{{"n", 2}}), InputError);
}

TEST_CASE("g-differential spaces") {
  for (const char* name : {"point", "circle_free", "circle_trivial"}) {
    auto g = lie_from_json(json("u1"));
    auto m = gdiff_from_json(json(name), g);
    auto back = gdiff_from_json(gdiff_to_json(m), g);
    CHECK(back.labels == m.labels);
    CHECK(back.degrees == m.degrees);
    CHECK(gdiff_to_json(back) == gdiff_to_json(m));
    CHECK(equivariant::check_gdiff_axioms(back, g).pass);
  }
  auto so3 = lie_from_json(json("so3"));
  CHECK(lie_from_json(lie_to_json(so3)).rank == so3.rank);
  auto ce = gdiff_from_json(json("chevalley_eilenberg"), so3);
  CHECK(equivariant::check_gdiff_axioms(ce, so3).pass);
}

TEST_CASE("A-infinity algebras") {
  auto a = mirror::model_algebra(mirror::ToricMirrorGeometry::cp1(), Rational(1, 2), Rational(3), 4);
  auto j = algebra_to_json(a);
  auto back = algebra_from_json(j);
  CHECK(algebra_to_json(back) == j);
  CHECK(ainfty::check_ainfty(back).pass);

  // The shipped file is the same serialization.
  CHECK(load("mirror_cp1.json") == j);

  json broken = j;
  broken["basis"]["degrees"] = json::array({0});
  CHECK_THROWS_AS(algebra_from_json(broken), InputError);
}

TEST_CASE("reports are deterministic") {
  auto geom = mirror::ToricMirrorGeometry::cp1();
  auto r1 = mirror_report_to_json(mirror::correspondence_report(geom, N("T^{1/4}"), Rational(2)));
  auto r2 = mirror_report_to_json(mirror::correspondence_report(geom, N("T^{1/4}"), Rational(2)));
  CHECK(r1.dump() == r2.dump());
  REQUIRE(r1["rows"].size() == 2);
  for (const auto& row : r1["rows"]) {
    auto root = novikov_from_json(row["root"]);
    CHECK(novikov_to_json(root) == row["root"]);
  }
}
