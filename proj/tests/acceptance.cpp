#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "eqhms/ainfty.hpp"
#include "eqhms/equivariant.hpp"
#include "eqhms/error.hpp"
#include "eqhms/mf.hpp"
#include "eqhms/mirror.hpp"
#include "eqhms/tropical.hpp"

using namespace eqhms;
using mirror::ToricMirrorGeometry;
using novikov::Coefficient;
using novikov::NovikovScalar;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

NovikovScalar T(const Rational& e, Coefficient c = 1.0) { return NovikovScalar::monomial(c, e); }
Rational q(long a, long b) { return make_rational(a, b); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

double half_binom(int n) {
  double c = 1.0;
  for (int k = 0; k < n; ++k) c *= (0.5 - k) / (k + 1);
  return c;
}

Outcome acc1() {
  auto t0 = Clock::now();
  const Rational E(6);
  auto pts = mirror::solve_mirror(ToricMirrorGeometry::cp1(), T(Rational(1)), E);
  const double dt = seconds_since(t0);
  Outcome o;
  if (pts.size() != 2) return {false, std::to_string(pts.size()) + " roots"};
  double err = 0.0;
  for (int s = 0; s < 2; ++s) {
    const auto& x = pts[s].root;
    const double sign = s == 0 ? 1.0 : -1.0;
    o.pass = o.pass && *x.valuation() == q(1, 2) && std::abs(x.leading_coefficient() - sign) < 1e-12;
    // X = T/2 +- T^{1/2} sqrt(1 + T/4)
    for (int k = 1; k <= 10; ++k) {
      const Rational e = q(k, 2);
      double expect = 0.0;
      if (k % 2 == 1) expect = sign * half_binom((k - 1) / 2) / std::pow(4.0, (k - 1) / 2);
      if (k == 2) expect = 0.5;
      err = std::max(err, std::abs(x.coefficient(e) - expect));
    }
  }
  o.pass = o.pass && err < 1e-8 && dt < 1.0;
  o.detail = "2 roots, val 1/2, leading +-1, max oracle error " + fmt(err) + ", " + fmt(dt) + " s";
  return o;
}

Outcome acc2() {
  auto t0 = Clock::now();
  const auto lam = T(q(1, 4));
  auto pts = mirror::solve_mirror(ToricMirrorGeometry::cp1(), lam, Rational(3));
  if (pts.size() != 2) return {false, std::to_string(pts.size()) + " roots"};
  auto cat = mirror::brane_category(ToricMirrorGeometry::cp1(), {pts[0].brane, pts[1].brane}, lam, Rational(2));
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = pts[0].brane.u == q(1, 4) && pts[1].brane.u == q(3, 4) && !cat.homs[0][1].nonzero &&
           !cat.homs[1][0].nonzero && cat.homs[0][0].nonzero && cat.homs[1][1].nonzero && dt < 1.0;
  o.detail = "u = {" + pts[0].brane.u.get_str() + ", " + pts[1].brane.u.get_str() + "}, off-diagonal homs 0, " +
             fmt(dt) + " s";
  return o;
}

Outcome acc3() {
  std::mt19937 rng(20261014);
  std::uniform_int_distribution<int> den(2, 6);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  const Rational E(3);
  double worst = 0.0, worst_rel = 0.0;
  int roots = 0;
  for (int trial = 0; trial < 20;) {
    const int d = den(rng);
    const int n = std::uniform_int_distribution<int>(1, d - 1)(rng);
    const Rational a = q(n, d);
    if (a == q(1, 2)) continue;
    // unit modulus; smaller leading coefficients make the root series grow like |c|^{-2n}
    const auto lam = T(a, std::polar(1.0, phase(rng)));
    const auto geom = trial % 4 == 3 ? ToricMirrorGeometry::c() : ToricMirrorGeometry::cp1();
    for (const auto& pt : mirror::solve_mirror(geom, lam, E)) {
      auto m1 = mirror::structure_constant(geom, pt.brane, lam, 1, E);
      worst = std::max(worst, m1.max_abs_coefficient());
      worst_rel = std::max(worst_rel, m1.max_abs_coefficient() / std::max(1.0, pt.root.max_abs_coefficient()));
      ++roots;
    }
    ++trial;
  }
  return {worst < 1e-8, "20 lambdas, " + std::to_string(roots) + " roots, max |m1| " + fmt(worst) +
                            " (relative to root size " + fmt(worst_rel) + ")"};
}

Outcome acc4() {
  const Rational E(3);
  double worst = 0.0;
  bool exponents = true;
  std::vector<std::pair<ToricMirrorGeometry, NovikovScalar>> cases{
      {ToricMirrorGeometry::cp1(), T(Rational(1))},
      {ToricMirrorGeometry::cp1(), T(q(1, 4))},
      {ToricMirrorGeometry::cp1(), T(q(1, 3), Coefficient(0.0, 2.0)) + T(Rational(1))},
      {ToricMirrorGeometry::c(), T(Rational(1))}};
  for (const auto& [geom, lam] : cases)
    for (const auto& pt : mirror::solve_mirror(geom, lam, E)) {
      auto sc = mirror::structure_constants(geom, pt.brane, lam, 6, E);
      for (int k = 0; k <= 6; ++k) {
        auto cf = mirror::closed_form(geom, pt.brane, lam, k, E);
        // every term, tiny or not, sits at an exponent of the other side or cancels
        Rational cut = E;
        for (const auto& p : {sc[k].precision(), cf.precision()})
          if (p) cut = std::min(cut, *p);
        auto diff = (sc[k] - cf).truncated(cut);
        worst = std::max(worst, diff.max_abs_coefficient());
        for (const auto& [e, c] : sc[k].terms())
          if (e < cut && std::abs(c) > 1e-8 && std::abs(cf.coefficient(e)) < 1e-12) exponents = false;
      }
    }
  const auto deg = T(q(1, 2), Coefficient(0.0, 2.0));
  auto dpts = mirror::solve_mirror(ToricMirrorGeometry::cp1(), deg, E, true);
  bool degenerate = dpts.size() == 1;
  std::string m3;
  if (degenerate) {
    auto sc = mirror::structure_constants(ToricMirrorGeometry::cp1(), dpts[0].brane, deg, 3, E);
    degenerate = sc[2].is_zero() && !sc[3].is_zero();
    m3 = sc[3].to_string();
  }
  return {worst < 1e-8 && exponents && degenerate,
          "k <= 6 max error " + fmt(worst) + "; degenerate: m2 = 0, m3 = " + m3};
}

Outcome acc5() {
  const Rational E(3);
  bool ok = true;
  std::string detail;
  auto pts = mirror::solve_mirror(ToricMirrorGeometry::cp1(), T(Rational(1)), E);
  for (const auto& pt : pts) {
    auto m = mirror::clifford_match(ToricMirrorGeometry::cp1(), pt.brane, T(Rational(1)), E);
    ok = ok && m.match;
    detail += "cp1 " + m.product.truncated(Rational(1)).to_string() + "; ";
  }
  auto c = mirror::solve_mirror(ToricMirrorGeometry::c(), T(Rational(1)), E);
  auto mc = mirror::clifford_match(ToricMirrorGeometry::c(), c[0].brane, T(Rational(1)), E);
  ok = ok && mc.match && pts.size() == 2;
  detail += "c " + mc.product.to_string();
  return {ok, detail};
}

bool structure_checks_pass(const ToricMirrorGeometry& geom, const ainfty::GappedAInfty& a) {
  auto rel = ainfty::check_ainfty(a);
  auto gd = ainfty::check_gdiff_compat(a);
  return rel.pass && ainfty::check_unitality(a).pass && gd.pass && mirror::check_divisor_axiom(geom, a).pass;
}

Outcome acc6() {
  const Rational E(3);
  bool ok = true;
  double worst = 0.0;
  for (auto geom : {ToricMirrorGeometry::cp1(), ToricMirrorGeometry::c()}) {
    auto a = mirror::model_algebra(geom, q(1, 2), E, 5);
    auto rel = ainfty::check_ainfty(a);
    for (const auto& r : rel.relations) worst = std::max(worst, r.max_residual);
    auto gd = ainfty::check_gdiff_compat(a);
    for (const auto& r : gd.interior) worst = std::max(worst, r.max_residual);
    for (const auto& r : gd.lie) worst = std::max(worst, r.max_residual);
    for (const auto& r : gd.space.residuals) worst = std::max(worst, r.max_residual);
    ok = ok && rel.pass && ainfty::check_unitality(a).pass && gd.pass;
  }
  std::mt19937 rng(7);
  int detected = 0;
  const auto geom = ToricMirrorGeometry::cp1();
  const auto base = mirror::model_algebra(geom, q(1, 2), E, 5);
  for (int i = 0; i < 10; ++i) {
    auto a = base;
    const int k = std::uniform_int_distribution<int>(0, a.max_arity())(rng);
    const int beta = std::uniform_int_distribution<int>(0, a.monoid().size() - 1)(rng);
    std::vector<int> in(k);
    for (auto& x : in) x = std::uniform_int_distribution<int>(0, a.dim() - 1)(rng);
    const int out = std::uniform_int_distribution<int>(0, a.dim() - 1)(rng);
    a.set(k, beta, in, out, a.get(k, beta, in, out) + ainfty::Scalar(q(1, 1000)));
    if (!structure_checks_pass(geom, a)) ++detected;
  }
  ok = ok && worst == 0.0 && detected == 10;
  return {ok, "max residual " + fmt(worst) + ", mutations detected " + std::to_string(detected) + "/10"};
}

Outcome acc7() {
  using namespace equivariant;
  const auto g = LieAlgebraData::abelian(1);
  const int D = 4;
  auto circle = circle_free();
  auto hc = cohomology(build_model(circle, g, D, ModelKind::Cartan));
  auto hw = cohomology(build_model(circle, g, D, ModelKind::Weil));
  bool ok = hc == hw;
  for (const auto& [k, d] : hc) ok = ok && d == (k == 0 ? 1 : 0);
  auto pt = point_space(1);
  auto hp = cohomology(build_model(pt, g, D, ModelKind::Cartan));
  std::string dims;
  for (const auto& [k, d] : hp) {
    ok = ok && d == (k % 2 == 0 ? 1 : 0);
    dims += std::to_string(d);
  }
  bool mq = true;
  for (const auto* m : {&circle, &pt}) {
    auto rep = mathai_quillen(*m, g, D);
    mq = mq && rep.intertwines && rep.invertible && rep.lands_in_cartan && rep.dimensions_agree;
  }
  auto so3 = LieAlgebraData::so3();
  auto rep = mathai_quillen(chevalley_eilenberg(so3), so3, 2);
  mq = mq && rep.intertwines;
  return {ok && mq, "H(S1) = C in degree 0, H(pt) dims " + dims + ", Mathai-Quillen intertwines"};
}

Outcome acc8() {
  std::mt19937 rng(11);
  const std::vector<std::string> vars{"x", "y", "z"};
  std::uniform_int_distribution<int> small(-4, 4);
  auto random_quadric = [&]() {
    std::string s = std::to_string(small(rng));
    for (const char* m : {"x", "y", "z", "x^2", "x*y", "x*z", "y^2", "y*z", "z^2"}) {
      const int c = small(rng);
      if (c == 0) continue;
      s += (c < 0 ? " - " : " + ") + std::to_string(std::abs(c)) + "/" + std::to_string(1 + std::abs(small(rng))) + "*" + m;
    }
    return parse_polynomial(s, vars);
  };
  int passed = 0;
  for (int t = 0; t < 50; ++t) {
    const int m = 1 + t % 3;
    std::vector<int> coords{0, 1, 2};
    std::shuffle(coords.begin(), coords.end(), rng);
    std::vector<CPolynomial> f, w;
    for (int i = 0; i < m; ++i) {
      f.push_back(parse_polynomial(vars[coords[i]], vars));
      w.push_back(random_quadric());
    }
    if (mf::mf_verify(mf::koszul_stabilization(f, w)).pass) ++passed;
  }
  bool stable = true;
  std::string dims;
  for (const auto& [names, expect] : std::vector<std::pair<std::vector<std::string>, int>>{{{"x"}, 2}, {{"x", "y"}, 4}}) {
    std::vector<CPolynomial> gens;
    for (const auto& v : names) gens.push_back(parse_polynomial(v, names));
    auto k = mf::koszul_stabilization(gens, gens);
    for (int D = 4; D <= 8; ++D) {
      mf::JetWindow<ComplexRational> win{std::vector<ComplexRational>(names.size()), D};
      stable = stable && mf::hom_cohomology_dim(k, k, win).total() == expect;
    }
    dims += std::to_string(expect) + " ";
  }
  return {passed == 50 && stable, std::to_string(passed) + "/50 exact, hom dims " + dims + "for D = 4..8"};
}

Outcome acc9() {
  namespace fans = tropical::fans;
  auto t0 = Clock::now();
  std::vector<std::pair<tropical::NamedFan, int>> cases{{fans::p1(), 2}, {fans::p2(), 3},
                                                        {fans::p1xp1(), 4}, {fans::hirzebruch(1), 4},
                                                        {fans::c(), 1}, {fans::cn(2), 1},
                                                        {fans::bl0c2(), 2}};
  bool ok = true;
  std::string detail;
  for (const auto& [nf, expect] : cases) {
    auto jc = tropical::jacobian_count(nf.fan, nf.phi);
    ok = ok && jc.count == expect && jc.max_cones == expect && jc.equal;
    detail += nf.name + ":" + std::to_string(jc.count) + " ";
  }
  auto p1 = fans::p1();
  auto eps = tropical::epsilon_P(p1.fan, p1.phi);
  ok = ok && eps.value && *eps.value == q(1, 2);
  const double dt = seconds_since(t0);
  ok = ok && dt < 5.0;
  return {ok, detail + "eps_P(P1) = 1/2, " + fmt(dt) + " s"};
}

Outcome acc10() {
  const Rational E(5);
  double worst = 0.0;
  bool ok = true;
  const Rational cut = Rational(4) + q(1, 1000000);
  auto p1 = tropical::fans::p1();
  const auto lam = T(q(1, 4));
  auto roots = mirror::solve_mirror(ToricMirrorGeometry::cp1(), lam, E);
  for (int c = 0; c < 2; ++c) {
    auto lift = tropical::hensel_lift_critical(p1.fan, p1.phi, {lam}, c, E);
    double best = 1e300;
    for (const auto& r : roots) best = std::min(best, (r.root - lift.y[0]).truncated(cut).max_abs_coefficient());
    worst = std::max(worst, best);
    ok = ok && lift.nondegenerate;
  }
  auto cf = tropical::fans::c();
  auto lift = tropical::hensel_lift_critical(cf.fan, cf.phi, {T(Rational(1))}, 0, E);
  auto root = mirror::solve_mirror(ToricMirrorGeometry::c(), T(Rational(1)), E);
  worst = std::max(worst, (root[0].root - lift.y[0]).truncated(cut).max_abs_coefficient());
  return {ok && worst < 1e-8, "P1 (lambda = T^1/4) and C (lambda = T), max difference " + fmt(worst)};
}

Outcome acc11() {
  auto p2 = tropical::fans::p2();
  auto a = tropical::jacobian_count(p2.fan, p2.phi, tropical::sample_lambda({q(1, 6), q(1, 4)}));
  auto b = tropical::jacobian_count(p2.fan, p2.phi, tropical::sample_lambda({q(1, 4), q(1, 8)}));
  return {a.count == b.count && a.count == 3 && a.equal && b.equal,
          "val (1/6, 1/4): " + std::to_string(a.count) + ", val (1/4, 1/8): " + std::to_string(b.count)};
}

Outcome acc12() {
  const std::vector<std::string> xy{"x", "y"};
  const auto g = parse_polynomial("1 + y", xy);
  const std::vector<ComplexRational> origin{ComplexRational(0), ComplexRational(0)};
  bool ok = true;
  std::string detail;
  for (const char* f : {"x^2", "x^3"}) {
    auto l = mf::lagrange_lift(parse_polynomial(f, xy), {g}, origin);
    // independent oracle: Milnor number of f on the line
    const int oracle =
        mf::milnor_number(parse_polynomial(f, {"x"}), mf::JetWindow<ComplexRational>{{ComplexRational(0)}, 2});
    ok = ok && l.match && l.lifted_dim == l.restricted_dim && l.restricted_dim == oracle;
    detail += std::string(f) + ": lifted " + std::to_string(l.lifted_dim) + " = restricted " +
              std::to_string(l.restricted_dim) + "; ";
  }
  return {ok, detail + "x^2 gives C[x]/(x), dimension 1"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"CP1 mirror at lambda = T", acc1},
      {"CP1 mirror at lambda = T^{1/4}", acc2},
      {"critical-point property m1 = 0", acc3},
      {"structure-constant ladder", acc4},
      {"Clifford match", acc5},
      {"A-infinity and g-differential axioms", acc6},
      {"Cartan and Weil models", acc7},
      {"matrix factorizations", acc8},
      {"tropical counts", acc9},
      {"Hensel lift vs mirror solver", acc10},
      {"lambda-independence on P2", acc11},
      {"Lagrange lift", acc12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << "\n";
  }
  return failures == 0 ? 0 : 1;
}
