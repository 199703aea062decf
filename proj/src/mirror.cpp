#include "eqhms/mirror.hpp"

#include <algorithm>
#include <cmath>

#include "eqhms/error.hpp"
#include "eqhms/mf.hpp"

namespace eqhms::mirror {

namespace {

NovikovScalar T(const Rational& e = Rational(1)) { return NovikovScalar::monomial(1.0, e); }

NovikovScalar factorial_inverse(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return NovikovScalar::constant(1.0 / f);
}

Rational ceil_div(const Rational& a, const Rational& b) {
  Rational q = a / b;
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(c);
}

}  // namespace

ToricMirrorGeometry ToricMirrorGeometry::parse(const std::string& name) {
  if (name == "cp1" || name == "CP1" || name == "P1") return cp1();
  if (name == "c" || name == "C") return c();
  throw InputError("unknown geometry '" + name + "' (expected cp1 or c)");
}

std::vector<int> ToricMirrorGeometry::pairings() const {
  return kind == GeometryKind::CP1 ? std::vector<int>{1, -1} : std::vector<int>{1};
}

void ToricMirrorGeometry::validate_u(const Rational& u) const {
  if (kind == GeometryKind::CP1 && (sgn(u) <= 0 || u >= Rational(1)))
    throw HypothesisError("torus fiber position u must lie in (0, 1) for CP1, got " + to_string(u));
  if (kind == GeometryKind::C && sgn(u) <= 0)
    throw HypothesisError("torus fiber position u must be positive for C, got " + to_string(u));
}

std::vector<ainfty::DiskClassGenerator> ToricMirrorGeometry::disk_classes(const Rational& u) const {
  validate_u(u);
  if (kind == GeometryKind::CP1) return {{2, u, "beta1"}, {2, Rational(1) - u, "beta2"}};
  return {{2, u, "beta"}};
}

NovikovPolynomial critical_equation(const ToricMirrorGeometry& geom, const NovikovScalar& lambda) {
  if (auto v = lambda.valuation(); v && sgn(*v) <= 0)
    throw HypothesisError("Lagrangians collapse: val(lambda) must be positive");
  if (geom.kind == GeometryKind::CP1) return NovikovPolynomial({-T(), -lambda, NovikovScalar::constant(1.0)});
  return NovikovPolynomial({-lambda, NovikovScalar::constant(1.0)});
}

Brane brane_from_root(const ToricMirrorGeometry& geom, const NovikovScalar& root, const Rational& precision) {
  auto v = root.valuation();
  if (!v) throw HypothesisError("critical point X = 0 has no torus fiber");
  geom.validate_u(*v);
  Brane b;
  b.u = *v;
  b.c0 = root.leading_coefficient();
  b.b0 = std::log(b.c0);
  NovikovScalar cplus = (1.0 / b.c0) * root.shifted(-*v) - NovikovScalar::constant(1.0);
  const Rational cap = cplus.precision() ? *cplus.precision() : precision + Rational(1);
  b.b_plus = cplus.is_zero() ? cplus : novikov::log_one_plus(cplus, cap);
  return b;
}

NovikovScalar potential_variable(const Brane& brane, const Rational& precision) {
  const Rational cap = precision - brane.u;
  NovikovScalar e = brane.b_plus.is_zero() ? NovikovScalar::constant(1.0) : novikov::exp_plus(brane.b_plus, cap);
  return (brane.c0 * e.shifted(brane.u)).truncated(precision);
}

std::vector<CriticalPoint> solve_mirror(const ToricMirrorGeometry& geom, const NovikovScalar& lambda,
                                        const Rational& precision, bool degenerate) {
  if (sgn(precision) <= 0) throw InputError("precision must be positive");
  const NovikovPolynomial p = critical_equation(geom, lambda);
  std::vector<std::pair<NovikovScalar, bool>> roots;
  if (geom.kind == GeometryKind::C) {
    if (lambda.is_zero()) throw HypothesisError("no critical point of finite valuation (lambda = 0)");
    roots.emplace_back(lambda, false);
  } else {
    const auto seeds = novikov::root_seeds(p);
    const bool repeated = std::any_of(seeds.begin(), seeds.end(), [](const auto& s) { return s.multiplicity > 1; });
    const Rational target = precision + Rational(1);
    if (!repeated) {
      for (const auto& s : seeds) roots.emplace_back(novikov::newton_root(p, s.valuation, s.leading, target), false);
    } else {
      const NovikovScalar disc = lambda * lambda + NovikovScalar::monomial(4.0, Rational(1));
      if (disc.is_zero()) {
        if (!degenerate) throw HypothesisError("degenerate critical point, see Remark (degenerate)");
        roots.emplace_back((NovikovScalar::constant(0.5) * lambda).truncated(target), true);
      } else {
        // Leading terms collide but the roots differ: X = (lambda +- sqrt(disc)) / 2.
        const Rational vd = *disc.valuation();
        const NovikovPolynomial q({-disc, NovikovScalar::zero(), NovikovScalar::constant(1.0)});
        for (const auto& s : novikov::root_seeds(q)) {
          NovikovScalar y = novikov::newton_root(q, s.valuation, s.leading, target + vd);
          roots.emplace_back(NovikovScalar::constant(0.5) * (lambda + y), false);
        }
      }
    }
  }
  std::vector<CriticalPoint> out;
  for (auto& [r, dbl] : roots) {
    CriticalPoint cp;
    cp.brane = brane_from_root(geom, r, precision);
    cp.root = r.truncated(precision);
    cp.double_root = dbl;
    out.push_back(std::move(cp));
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.brane.u != b.brane.u) return a.brane.u < b.brane.u;
    if (std::abs(a.brane.c0.real() - b.brane.c0.real()) > 1e-9) return a.brane.c0.real() > b.brane.c0.real();
    return a.brane.c0.imag() > b.brane.c0.imag();
  });
  return out;
}

std::vector<Coefficient> holonomy(const ToricMirrorGeometry& geom, const Brane& brane) {
  if (geom.kind == GeometryKind::CP1) return {brane.c0, 1.0 / brane.c0};
  return {brane.c0};
}

ainfty::GappedAInfty model_algebra(const ToricMirrorGeometry& geom, const Rational& u, const Rational& energy_cutoff,
                                   int max_arity) {
  using ainfty::Scalar;
  ainfty::GradedBasis basis{{"1", "e1"}, {0, 1}, 0};
  ainfty::GappedAInfty a(basis, ainfty::GappedMonoid(geom.disk_classes(u), energy_cutoff), max_arity);
  a.declare_all();
  a.set(2, 0, {0, 0}, 0, Scalar(1));
  a.set(2, 0, {0, 1}, 1, Scalar(1));
  a.set(2, 0, {1, 0}, 1, Scalar(-1));
  const auto pair = geom.pairings();
  for (std::size_t j = 0; j < pair.size(); ++j) {
    ainfty::GappedMonoid::Element el(pair.size(), 0);
    el[j] = 1;
    const int beta = a.monoid().index(el);
    if (beta < 0) continue;  // above the cutoff
    // divisor axiom from m_{0,beta}(1) = 1
    Rational value(1);
    for (int k = 0; k <= max_arity; ++k) {
      if (k > 0) value = value * pair[j] / k;
      a.set(k, beta, std::vector<int>(k, 1), 0, Scalar(value));
    }
  }
  ainfty::GAction act;
  act.g = equivariant::LieAlgebraData::abelian(1);
  equivariant::CMatrix i(2, 2);
  i(0, 1) = Scalar(1);
  act.interior = {i};
  act.lie = {equivariant::CMatrix(2, 2)};
  a.action = act;
  return a;
}

DivisorReport check_divisor_axiom(const ToricMirrorGeometry& geom, const ainfty::GappedAInfty& a) {
  DivisorReport rep;
  const auto pair = geom.pairings();
  const auto& mon = a.monoid();
  if (mon.generators().size() != pair.size()) throw InputError("algebra does not match the geometry");
  for (const auto& [kb, t] : a.tensors()) {
    const auto& el = mon.elements()[kb.second];
    int total = 0, which = -1;
    for (std::size_t j = 0; j < el.size(); ++j) {
      total += el[j];
      if (el[j]) which = static_cast<int>(j);
    }
    const std::string where = "(" + std::to_string(kb.first) + "," + mon.label(kb.second) + ")";
    if (total != 1) {
      if (total > 1 && !t.entries.empty()) rep.failures.push_back(where + ": multiple-cover class carries operations");
      continue;
    }
    Rational expect(1);
    for (int k = 1; k <= kb.first; ++k) expect = expect * pair[which] / k;
    for (const auto& [key, v] : t.entries) {
      const bool all_e = std::all_of(key.begin(), key.end() - 1, [](int x) { return x == 1; });
      if (!all_e || key.back() != 0) rep.failures.push_back(where + ": unexpected entry");
    }
    std::vector<int> key(kb.first, 1);
    key.push_back(0);
    auto it = t.entries.find(key);
    const ainfty::Scalar got = it == t.entries.end() ? ainfty::Scalar{} : it->second;
    if (!(got == ainfty::Scalar(expect))) rep.failures.push_back(where + ": value differs from <d beta, e>^k / k!");
  }
  rep.pass = rep.failures.empty();
  return rep;
}

int required_arity(const Brane& brane, const Rational& precision, int k) {
  const int base = std::max(k, 2);
  auto v = brane.b_plus.valuation();
  if (!v) return base;
  const Rational l_stop = std::max(Rational(1), ceil_div(precision, *v));
  const long extra = l_stop.get_num().get_si() - 1;
  if (extra > 400) throw HypothesisError("arity budget exceeded: val(b+) too small for this precision");
  return base + static_cast<int>(extra);
}

std::vector<NovikovScalar> structure_constants(const ToricMirrorGeometry& geom, const Brane& brane,
                                               const NovikovScalar& lambda, int kmax, const Rational& precision) {
  if (kmax < 0) throw InputError("k must be nonnegative");
  const int K = required_arity(brane, precision, kmax);
  const auto a = model_algebra(geom, brane.u, precision, K);
  const auto c = ainfty::evaluate_lambda(a, {lambda}, precision, holonomy(geom, brane));
  const auto d = ainfty::deform(c, {NovikovScalar::zero(), brane.b_plus.truncated(precision)}, std::max(kmax, 2));
  std::vector<NovikovScalar> out;
  for (int k = 0; k <= kmax; ++k) out.push_back(d.get(k, std::vector<int>(k, 1), 0));
  out[0] = (out[0] - NovikovScalar::constant(brane.b0) * lambda).truncated(precision);
  return out;
}

NovikovScalar structure_constant(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda,
                                 int k, const Rational& precision) {
  return structure_constants(geom, brane, lambda, k, precision).at(k);
}

NovikovScalar closed_form(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda, int k,
                          const Rational& precision) {
  if (k < 0) throw InputError("k must be nonnegative");
  const NovikovScalar X = potential_variable(brane, precision);
  NovikovScalar r = X;
  if (geom.kind == GeometryKind::CP1) {
    const NovikovScalar t_over_x = T() * novikov::inverse(X, precision + brane.u);
    r = (k % 2 == 0) ? X + t_over_x : X - t_over_x;
  }
  if (k == 0) r -= lambda * brane.pairing();
  if (k == 1) r -= lambda;
  if (k >= 2) r = factorial_inverse(k) * r;
  return r.truncated(precision);
}

CliffordMatch clifford_match(const NovikovScalar& m2, const NovikovScalar& hessian, const Rational& precision) {
  Matrix<NovikovScalar> h(1, 1);
  h(0, 0) = hessian.truncated(precision);
  const auto cl = mf::CliffordAlgebra<NovikovScalar>::from_hessian(h);
  const auto sq = cl.multiply(cl.generator(0), cl.generator(0));
  CliffordMatch m;
  m.product = (-m2).truncated(precision);
  m.clifford = cl.coefficient(sq, 0).truncated(precision);
  m.hessian = h(0, 0);
  m.match = novikov::approx_equal_below(m.product, m.clifford, precision);
  return m;
}

CliffordMatch clifford_match(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda,
                             const Rational& precision) {
  const NovikovScalar m2 = structure_constant(geom, brane, lambda, 2, precision);
  if (m2.is_zero()) throw HypothesisError("Clifford comparison undefined for a degenerate brane");
  const NovikovScalar hessian = NovikovScalar::constant(2.0) * closed_form(geom, brane, lambda, 2, precision);
  return clifford_match(m2, hessian, precision);
}

BraneCategory brane_category(const ToricMirrorGeometry& geom, const std::vector<Brane>& branes,
                             const NovikovScalar& lambda, const Rational& precision) {
  BraneCategory cat;
  for (const auto& b : branes) {
    auto sc = structure_constants(geom, b, lambda, 2, precision);
    cat.curvatures.push_back(sc[0]);
    cat.m2.push_back(sc[2]);
  }
  const std::size_t n = branes.size();
  cat.homs.assign(n, std::vector<HomEntry>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      HomEntry& h = cat.homs[i][j];
      h.same_u = branes[i].u == branes[j].u;
      h.same_pairing = novikov::approx_equal_below(branes[i].pairing(), branes[j].pairing(), precision);
      h.same_curvature = novikov::approx_equal_below(cat.curvatures[i], cat.curvatures[j], precision);
      h.nonzero = h.same_u && h.same_pairing && h.same_curvature;
    }
  return cat;
}

CorrespondenceReport correspondence_report(const ToricMirrorGeometry& geom, const NovikovScalar& lambda,
                                           const Rational& precision, bool degenerate) {
  CorrespondenceReport rep;
  rep.geometry = geom;
  rep.lambda = lambda;
  rep.precision = precision;
  const auto points = solve_mirror(geom, lambda, precision, degenerate);
  std::vector<Brane> branes;
  for (const auto& p : points) branes.push_back(p.brane);
  const auto cat = brane_category(geom, branes, lambda, precision);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ReportRow row;
    row.root = points[i].root;
    row.brane = points[i].brane;
    const int kmax = points[i].double_root ? 6 : 2;
    const auto sc = structure_constants(geom, row.brane, lambda, kmax, precision);
    row.curvature = sc[0];
    row.m1 = sc[1];
    row.m2 = sc[2];
    if (points[i].double_root) {
      rep.degenerate = true;
      double f = 1.0;
      for (int k = 0; k <= kmax; ++k) {
        if (k > 1) f *= k;
        row.ladder.push_back(NovikovScalar::constant(f) * sc[k]);
      }
    } else {
      const NovikovScalar hessian = NovikovScalar::constant(2.0) * closed_form(geom, row.brane, lambda, 2, precision);
      row.clifford = clifford_match(row.m2, hessian, precision);
    }
    for (std::size_t j = 0; j < points.size(); ++j) row.hom_support.push_back(cat.homs[i][j].nonzero);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace eqhms::mirror
