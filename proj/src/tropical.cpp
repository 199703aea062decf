#include "eqhms/tropical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eqhms/error.hpp"
#include "eqhms/linalg.hpp"

namespace eqhms::tropical {

namespace {

std::string vec_str(const IntVec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

std::string set_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "}";
  return os.str();
}

// All k-subsets of {0..m-1}.
std::vector<std::vector<int>> subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > m) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Rational dot(const RatVec& a, const RatVec& b) {
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec to_rat(const IntVec& v) {
  RatVec r;
  for (auto x : v) r.emplace_back(x);
  return r;
}

// Scale to the unique representative with first nonzero entry of absolute value 1.
RatVec normalize_direction(RatVec d) {
  for (const auto& x : d) {
    if (sgn(x) != 0) {
      Rational s = abs(x);
      for (auto& y : d) y /= s;
      break;
    }
  }
  return d;
}

Matrix<Rational> ray_matrix(const Fan& fan, const std::vector<int>& idx) {
  // columns are the rays
  Matrix<Rational> m(fan.n, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j)
    for (int i = 0; i < fan.n; ++i) m(i, j) = Rational(fan.rays[idx[j]][i]);
  return m;
}

// Normal of the hyperplane through n-1 independent rays, or nullopt.
std::optional<RatVec> wall_normal(const Fan& fan, const std::vector<int>& wall) {
  Matrix<Rational> m(wall.size(), fan.n);
  for (std::size_t r = 0; r < wall.size(); ++r)
    for (int i = 0; i < fan.n; ++i) m(r, i) = Rational(fan.rays[wall[r]][i]);
  auto k = kernel_basis(m);
  if (k.size() != 1) return std::nullopt;
  return k[0];
}

// m with <m, v_i> = phi(v_i) on the rays of the cone.
RatVec linear_extension(const Fan& fan, const RatVec& phi, const std::vector<int>& cone) {
  auto t = ray_matrix(fan, cone).transpose();
  std::vector<Rational> rhs;
  for (int i : cone) rhs.push_back(phi[i]);
  auto x = solve(t, rhs);
  if (!x) throw std::logic_error("linear extension on a singular cone");
  return *x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fans

void Fan::check_shape() const {
  if (n < 1) throw InputError("fan: ambient rank must be positive");
  if (rays.empty()) throw InputError("fan: no rays");
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (static_cast<int>(rays[i].size()) != n) throw InputError("fan: ray " + std::to_string(i) + " has wrong length");
    if (std::all_of(rays[i].begin(), rays[i].end(), [](long x) { return x == 0; }))
      throw InputError("fan: ray " + std::to_string(i) + " is zero");
  }
  if (max_cones.empty()) throw InputError("fan: no maximal cones");
  for (const auto& c : max_cones) {
    if (c.empty()) throw InputError("fan: empty maximal cone");
    std::set<int> seen;
    for (int i : c) {
      if (i < 0 || i >= static_cast<int>(rays.size()))
        throw InputError("fan: ray index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second) throw InputError("fan: repeated ray in cone " + set_str(c));
    }
  }
}

std::vector<std::vector<int>> Fan::cones() const {
  std::set<std::vector<int>> out;
  for (const auto& c : max_cones) {
    std::vector<int> s = c;
    std::sort(s.begin(), s.end());
    const int k = s.size();
    for (int mask = 1; mask < (1 << k); ++mask) {
      std::vector<int> face;
      for (int j = 0; j < k; ++j)
        if (mask & (1 << j)) face.push_back(s[j]);
      out.insert(face);
    }
  }
  return {out.begin(), out.end()};
}

bool Fan::spans_cone(std::vector<int> subset) const {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (const auto& c : max_cones) {
    std::vector<int> s = c;
    std::sort(s.begin(), s.end());
    if (std::includes(s.begin(), s.end(), subset.begin(), subset.end())) return true;
  }
  return false;
}

namespace fans {

NamedFan p1() { return {"P1", Fan{1, {{1}, {-1}}, {{0}, {1}}}, {Rational(0), Rational(1)}}; }

NamedFan c() { return {"C", Fan{1, {{1}}, {{0}}}, {Rational(0)}}; }

NamedFan cn(int n) {
  Fan f;
  f.n = n;
  std::vector<int> all;
  for (int i = 0; i < n; ++i) {
    IntVec e(n, 0);
    e[i] = 1;
    f.rays.push_back(e);
    all.push_back(i);
  }
  f.max_cones = {all};
  return {"C" + std::to_string(n), f, RatVec(n, Rational(0))};
}

NamedFan p2() {
  return {"P2", Fan{2, {{1, 0}, {0, 1}, {-1, -1}}, {{0, 1}, {1, 2}, {2, 0}}}, {Rational(0), Rational(0), Rational(1)}};
}

NamedFan p1xp1() {
  return {"P1xP1", Fan{2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}},
          {Rational(0), Rational(0), Rational(1), Rational(1)}};
}

NamedFan hirzebruch(int a) {
  return {"F" + std::to_string(a), Fan{2, {{1, 0}, {0, 1}, {-1, a}, {0, -1}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}},
          {Rational(0), Rational(0), Rational(1), Rational(1)}};
}

NamedFan bl0c2() {
  return {"Bl0C2", Fan{2, {{1, 0}, {1, 1}, {0, 1}}, {{0, 1}, {1, 2}}}, {Rational(0), Rational(-1), Rational(0)}};
}

}  // namespace fans

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(const Fan& fan, const RatVec& phi) {
  fan.check_shape();
  ValidationReport rep;
  auto issue = [&](bool& flag, const std::string& check, const std::string& witness) {
    flag = false;
    rep.issues.push_back({check, witness});
  };

  for (std::size_t i = 0; i < fan.rays.size(); ++i) {
    long g = 0;
    for (auto x : fan.rays[i]) g = std::gcd(g, std::labs(x));
    if (g != 1) issue(rep.primitive, "primitive", "ray " + std::to_string(i) + " = " + vec_str(fan.rays[i]));
  }

  if (phi.size() != fan.rays.size())
    issue(rep.pl_consistent, "pl_consistent",
          "phi has " + std::to_string(phi.size()) + " values for " + std::to_string(fan.rays.size()) + " rays");

  bool cones_ok = true;
  for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
    const auto& cone = fan.max_cones[c];
    if (static_cast<int>(cone.size()) != fan.n) {
      issue(rep.full_dimensional, "full_dimensional",
            "maximal cone " + set_str(cone) + " has " + std::to_string(cone.size()) + " rays");
      cones_ok = false;
      continue;
    }
    Rational d = determinant(ray_matrix(fan, cone));
    if (abs(d) != Rational(1)) {
      issue(rep.unimodular, "unimodular", "maximal cone " + set_str(cone) + " has det " + d.get_str());
      cones_ok = false;
    }
  }
  if (!cones_ok || !rep.pl_consistent) return rep;

  // Walls: (n-1)-faces, with the maximal cones containing them.
  std::map<std::vector<int>, std::vector<int>> walls;
  for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
    std::vector<int> s = fan.max_cones[c];
    std::sort(s.begin(), s.end());
    for (int drop = 0; drop < fan.n; ++drop) {
      std::vector<int> w;
      for (int j = 0; j < fan.n; ++j)
        if (j != drop) w.push_back(s[j]);
      walls[w].push_back(c);
    }
  }

  auto opposite = [&](int c, const std::vector<int>& wall) {
    for (int i : fan.max_cones[c])
      if (!std::binary_search(wall.begin(), wall.end(), i)) return i;
    return -1;
  };

  for (const auto& [wall, owners] : walls) {
    auto normal = wall_normal(fan, wall);
    if (!normal) throw std::logic_error("wall of a unimodular cone is degenerate");
    if (owners.size() > 2) {
      issue(rep.full_dimensional, "full_dimensional", "wall " + set_str(wall) + " lies in more than two maximal cones");
      continue;
    }
    if (owners.size() == 2) {
      const int a = opposite(owners[0], wall), b = opposite(owners[1], wall);
      const int sa = sgn(dot(*normal, to_rat(fan.rays[a]))), sb = sgn(dot(*normal, to_rat(fan.rays[b])));
      if (sa * sb >= 0)
        issue(rep.full_dimensional, "full_dimensional",
              "maximal cones " + set_str(fan.max_cones[owners[0]]) + " and " + set_str(fan.max_cones[owners[1]]) +
                  " overlap across wall " + set_str(wall));
      for (int k = 0; k < 2; ++k) {
        const int own = owners[k], other = owners[1 - k];
        const int r = opposite(other, wall);
        RatVec m = linear_extension(fan, phi, fan.max_cones[own]);
        if (!(dot(m, to_rat(fan.rays[r])) < phi[r]))
          issue(rep.strictly_convex, "strictly_convex",
                "extension from cone " + set_str(fan.max_cones[own]) + " does not underestimate phi at ray " +
                    std::to_string(r));
      }
    } else {
      // boundary wall: the support stays on one side
      const int a = opposite(owners[0], wall);
      const int side = sgn(dot(*normal, to_rat(fan.rays[a])));
      for (std::size_t i = 0; i < fan.rays.size(); ++i) {
        if (sgn(dot(*normal, to_rat(fan.rays[i]))) * side < 0) {
          issue(rep.full_dimensional, "full_dimensional",
                "support is not convex: ray " + std::to_string(i) + " lies beyond boundary wall " + set_str(wall));
          break;
        }
      }
    }
  }
  return rep;
}

void require_valid(const Fan& fan, const RatVec& phi) {
  auto rep = validate(fan, phi);
  if (!rep.pass()) throw InputError("invalid fan: " + rep.issues[0].check + " fails (" + rep.issues[0].witness + ")");
}

// ---------------------------------------------------------------------------
// Exact LP by enumeration

Rational HalfSpace::operator()(const RatVec& u) const { return dot(a, u) + b; }

std::vector<RatVec> polyhedron_vertices(int n, const std::vector<HalfSpace>& cs) {
  std::set<RatVec> out;
  for (const auto& idx : subsets(cs.size(), n)) {
    Matrix<Rational> m(n, n);
    std::vector<Rational> rhs(n);
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) m(r, j) = cs[idx[r]].a[j];
      rhs[r] = -cs[idx[r]].b;
    }
    if (rank(m) != static_cast<std::size_t>(n)) continue;
    auto x = solve(m, rhs);
    if (!x) continue;
    bool feasible = std::all_of(cs.begin(), cs.end(), [&](const HalfSpace& h) { return sgn(h(*x)) >= 0; });
    if (feasible) out.insert(*x);
  }
  return {out.begin(), out.end()};
}

std::vector<RatVec> recession_rays(int n, const std::vector<HalfSpace>& cs) {
  std::set<RatVec> out;
  auto feasible = [&](const RatVec& d) {
    return std::all_of(cs.begin(), cs.end(), [&](const HalfSpace& h) { return sgn(dot(h.a, d)) >= 0; });
  };
  for (const auto& idx : subsets(cs.size(), n - 1)) {
    Matrix<Rational> m(n - 1, n);
    for (int r = 0; r < n - 1; ++r)
      for (int j = 0; j < n; ++j) m(r, j) = cs[idx[r]].a[j];
    auto k = kernel_basis(m);
    if (k.size() != 1) continue;
    RatVec d = k[0];
    RatVec nd = d;
    for (auto& x : nd) x = -x;
    if (feasible(d)) out.insert(normalize_direction(d));
    if (feasible(nd)) out.insert(normalize_direction(nd));
  }
  return {out.begin(), out.end()};
}

std::optional<Rational> minimize(int n, const std::vector<HalfSpace>& cs, const HalfSpace& obj) {
  auto verts = polyhedron_vertices(n, cs);
  if (verts.empty()) return std::nullopt;
  for (const auto& r : recession_rays(n, cs))
    if (sgn(dot(obj.a, r)) < 0) throw std::logic_error("minimize: objective unbounded below");
  Rational best = obj(verts[0]);
  for (const auto& v : verts) best = std::min(best, obj(v));
  return best;
}

bool MirrorPolyhedron::contains(const RatVec& u) const {
  return std::all_of(defining.begin(), defining.end(), [&](const HalfSpace& h) { return sgn(h(u)) >= 0; });
}

bool MirrorPolyhedron::interior(const RatVec& u) const {
  return std::all_of(defining.begin(), defining.end(), [&](const HalfSpace& h) { return sgn(h(u)) > 0; });
}

namespace {

std::vector<HalfSpace> defining_functions(const Fan& fan, const RatVec& phi) {
  std::vector<HalfSpace> ls;
  for (std::size_t i = 0; i < fan.rays.size(); ++i) ls.push_back({to_rat(fan.rays[i]), phi[i]});
  return ls;
}

}  // namespace

MirrorPolyhedron polyhedron(const Fan& fan, const RatVec& phi) {
  require_valid(fan, phi);
  MirrorPolyhedron p;
  p.n = fan.n;
  p.defining = defining_functions(fan, phi);
  p.vertices = polyhedron_vertices(fan.n, p.defining);
  p.rays = recession_rays(fan.n, p.defining);
  return p;
}

EpsilonReport epsilon_P(const Fan& fan, const RatVec& phi) {
  require_valid(fan, phi);
  const auto ls = defining_functions(fan, phi);
  EpsilonReport rep;
  for (const auto& tau : fan.cones()) {
    std::vector<int> far;
    for (int i = 0; i < static_cast<int>(fan.rays.size()); ++i) {
      if (std::binary_search(tau.begin(), tau.end(), i)) continue;
      auto s = tau;
      s.push_back(i);
      if (!fan.spans_cone(s)) far.push_back(i);
    }
    if (far.empty()) continue;
    std::vector<HalfSpace> cs = ls;
    for (int i : tau) {
      for (int j : far) {
        RatVec a(fan.n);
        for (int k = 0; k < fan.n; ++k) a[k] = ls[j].a[k] - ls[i].a[k];
        cs.push_back({a, ls[j].b - ls[i].b});
      }
    }
    for (int j : far) {
      auto v = minimize(fan.n, cs, ls[j]);
      if (!v) continue;
      if (!rep.value || *v < *rep.value) {
        rep.value = *v;
        rep.tau = tau;
        rep.ray = j;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tropical critical points

std::vector<IntVec> dual_basis(const Fan& fan, int cone) {
  const auto& c = fan.max_cones.at(cone);
  auto e = ray_matrix(fan, c);
  std::vector<IntVec> rows(fan.n, IntVec(fan.n));
  for (int i = 0; i < fan.n; ++i) {
    std::vector<Rational> unit(fan.n, Rational(0));
    unit[i] = Rational(1);
    // row i of E^{-1}: solve E^T f = e_i
    auto f = solve(e.transpose(), unit);
    if (!f) throw InputError("dual basis: cone " + set_str(c) + " is singular");
    for (int k = 0; k < fan.n; ++k) {
      if ((*f)[k].get_den() != 1) throw InputError("dual basis: cone " + set_str(c) + " is not unimodular");
      rows[i][k] = (*f)[k].get_num().get_si();
    }
  }
  return rows;
}

std::vector<NovikovScalar> lambda_sigma(const Fan& fan, int cone, const std::vector<NovikovScalar>& lambda) {
  if (static_cast<int>(lambda.size()) != fan.n)
    throw InputError("lambda has " + std::to_string(lambda.size()) + " components, expected " +
                     std::to_string(fan.n));
  auto f = dual_basis(fan, cone);
  std::vector<NovikovScalar> out;
  for (int i = 0; i < fan.n; ++i) {
    NovikovScalar s;
    for (int k = 0; k < fan.n; ++k)
      if (f[i][k] != 0) s += Coefficient(static_cast<double>(f[i][k])) * lambda[k];
    out.push_back(s);
  }
  return out;
}

namespace {

// Empty when admissible, else a description of the first violation.
std::string admissibility_violation(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda,
                                    const std::optional<Rational>& eps) {
  for (int c = 0; c < static_cast<int>(fan.max_cones.size()); ++c) {
    auto ls = lambda_sigma(fan, c, lambda);
    for (int i = 0; i < fan.n; ++i) {
      auto v = ls[i].valuation();
      std::string where = "cone " + set_str(fan.max_cones[c]) + ", i = " + std::to_string(i);
      if (!v) return where + ": lambda_i^sigma = 0";
      if (sgn(*v) <= 0) return where + ": val(lambda_i^sigma) = " + v->get_str() + " <= 0";
      if (eps && !(*v < *eps))
        return where + ": val(lambda_i^sigma) = " + v->get_str() + " >= eps_P = " + eps->get_str();
    }
  }
  (void)phi;
  return {};
}

}  // namespace

bool admissible(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda) {
  auto eps = epsilon_P(fan, phi);
  return admissibility_violation(fan, phi, lambda, eps.value).empty();
}

TropicalCriticalSet tropical_critical_points(const Fan& fan, const RatVec& phi,
                                             const std::vector<NovikovScalar>& lambda) {
  auto eps = epsilon_P(fan, phi);
  auto bad = admissibility_violation(fan, phi, lambda, eps.value);
  if (!bad.empty()) throw HypothesisError("tropical hypothesis eps_P > val(lambda_i^sigma) > 0 fails at " + bad);
  TropicalCriticalSet out;
  out.epsilon = eps.value;
  for (int c = 0; c < static_cast<int>(fan.max_cones.size()); ++c) {
    ConePoint pt;
    pt.cone = c;
    pt.dual = dual_basis(fan, c);
    pt.lambda_sigma = lambda_sigma(fan, c, lambda);
    const auto& cone = fan.max_cones[c];
    Matrix<Rational> m(fan.n, fan.n);
    std::vector<Rational> rhs(fan.n);
    for (int i = 0; i < fan.n; ++i) {
      pt.valuations.push_back(*pt.lambda_sigma[i].valuation());
      for (int k = 0; k < fan.n; ++k) m(i, k) = Rational(fan.rays[cone[i]][k]);
      rhs[i] = pt.valuations[i] - phi[cone[i]];
    }
    pt.u = *solve(m, rhs);
    out.points.push_back(std::move(pt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mirror polynomial and initial terms

MirrorPolynomial mirror_potential(const Fan& fan, const RatVec& phi, const std::vector<Coefficient>& c,
                                  const std::vector<Perturbation>& perturbations) {
  fan.check_shape();
  const std::size_t m = fan.rays.size();
  if (!c.empty() && c.size() != m) throw InputError("mirror coefficients: expected one per ray");
  MirrorPolynomial f;
  for (std::size_t i = 0; i < m; ++i) {
    Coefficient ci = c.empty() ? Coefficient(1.0) : c[i];
    if (ci == Coefficient(0.0)) throw InputError("mirror coefficients must be nonzero");
    f[fan.rays[i]] += NovikovScalar::monomial(ci, phi[i]);
  }
  for (const auto& p : perturbations) {
    if (p.exponents.size() != m) throw InputError("perturbation: expected one exponent per ray");
    auto v = p.coefficient.valuation();
    if (v && sgn(*v) <= 0) throw InputError("perturbation coefficients need positive valuation (|F - Fbar| < 1)");
    IntVec lattice(fan.n, 0);
    Rational shift(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (p.exponents[i] < 0) throw InputError("perturbation exponents must be nonnegative");
      for (int k = 0; k < fan.n; ++k) lattice[k] += p.exponents[i] * fan.rays[i][k];
      shift += Rational(p.exponents[i]) * phi[i];
    }
    f[lattice] += p.coefficient.shifted(shift);
  }
  for (auto it = f.begin(); it != f.end();) it = it->second.is_zero() ? f.erase(it) : std::next(it);
  return f;
}

InitialTerm initial_term(const MirrorPolynomial& f, const RatVec& u, const std::optional<std::vector<IntVec>>& tau) {
  InitialTerm out;
  std::optional<Matrix<Rational>> gens;
  if (tau) {
    if (tau->empty()) {
      gens.reset();
    } else {
      Matrix<Rational> g(u.size(), tau->size());
      for (std::size_t j = 0; j < tau->size(); ++j) {
        if ((*tau)[j].size() != u.size()) throw InputError("initial_term: cone generator of wrong length");
        for (std::size_t i = 0; i < u.size(); ++i) g(i, j) = Rational((*tau)[j][i]);
      }
      if (rank(g) != tau->size()) throw InputError("initial_term: cone generators must be independent");
      gens = g;
    }
  }
  auto in_tau = [&](const IntVec& v) {
    if (!tau) return true;
    if (!gens) return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
    auto x = solve(*gens, to_rat(v));
    return x && std::all_of(x->begin(), x->end(), [](const Rational& r) { return sgn(r) >= 0; });
  };
  for (const auto& [v, c] : f) {
    if (c.is_zero() || !in_tau(v)) continue;
    if (v.size() != u.size()) throw InputError("initial_term: point and lattice dimensions differ");
    Rational val = dot(u, to_rat(v)) + *c.valuation();
    if (!out.minimum || val < *out.minimum) {
      out.minimum = val;
      out.terms.clear();
    }
    if (val == *out.minimum) out.terms[v] = c.leading_coefficient();
  }
  out.in_trop = out.terms.size() != 1;
  return out;
}

// ---------------------------------------------------------------------------
// Hensel lifting

namespace {

struct CapOps {
  Rational cap;
  NovikovScalar t(const NovikovScalar& a) const { return a.truncated(cap); }
  NovikovScalar mul(const NovikovScalar& a, const NovikovScalar& b) const { return (a * b).truncated(cap); }
};

// x with A x = b for A = I + (positive valuation), up to the cap.
std::vector<NovikovScalar> solve_unit(std::vector<std::vector<NovikovScalar>> a, std::vector<NovikovScalar> b,
                                      const CapOps& ops, NovikovScalar* det) {
  const std::size_t n = b.size();
  NovikovScalar d = NovikovScalar::constant(1.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t r = c; r < n; ++r) {
      auto v = a[r][c].valuation();
      if (v && sgn(*v) == 0) {
        piv = r;
        break;
      }
    }
    if (piv == n) throw HypothesisError("degenerate logarithmic Hessian at the lift");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (piv != c) d = -d;
    d = ops.mul(d, a[c][c]);
    NovikovScalar inv = novikov::inverse(a[c][c], ops.cap);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      NovikovScalar f = ops.mul(a[r][c], inv);
      for (std::size_t j = c; j < n; ++j) a[r][j] = ops.t(a[r][j] - ops.mul(f, a[c][j]));
      b[r] = ops.t(b[r] - ops.mul(f, b[c]));
    }
    for (std::size_t j = c; j < n; ++j) a[c][j] = ops.mul(a[c][j], inv);
    b[c] = ops.mul(b[c], inv);
  }
  if (det) *det = d;
  return b;
}

IntVec apply_rows(const std::vector<IntVec>& rows, const IntVec& v) {
  IntVec out(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) out[i] += rows[i][k] * v[k];
  return out;
}

}  // namespace

HenselLift hensel_lift_critical(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda, int cone,
                                const Rational& precision, const MirrorPolynomial& f) {
  if (sgn(precision) <= 0) throw InputError("precision must be positive");
  if (cone < 0 || cone >= static_cast<int>(fan.max_cones.size())) throw InputError("cone index out of range");
  auto crit = tropical_critical_points(fan, phi, lambda);
  const auto& pt = crit.points[cone];
  const int n = fan.n;
  const auto& rays = fan.max_cones[cone];

  // Seeds w_j = y^{e_j} ~ s_j from the leading balance c_{e_j} w_j = lambda_j^sigma.
  std::vector<NovikovScalar> seed;
  for (int j = 0; j < n; ++j) {
    auto it = f.find(fan.rays[rays[j]]);
    if (it == f.end() || it->second.is_zero())
      throw HypothesisError("mirror potential has no term at ray " + std::to_string(rays[j]));
    const auto& c = it->second;
    seed.push_back(NovikovScalar::monomial(pt.lambda_sigma[j].leading_coefficient() / c.leading_coefficient(),
                                           pt.valuations[j] - *c.valuation()));
  }

  Rational max_val(0), min_u(0);
  for (const auto& v : pt.valuations) max_val = std::max(max_val, v);
  for (const auto& x : pt.u) min_u = std::min(min_u, x);
  const CapOps ops{precision + Rational(2) + max_val - min_u};

  // terms in w-coordinates: coefficient, exponent F v, and v itself
  struct WTerm {
    NovikovScalar coeff;
    IntVec a;
    IntVec v;
  };
  std::vector<WTerm> terms;
  for (const auto& [v, c] : f) {
    if (static_cast<int>(v.size()) != n) throw InputError("mirror polynomial lattice dimension differs from the fan");
    IntVec a = apply_rows(pt.dual, v);
    NovikovScalar s = c;
    for (int j = 0; j < n; ++j) s = s * novikov::pow(seed[j], a[j]);
    terms.push_back({s, a, v});
  }

  std::vector<NovikovScalar> eps(n);  // w_j = s_j (1 + eps_j)
  std::vector<NovikovScalar> norm(n);
  for (int i = 0; i < n; ++i)
    norm[i] = NovikovScalar::monomial(Coefficient(1.0) / pt.lambda_sigma[i].leading_coefficient(), -pt.valuations[i]);

  auto monomial_values = [&]() {
    std::map<std::pair<int, long>, NovikovScalar> cache;
    std::vector<NovikovScalar> vals;
    for (const auto& t : terms) {
      NovikovScalar x = t.coeff;
      for (int j = 0; j < n; ++j) {
        if (t.a[j] == 0) continue;
        auto key = std::make_pair(j, t.a[j]);
        auto it = cache.find(key);
        if (it == cache.end())
          it = cache.emplace(key, novikov::pow(NovikovScalar::constant(1.0) + eps[j], t.a[j], ops.cap)).first;
        x = ops.mul(x, it->second);
      }
      vals.push_back(ops.t(x));
    }
    return vals;
  };

  HenselLift out;
  out.cone = cone;
  out.u = pt.u;
  bool converged = false;
  for (int it = 1; it <= 64 && !converged; ++it) {
    out.iterations = it;
    auto vals = monomial_values();
    std::vector<NovikovScalar> g(n);
    std::vector<std::vector<NovikovScalar>> h(n, std::vector<NovikovScalar>(n));
    for (std::size_t t = 0; t < terms.size(); ++t) {
      for (int i = 0; i < n; ++i) {
        if (terms[t].a[i] == 0) continue;
        // <f_i, v> = (F v)_i
        NovikovScalar gi = Coefficient(static_cast<double>(terms[t].a[i])) * vals[t];
        g[i] += gi;
        for (int j = 0; j < n; ++j)
          if (terms[t].a[j] != 0) h[i][j] += Coefficient(static_cast<double>(terms[t].a[j])) * gi;
      }
    }
    // residuals at roundoff level relative to the summed terms count as zero
    std::vector<double> scale(n, 1.0);
    for (std::size_t t = 0; t < terms.size(); ++t)
      for (int i = 0; i < n; ++i)
        if (terms[t].a[i] != 0)
          scale[i] = std::max(scale[i], std::abs(double(terms[t].a[i])) * vals[t].max_abs_coefficient() *
                                            std::abs(norm[i].leading_coefficient()));
    bool small = true;
    for (int i = 0; i < n; ++i) {
      g[i] = ops.t(ops.mul(norm[i], g[i] - pt.lambda_sigma[i]));
      for (int j = 0; j < n; ++j) h[i][j] = ops.t(ops.mul(norm[i], h[i][j]));
      if (!g[i].is_zero() && g[i].max_abs_coefficient() > 1e-11 * scale[i]) small = false;
    }
    for (auto& x : g) x = -x;
    auto delta = solve_unit(h, g, ops, &out.hessian_det);
    if (small) {
      converged = true;
      break;
    }
    bool moved = false;
    for (int j = 0; j < n; ++j) {
      if (delta[j].is_zero()) continue;
      auto v = delta[j].valuation();
      if (sgn(*v) <= 0) throw HypothesisError("Newton step left the residue disc; the seed is not simple");
      moved = true;
      eps[j] = ops.t(eps[j] + delta[j] + ops.mul(eps[j], delta[j]));
    }
    if (!moved) converged = true;
  }
  if (!converged) throw HypothesisError("Newton iteration stalled");

  auto dv = out.hessian_det.valuation();
  out.nondegenerate = dv && sgn(*dv) == 0;
  if (!out.nondegenerate) throw HypothesisError("degenerate logarithmic Hessian at the lift");

  // y_k = w^{F e_k}
  for (int k = 0; k < n; ++k) {
    IntVec e(n, 0);
    e[k] = 1;
    IntVec a = apply_rows(pt.dual, e);
    NovikovScalar y = NovikovScalar::constant(1.0);
    for (int j = 0; j < n; ++j) {
      if (a[j] == 0) continue;
      y = y * novikov::pow(seed[j], a[j]);
      y = ops.mul(y, novikov::pow(NovikovScalar::constant(1.0) + eps[j], a[j], ops.cap));
    }
    out.y.push_back(y.truncated(precision));
  }
  auto vals = monomial_values();
  for (int k = 0; k < n; ++k) {
    NovikovScalar r = -lambda[k];
    for (std::size_t t = 0; t < terms.size(); ++t)
      if (terms[t].v[k] != 0) r += Coefficient(static_cast<double>(terms[t].v[k])) * vals[t];
    out.residual.push_back(r.truncated(precision));
  }
  return out;
}

HenselLift hensel_lift_critical(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda, int cone,
                                const Rational& precision) {
  return hensel_lift_critical(fan, phi, lambda, cone, precision, mirror_potential(fan, phi));
}

// ---------------------------------------------------------------------------
// Jacobian count

std::vector<NovikovScalar> sample_lambda(const RatVec& valuations) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (valuations.size() > std::size(primes)) throw InputError("sample_lambda: rank too large");
  std::vector<NovikovScalar> out;
  for (std::size_t k = 0; k < valuations.size(); ++k)
    out.push_back(NovikovScalar::monomial(std::sqrt(static_cast<double>(primes[k])), valuations[k]));
  return out;
}

Rational default_valuation(const Fan& fan, const RatVec& phi) {
  auto eps = epsilon_P(fan, phi);
  Rational m = eps.value ? std::min(*eps.value, Rational(1)) : Rational(1);
  return m / 2;
}

namespace {

int lifted_count(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda, const Rational& E) {
  auto crit = tropical_critical_points(fan, phi, lambda);
  std::set<RatVec> distinct;
  for (const auto& p : crit.points) distinct.insert(p.u);
  if (distinct.size() != crit.points.size()) throw std::logic_error("tropical critical points collide");
  const auto f = mirror_potential(fan, phi);
  int count = 0;
  for (int c = 0; c < static_cast<int>(fan.max_cones.size()); ++c) {
    auto lift = hensel_lift_critical(fan, phi, lambda, c, E, f);
    bool ok = std::all_of(lift.residual.begin(), lift.residual.end(),
                          [](const NovikovScalar& r) { return r.max_abs_coefficient() < 1e-8; });
    if (ok && lift.nondegenerate) ++count;  // non-degenerate points have multiplicity one
  }
  return count;
}

}  // namespace

JacobianCount jacobian_count(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda,
                             const Rational& precision) {
  require_valid(fan, phi);
  JacobianCount out;
  out.max_cones = fan.max_cones.size();
  auto eps = epsilon_P(fan, phi);
  if (admissibility_violation(fan, phi, lambda, eps.value).empty()) {
    out.count = lifted_count(fan, phi, lambda, precision);
  } else {
    out.sampled = true;
    const Rational a = default_valuation(fan, phi);
    RatVec flat(fan.n, a), graded;
    for (int k = 0; k < fan.n; ++k) graded.push_back(a * Rational(k + 1) / Rational(fan.n + 1));
    for (const auto& vals : {flat, graded}) out.sample_counts.push_back(lifted_count(fan, phi, sample_lambda(vals), precision));
    if (out.sample_counts[0] != out.sample_counts[1])
      throw std::logic_error("Jacobian dimension differs between compliant samples");
    out.count = out.sample_counts[0];
  }
  out.equal = out.count == out.max_cones;
  return out;
}

JacobianCount jacobian_count(const Fan& fan, const RatVec& phi, const Rational& precision) {
  return jacobian_count(fan, phi, sample_lambda(RatVec(fan.n, default_valuation(fan, phi))), precision);
}

}  // namespace eqhms::tropical
