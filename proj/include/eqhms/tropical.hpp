#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqhms/novikov.hpp"
#include "eqhms/rational.hpp"

namespace eqhms::tropical {

using novikov::Coefficient;
using novikov::NovikovScalar;
using IntVec = std::vector<long>;
using RatVec = std::vector<Rational>;

struct Fan {
  int n = 0;
  std::vector<IntVec> rays;
  std::vector<std::vector<int>> max_cones;

  // Every nonzero face, as sorted ray-index sets.
  std::vector<std::vector<int>> cones() const;
  bool spans_cone(std::vector<int> rays_subset) const;
  void check_shape() const;  // InputError on malformed indices or dimensions
};

struct NamedFan {
  std::string name;
  Fan fan;
  RatVec phi;
};

namespace fans {
NamedFan p1();
NamedFan c();
NamedFan cn(int n);
NamedFan p2();
NamedFan p1xp1();
NamedFan hirzebruch(int a);
NamedFan bl0c2();
}  // namespace fans

struct ValidationIssue {
  std::string check;
  std::string witness;
};

struct ValidationReport {
  bool primitive = true;
  bool unimodular = true;
  bool full_dimensional = true;
  bool pl_consistent = true;
  bool strictly_convex = true;
  std::vector<ValidationIssue> issues;
  bool pass() const { return issues.empty(); }
};

ValidationReport validate(const Fan& fan, const RatVec& phi);
void require_valid(const Fan& fan, const RatVec& phi);

// a.u + b >= 0
struct HalfSpace {
  RatVec a;
  Rational b;
  Rational operator()(const RatVec& u) const;
};

std::vector<RatVec> polyhedron_vertices(int n, const std::vector<HalfSpace>& cs);
std::vector<RatVec> recession_rays(int n, const std::vector<HalfSpace>& cs);
// Minimum of obj over the polyhedron, nullopt when it is empty.
std::optional<Rational> minimize(int n, const std::vector<HalfSpace>& cs, const HalfSpace& obj);

struct MirrorPolyhedron {
  int n = 0;
  std::vector<HalfSpace> defining;  // l_i(u) = <u, v_i> + phi(v_i)
  std::vector<RatVec> vertices;
  std::vector<RatVec> rays;
  bool contains(const RatVec& u) const;
  bool interior(const RatVec& u) const;
};

MirrorPolyhedron polyhedron(const Fan& fan, const RatVec& phi);

struct EpsilonReport {
  std::optional<Rational> value;  // nullopt is +infinity
  std::vector<int> tau;           // an attaining cone and ray
  int ray = -1;
};

EpsilonReport epsilon_P(const Fan& fan, const RatVec& phi);

// Dual basis of the cone generated by the listed rays, as rows.
std::vector<IntVec> dual_basis(const Fan& fan, int cone);

struct ConePoint {
  int cone = 0;
  std::vector<IntVec> dual;
  std::vector<NovikovScalar> lambda_sigma;
  RatVec valuations;
  RatVec u;
};

struct TropicalCriticalSet {
  std::optional<Rational> epsilon;
  std::vector<ConePoint> points;
};

std::vector<NovikovScalar> lambda_sigma(const Fan& fan, int cone, const std::vector<NovikovScalar>& lambda);
bool admissible(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda);
TropicalCriticalSet tropical_critical_points(const Fan& fan, const RatVec& phi,
                                             const std::vector<NovikovScalar>& lambda);

using MirrorPolynomial = std::map<IntVec, NovikovScalar>;

struct Perturbation {
  std::vector<long> exponents;  // one per ray, Z_1^{b_1} ... Z_m^{b_m}
  NovikovScalar coefficient;
};

MirrorPolynomial mirror_potential(const Fan& fan, const RatVec& phi, const std::vector<Coefficient>& c = {},
                                  const std::vector<Perturbation>& perturbations = {});

struct InitialTerm {
  std::map<IntVec, Coefficient> terms;
  std::optional<Rational> minimum;
  bool in_trop = true;  // not a monomial, including the zero case
};

InitialTerm initial_term(const MirrorPolynomial& f, const RatVec& u,
                         const std::optional<std::vector<IntVec>>& tau = std::nullopt);

struct HenselLift {
  int cone = 0;
  RatVec u;
  std::vector<NovikovScalar> y;         // standard coordinates y^{e_k}
  std::vector<NovikovScalar> residual;  // d_{e_k^*} f - lambda_k
  NovikovScalar hessian_det;            // normalized logarithmic Hessian
  bool nondegenerate = false;
  int iterations = 0;
};

HenselLift hensel_lift_critical(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda, int cone,
                                const Rational& precision, const MirrorPolynomial& f);
HenselLift hensel_lift_critical(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda, int cone,
                                const Rational& precision);

// lambda_k = sqrt(p_k) T^{a_k}; every lambda_i^sigma then has valuation min over its support.
std::vector<NovikovScalar> sample_lambda(const RatVec& valuations);
Rational default_valuation(const Fan& fan, const RatVec& phi);

struct JacobianCount {
  int count = 0;
  int max_cones = 0;
  bool equal = false;
  bool sampled = false;  // lambda outside the hypotheses, count taken from two compliant samples
  std::vector<int> sample_counts;
};

JacobianCount jacobian_count(const Fan& fan, const RatVec& phi, const std::vector<NovikovScalar>& lambda,
                             const Rational& precision = Rational(2));
JacobianCount jacobian_count(const Fan& fan, const RatVec& phi, const Rational& precision = Rational(2));

}  // namespace eqhms::tropical
