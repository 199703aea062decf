#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqhms/equivariant.hpp"
#include "eqhms/novikov.hpp"
#include "eqhms/rational.hpp"

namespace eqhms::ainfty {

using Scalar = ComplexRational;
using novikov::Coefficient;
using novikov::NovikovScalar;
using novikov::Precision;

struct DiskClassGenerator {
  int maslov = 0;   // even
  Rational energy;  // omega / 2 pi, positive
  std::string name;
};

// Free commutative monoid on the generators, restricted to energy <= cutoff.
class GappedMonoid {
 public:
  using Element = std::vector<int>;  // multiplicity of each generator

  GappedMonoid() = default;
  GappedMonoid(std::vector<DiskClassGenerator> generators, Rational cutoff);

  const std::vector<DiskClassGenerator>& generators() const { return generators_; }
  const Rational& cutoff() const { return cutoff_; }
  // Sorted by energy; index 0 is the zero class.
  const std::vector<Element>& elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }
  int index(const Element& e) const;  // -1 when above the cutoff
  int maslov(int idx) const;
  Rational energy(int idx) const;
  std::string label(int idx) const;
  // All (b1, b2) with b1 + b2 = b.
  std::vector<std::pair<int, int>> splits(int idx) const;

 private:
  std::vector<DiskClassGenerator> generators_;
  Rational cutoff_;
  std::vector<Element> elements_;
  std::map<Element, int> index_;
};

struct GradedBasis {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  int unit = 0;
  int dim() const { return static_cast<int>(degrees.size()); }
};

// Multilinear map; key = (inputs..., output).
template <class S>
struct SparseTensor {
  int arity = 0;
  std::map<std::vector<int>, S> entries;
};

struct GAction {
  equivariant::LieAlgebraData g;
  std::vector<equivariant::CMatrix> interior;
  std::vector<equivariant::CMatrix> lie;
};

class GappedAInfty {
 public:
  GappedAInfty() = default;
  GappedAInfty(GradedBasis basis, GappedMonoid monoid, int max_arity);

  const GradedBasis& basis() const { return basis_; }
  const GappedMonoid& monoid() const { return monoid_; }
  int max_arity() const { return max_arity_; }
  int dim() const { return basis_.dim(); }

  // Declaring creates an explicit zero tensor.
  void declare(int k, int beta);
  void declare_all();
  bool declared(int k, int beta) const;
  void set(int k, int beta, const std::vector<int>& inputs, int output, const Scalar& value);
  Scalar get(int k, int beta, const std::vector<int>& inputs, int output) const;
  const SparseTensor<Scalar>* tensor(int k, int beta) const;
  const std::map<std::pair<int, int>, SparseTensor<Scalar>>& tensors() const { return tensors_; }

  std::optional<GAction> action;

 private:
  void check_index(int k, int beta, const std::vector<int>& inputs, int output) const;

  GradedBasis basis_;
  GappedMonoid monoid_;
  int max_arity_ = 0;
  std::map<std::pair<int, int>, SparseTensor<Scalar>> tensors_;
};

struct RelationResidual {
  int k = 0;
  int beta = 0;
  double max_residual = 0.0;
};

struct AInftyReport {
  std::vector<RelationResidual> relations;
  // Entries whose output degree differs from sum |x_i| + 2 - k - mu(beta).
  std::vector<std::string> degree_violations;
  bool pass = true;
};

// Relations for every (k, beta) with k <= max_arity, or k < max_arity when some
// m_{0,beta} is nonzero.  Throws InputError listing
// undeclared tensors.
AInftyReport check_ainfty(const GappedAInfty& a);

struct UnitalityReport {
  std::vector<std::string> failures;  // "(k,beta): ..." descriptions
  bool pass = true;
};

UnitalityReport check_unitality(const GappedAInfty& a);

struct GDiffCompatReport {
  equivariant::AxiomReport space;  // (basis, m_{1,0}, i, L) as a g-differential space
  std::vector<RelationResidual> interior;
  std::vector<RelationResidual> lie;
  bool interior_pass = true;
  bool lie_pass = true;
  bool unit_pass = true;  // i_X(1) = 0 and L_X(1) = 0
  // interior + delta-compatibility imply the Lie relation
  bool consistent = true;
  bool pass = true;
};

GDiffCompatReport check_gdiff_compat(const GappedAInfty& a);

// Z/2-graded curved structure over the Novikov field; ops[k] for k = 0..max_arity.
struct CurvedAInfty {
  GradedBasis basis;
  Precision precision;
  std::vector<SparseTensor<NovikovScalar>> ops;

  int max_arity() const { return static_cast<int>(ops.size()) - 1; }
  int dim() const { return basis.dim(); }
  NovikovScalar get(int k, const std::vector<int>& inputs, int output) const;
};

struct CurvedReport {
  std::vector<std::pair<int, double>> relations;  // (k, max residual)
  std::vector<std::string> unit_failures;
  bool relations_pass = true;
  bool unit_pass = true;
  bool pass = true;
};

CurvedReport check_curved(const CurvedAInfty& c, double tol = 1e-9);

// m_k = sum_beta rho(beta) T^{omega(beta)} m_{k,beta}; holonomy holds one
// factor per monoid generator (default 1).
CurvedAInfty associated_curved(const GappedAInfty& a, const Rational& precision,
                               const std::vector<Coefficient>& holonomy = {});

// Restriction to the g-invariant part, followed by the shift
// m_1 -> m_1 - sum_i lambda_i i_{e_i}.  Requires abelian g.
CurvedAInfty evaluate_lambda(const GappedAInfty& a, const std::vector<NovikovScalar>& lambda, const Rational& precision,
                             const std::vector<Coefficient>& holonomy = {});

// g-invariant part as a gapped algebra over the basis of invariants.
GappedAInfty invariant_part(const GappedAInfty& a);

// m_k^b(x_1..x_k) = sum m_{k+l}(b..b, x_1, b..b, ..., x_k, b..b).  Terms of
// valuation >= precision are dropped; the output keeps every arity that the
// input arity budget allows and at least min_arity.
CurvedAInfty deform(const CurvedAInfty& c, const std::vector<NovikovScalar>& b, int min_arity = 2,
                    bool verify = true);

struct BoundingCochainCandidate {
  std::vector<NovikovScalar> coefficients;  // in the graded basis
};

// Checks delta b = 0, b odd of positive valuation, and i_X b = c(X) 1; returns c.
std::vector<NovikovScalar> validate_candidate(const GappedAInfty& a, const BoundingCochainCandidate& b);

// Candidate check followed by deformation of the associated curved algebra.
CurvedAInfty deform(const GappedAInfty& a, const BoundingCochainCandidate& b, const Rational& precision,
                    const std::vector<Coefficient>& holonomy = {}, int min_arity = 2);

// m_0(1) as a multiple of the unit, if it is one.
std::optional<NovikovScalar> curvature_unit_multiple(const CurvedAInfty& c);

}  // namespace eqhms::ainfty
