#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eqhms/linalg.hpp"
#include "eqhms/rational.hpp"

namespace eqhms::equivariant {

using Scalar = ComplexRational;
using CMatrix = Matrix<ComplexRational>;
using CVector = std::vector<ComplexRational>;

struct LieAlgebraData {
  int rank = 0;
  // constants[(i * rank + j) * rank + k] = c^i_{jk}, with [e_j, e_k] = sum_i c^i_{jk} e_i.
  std::vector<Rational> constants;

  static LieAlgebraData abelian(int rank);
  static LieAlgebraData so3();

  const Rational& c(int i, int j, int k) const { return constants[(i * rank + j) * rank + k]; }
  Rational& c(int i, int j, int k) { return constants[(i * rank + j) * rank + k]; }
  bool is_abelian() const;
  // Throws InputError on antisymmetry or Jacobi failure.
  void validate() const;
};

struct GDiffSpace {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  CMatrix delta;
  std::vector<CMatrix> interior;  // one per basis element of g
  std::vector<CMatrix> lie;

  std::size_t dim() const { return degrees.size(); }
};

GDiffSpace point_space(int rank);
// Invariant forms {1, e} on S^1 with the rotation action.
GDiffSpace circle_free();
// Same complex with i = L = 0.
GDiffSpace circle_trivial();
// Invariant forms on the group: the exterior algebra on g^dual with the
// Chevalley-Eilenberg differential.
GDiffSpace chevalley_eilenberg(const LieAlgebraData& g);

struct AxiomResidual {
  std::string name;
  double max_residual = 0.0;
  bool pass = true;
};

struct AxiomReport {
  std::vector<AxiomResidual> residuals;
  bool pass = true;
};

// delta^2 = 0, degree checks, and the five Cartan-calculus identities.
AxiomReport check_gdiff_axioms(const GDiffSpace& m, const LieAlgebraData& g);

// Column-sparse linear operator.
class SparseOperator {
 public:
  using Column = std::vector<std::pair<int, Scalar>>;

  SparseOperator() = default;
  SparseOperator(int rows, int cols) : rows_(rows), columns_(cols) {}
  static SparseOperator from_dense(const CMatrix& m);
  static SparseOperator identity(int n);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(columns_.size()); }
  const Column& column(int j) const { return columns_[j]; }
  void set_column(int j, Column c);
  CVector apply(const CVector& v) const;
  CMatrix block(const std::vector<int>& rows, const std::vector<int>& cols) const;
  CMatrix dense() const;
  bool is_zero() const;

  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const Scalar& s, const SparseOperator& a);

 private:
  int rows_ = 0;
  std::vector<Column> columns_;
};

// Monomial theta^I F^J; theta indices are bits of mask.
struct WeilMonomial {
  unsigned mask = 0;
  std::vector<int> f_exponents;
  int degree() const;
  int f_degree() const;
  bool operator<(const WeilMonomial& o) const {
    return mask != o.mask ? mask < o.mask : f_exponents < o.f_exponents;
  }
  bool operator==(const WeilMonomial& o) const { return mask == o.mask && f_exponents == o.f_exponents; }
};

struct TruncatedWeil {
  LieAlgebraData g;
  int D = 0;
  std::vector<WeilMonomial> basis;
  std::map<WeilMonomial, int> index;
  SparseOperator delta;
  std::vector<SparseOperator> interior;
  std::vector<SparseOperator> lie;

  int dim() const { return static_cast<int>(basis.size()); }
  std::vector<int> degrees() const;
  std::string label(int k) const;
  GDiffSpace as_gdiff() const;
  // Indices of theta-free monomials, i.e. the horizontal subspace S g^dual.
  std::vector<int> horizontal() const;
  // Left multiplication by theta^j or F^j, truncated at F-degree D.
  SparseOperator multiply_theta(int j) const;
  SparseOperator multiply_f(int j) const;
};

// D = 0 gives the exterior algebra on g^dual.
TruncatedWeil weil_algebra(const LieAlgebraData& g, int D);

enum class ModelKind { Weil, Cartan };

// Ambient operators on M (x) W (Weil) or M (x) S (Cartan), basis index m * dim(W) + w.
struct TensorModel {
  ModelKind kind = ModelKind::Weil;
  int D = 0;
  int dim_m = 0;
  int dim_w = 0;
  std::vector<int> degrees;
  std::vector<int> f_degrees;
  std::vector<unsigned> theta_masks;
  SparseOperator delta;
  std::vector<SparseOperator> interior;  // Weil only
  std::vector<SparseOperator> lie;
  std::vector<SparseOperator> multiply_f;  // 1 (x) F^j
  int min_degree = 0;
  int safe_max_degree = 0;

  int dim() const { return dim_m * dim_w; }
};

TensorModel tensor_model(const GDiffSpace& m, const LieAlgebraData& g, int D, ModelKind kind);

struct EquivariantComplex {
  ModelKind kind = ModelKind::Weil;
  int D = 0;
  int min_degree = 0;
  int safe_max_degree = 0;  // highest degree unaffected by truncation
  int ambient_dim = 0;
  // basis[k]: ambient coordinates of the basis vectors of degree k, k in [min_degree, safe_max_degree + 1].
  std::map<int, std::vector<CVector>> basis;
  // differential[k]: C^k -> C^{k+1} in these bases.
  std::map<int, CMatrix> differential;
  // F-degree of each basis vector, -1 when mixed.
  std::map<int, std::vector<int>> f_degree;

  int dim(int k) const;
  // d_{k+1} d_k = 0 for every k with k + 1 <= safe_max_degree.
  bool squares_to_zero() const;
};

EquivariantComplex build_model(const GDiffSpace& m, const LieAlgebraData& g, int D, ModelKind kind);

// Dimensions of H^k for k in [min_degree, max_degree]; max_degree defaults to
// the safe range and may not exceed it.
std::map<int, int> cohomology(const EquivariantComplex& c);
std::map<int, int> cohomology(const EquivariantComplex& c, int max_degree);

struct MathaiQuillenReport {
  SparseOperator phi;          // exp(gamma) on M (x) W
  SparseOperator phi_inverse;  // exp(-gamma)
  bool invertible = false;
  bool lands_in_cartan = false;
  bool intertwines = false;    // delta_Car phi = phi delta_W on the safe range
  bool dimensions_agree = false;
  int nilpotency_order = 0;    // least k with gamma^k = 0
};

MathaiQuillenReport mathai_quillen(const GDiffSpace& m, const LieAlgebraData& g, int D);

}  // namespace eqhms::equivariant
