#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqhms/ainfty.hpp"
#include "eqhms/novikov.hpp"

namespace eqhms::mirror {

using novikov::Coefficient;
using novikov::NovikovPolynomial;
using novikov::NovikovScalar;

enum class GeometryKind { CP1, C };

struct ToricMirrorGeometry {
  GeometryKind kind = GeometryKind::CP1;

  static ToricMirrorGeometry cp1() { return {GeometryKind::CP1}; }
  static ToricMirrorGeometry c() { return {GeometryKind::C}; }
  static ToricMirrorGeometry parse(const std::string& name);  // "cp1" or "c"

  std::string name() const { return kind == GeometryKind::CP1 ? "cp1" : "c"; }
  // <e^1, d beta_j> for the Maslov-2 classes.
  std::vector<int> pairings() const;
  // Energies u, 1 - u (CP1) or u (C).
  std::vector<ainfty::DiskClassGenerator> disk_classes(const Rational& u) const;
  void validate_u(const Rational& u) const;
};

struct Brane {
  Rational u;
  Coefficient c0;      // holonomy
  Coefficient b0;      // principal log of c0
  NovikovScalar b_plus;  // coefficient of e^1, positive valuation

  // <b, e_1> = b0 + b_plus
  NovikovScalar pairing() const { return NovikovScalar::constant(b0) + b_plus; }
};

struct CriticalPoint {
  NovikovScalar root;
  Brane brane;
  bool double_root = false;
};

// X^2 - lambda X - T (CP1) or X - lambda (C).
NovikovPolynomial critical_equation(const ToricMirrorGeometry& geom, const NovikovScalar& lambda);

// Roots sorted by valuation, then by leading coefficient (descending real,
// then imaginary part).  A double root is returned once, and only with
// degenerate = true.
std::vector<CriticalPoint> solve_mirror(const ToricMirrorGeometry& geom, const NovikovScalar& lambda,
                                        const Rational& precision, bool degenerate = false);

// X = T^u c0 (1 + c+), b+ = log(1 + c+).
Brane brane_from_root(const ToricMirrorGeometry& geom, const NovikovScalar& root, const Rational& precision);

// T^u c0 e^{b+}.
NovikovScalar potential_variable(const Brane& brane, const Rational& precision);

// rho(beta_j) = c0^{<e^1, d beta_j>}.
std::vector<Coefficient> holonomy(const ToricMirrorGeometry& geom, const Brane& brane);

// Basis {1, e^1}, m_{l,beta}(e^1..e^1) = <d beta, e^1>^l / l! 1, signed wedge
// product, i_{e_1}(e^1) = 1.  Energy cutoff E.
ainfty::GappedAInfty model_algebra(const ToricMirrorGeometry& geom, const Rational& u, const Rational& energy_cutoff,
                                   int max_arity);

struct DivisorReport {
  std::vector<std::string> failures;
  bool pass = true;
};

// Entries of each Maslov-2 class beta satisfy m_{k,beta}(e..e) = <d beta, e>/k m_{k-1,beta}(e..e)
// with m_{0,beta} = 1 and nothing else; the other classes carry no operations.
DivisorReport check_divisor_axiom(const ToricMirrorGeometry& geom, const ainfty::GappedAInfty& a);

// Arity budget the pipeline needs for m_k at precision E.
int required_arity(const Brane& brane, const Rational& precision, int k);

// m_k^{b,lambda}(e^1, ..., e^1) through lambda evaluation and deformation of
// the model algebra; k = 0 includes -lambda b0.
NovikovScalar structure_constant(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda,
                                 int k, const Rational& precision);

// All m_0 .. m_kmax from one deformation.
std::vector<NovikovScalar> structure_constants(const ToricMirrorGeometry& geom, const Brane& brane,
                                               const NovikovScalar& lambda, int kmax, const Rational& precision);

// d^k F / k! at X, with d = X d/dX; k = 0 gives F = X + T/X - lambda log(X / T^u)
// using log(X / T^u) = b0 + b+.
NovikovScalar closed_form(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda, int k,
                          const Rational& precision);

struct CliffordMatch {
  NovikovScalar product;    // [e^1][e^1] = -m_2(e^1, e^1)
  NovikovScalar clifford;   // generator square of Cl(-H/2)
  NovikovScalar hessian;
  bool match = false;
};

CliffordMatch clifford_match(const ToricMirrorGeometry& geom, const Brane& brane, const NovikovScalar& lambda,
                             const Rational& precision);
// Same comparison with an explicit Hessian.
CliffordMatch clifford_match(const NovikovScalar& m2, const NovikovScalar& hessian, const Rational& precision);

struct HomEntry {
  bool nonzero = false;
  bool same_u = false;
  bool same_pairing = false;
  bool same_curvature = false;
};

struct BraneCategory {
  std::vector<std::vector<HomEntry>> homs;
  std::vector<NovikovScalar> curvatures;
  std::vector<NovikovScalar> m2;  // endomorphism product on each diagonal
};

BraneCategory brane_category(const ToricMirrorGeometry& geom, const std::vector<Brane>& branes,
                             const NovikovScalar& lambda, const Rational& precision);

struct ReportRow {
  NovikovScalar root;
  Brane brane;
  NovikovScalar curvature;
  NovikovScalar m1;
  NovikovScalar m2;
  std::optional<CliffordMatch> clifford;  // nondegenerate rows
  std::vector<NovikovScalar> ladder;      // k! m_k for k = 0..6, degenerate rows
  std::vector<bool> hom_support;          // row of the hom table
};

struct CorrespondenceReport {
  ToricMirrorGeometry geometry;
  NovikovScalar lambda;
  Rational precision;
  bool degenerate = false;
  std::vector<ReportRow> rows;
};

CorrespondenceReport correspondence_report(const ToricMirrorGeometry& geom, const NovikovScalar& lambda,
                                           const Rational& precision, bool degenerate = false);

}  // namespace eqhms::mirror
