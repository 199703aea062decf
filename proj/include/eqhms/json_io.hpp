#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "eqhms/ainfty.hpp"
#include "eqhms/equivariant.hpp"
#include "eqhms/mf.hpp"
#include "eqhms/mirror.hpp"
#include "eqhms/novikov.hpp"
#include "eqhms/polynomial.hpp"
#include "eqhms/tropical.hpp"

namespace eqhms::json_io {

using json = nlohmann::json;

// All readers raise InputError on malformed documents.

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);

json complex_to_json(const ComplexRational& z);
ComplexRational complex_from_json(const json& j);

json coefficient_to_json(const novikov::Coefficient& c);
novikov::Coefficient coefficient_from_json(const json& j);

json precision_to_json(const novikov::Precision& p);

json novikov_to_json(const novikov::NovikovScalar& a);
// Accepts the canonical object or a shorthand string; `fallback` applies to shorthand and missing precision.
novikov::NovikovScalar novikov_from_json(const json& j, const novikov::Precision& fallback = std::nullopt);
novikov::NovikovScalar novikov_from_text(const std::string& text, const novikov::Precision& fallback = std::nullopt);
// "[T^{1/4},2T^{1/4}]", a JSON array of literals, or a JSON array string.
std::vector<novikov::NovikovScalar> novikov_vector_from_text(const std::string& text,
                                                             const novikov::Precision& fallback = std::nullopt);

json polynomial_to_json(const CPolynomial& p, const std::vector<std::string>& vars);
CPolynomial polynomial_from_json(const json& j, const std::vector<std::string>& vars);
std::vector<std::string> vars_from_json(const json& j);

json mf_to_json(const mf::MatrixFactorization<ComplexRational>& m, const std::vector<std::string>& vars);
// Explicit {w, phi, psi} or a Koszul description {f, w_list[, w]}.
mf::MatrixFactorization<ComplexRational> mf_from_json(const json& j, const std::vector<std::string>& vars);

json fan_to_json(const tropical::Fan& fan, const tropical::RatVec& phi);
std::pair<tropical::Fan, tropical::RatVec> fan_from_json(const json& j);

json lie_to_json(const equivariant::LieAlgebraData& g);
equivariant::LieAlgebraData lie_from_json(const json& j);

json cmatrix_to_json(const equivariant::CMatrix& m);
equivariant::CMatrix cmatrix_from_json(const json& j, std::size_t rows, std::size_t cols);

json gdiff_to_json(const equivariant::GDiffSpace& m);
// Named spaces: "point", "circle_free", "circle_trivial", "chevalley_eilenberg".
equivariant::GDiffSpace gdiff_from_json(const json& j, const equivariant::LieAlgebraData& g);

json algebra_to_json(const ainfty::GappedAInfty& a);
ainfty::GappedAInfty algebra_from_json(const json& j);

json mirror_report_to_json(const mirror::CorrespondenceReport& r);

}  // namespace eqhms::json_io
