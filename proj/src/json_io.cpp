#include "eqhms/json_io.hpp"

#include <climits>

#include "eqhms/error.hpp"

namespace eqhms::json_io {

using mf::PolyMatrix;

namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError("json: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_from_json(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<int> ints_from_json(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& x : j) out.push_back(int_from_json(x, what));
  return out;
}

double clean(double x) { return x == 0.0 ? 0.0 : x; }  // no negative zero in output

json big_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

mpz_class big_from_json(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    try {
      return mpz_class(j.get<std::string>());
    } catch (const std::exception&) {
      bad("bad integer string " + j.get<std::string>());
    }
  }
  bad("expected an integer");
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalars

json rational_to_json(const Rational& q) { return json::array({big_to_json(q.get_num()), big_to_json(q.get_den())}); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(big_from_json(j));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && !j[0].is_array()) {
    mpz_class num = big_from_json(j[0]), den = big_from_json(j[1]);
    if (den == 0) bad("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  bad("expected a rational [num, den]");
}

json complex_to_json(const ComplexRational& z) { return json::array({rational_to_json(z.re), rational_to_json(z.im)}); }

ComplexRational complex_from_json(const json& j) {
  if (j.is_object()) {
    return {j.contains("re") ? rational_from_json(j["re"]) : Rational(0),
            j.contains("im") ? rational_from_json(j["im"]) : Rational(0)};
  }
  if (j.is_array() && j.size() == 2 && j[0].is_array()) return {rational_from_json(j[0]), rational_from_json(j[1])};
  return ComplexRational(rational_from_json(j));
}

json coefficient_to_json(const novikov::Coefficient& c) { return json::array({clean(c.real()), clean(c.imag())}); }

novikov::Coefficient coefficient_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad("expected a complex number [re, im]");
}

json precision_to_json(const novikov::Precision& p) { return p ? rational_to_json(*p) : json(nullptr); }

json novikov_to_json(const novikov::NovikovScalar& a) {
  json terms = json::array();
  for (const auto& t : a.terms()) {
    terms.push_back(json::array({big_to_json(t.exponent.get_num()), big_to_json(t.exponent.get_den()),
                                 clean(t.coefficient.real()), clean(t.coefficient.imag())}));
  }
  return json{{"precision", precision_to_json(a.precision())}, {"terms", terms}};
}

novikov::NovikovScalar novikov_from_json(const json& j, const novikov::Precision& fallback) {
  if (j.is_string()) return novikov_from_text(j.get<std::string>(), fallback);
  if (j.is_number()) return novikov::NovikovScalar::constant(j.get<double>(), fallback);
  if (!j.is_object()) bad("expected a Novikov literal");
  novikov::Precision p = fallback;
  if (j.contains("precision")) p = j["precision"].is_null() ? novikov::Precision{} : rational_from_json(j["precision"]);
  std::vector<novikov::Term> terms;
  for (const auto& t : field(j, "terms")) {
    if (!t.is_array() || t.size() != 4) bad("Novikov term must be [exp_num, exp_den, re, im]");
    mpz_class den = big_from_json(t[1]);
    if (den == 0) bad("zero exponent denominator");
    Rational e(big_from_json(t[0]), den);
    e.canonicalize();
    if (!t[2].is_number() || !t[3].is_number()) bad("Novikov coefficients must be numbers");
    terms.push_back({e, {t[2].get<double>(), t[3].get<double>()}});
  }
  return novikov::NovikovScalar::from_terms(std::move(terms), p);
}

novikov::NovikovScalar novikov_from_text(const std::string& text, const novikov::Precision& fallback) {
  auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      bad(std::string("cannot parse Novikov literal: ") + e.what());
    }
    return novikov_from_json(j, fallback);
  }
  return novikov::parse(text, fallback);
}

std::vector<novikov::NovikovScalar> novikov_vector_from_text(const std::string& text,
                                                             const novikov::Precision& fallback) {
  json j = json::parse(text, nullptr, false);
  std::vector<novikov::NovikovScalar> out;
  if (!j.is_discarded()) {
    if (!j.is_array()) bad("expected an array of Novikov literals");
    for (const auto& x : j) out.push_back(novikov_from_json(x, fallback));
    return out;
  }
  // bare shorthand list such as [T^{1/4},2T^{1/4}]
  std::string s = text;
  auto l = s.find('['), r = s.rfind(']');
  if (l == std::string::npos || r == std::string::npos || r < l) bad("expected a bracketed list of literals");
  s = s.substr(l + 1, r - l - 1);
  int depth = 0;
  std::string cur;
  auto flush = [&] {
    if (cur.find_first_not_of(" \t") == std::string::npos) bad("empty entry in literal list");
    out.push_back(novikov_from_text(cur, fallback));
    cur.clear();
  };
  for (char c : s) {
    if (c == '{' || c == '(' || c == '[') ++depth;
    if (c == '}' || c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials and matrix factorizations

std::vector<std::string> vars_from_json(const json& j) {
  const auto& v = field(j, "vars");
  if (!v.is_array() || v.empty()) bad("\"vars\" must be a nonempty array of names");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) bad("variable names must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json polynomial_to_json(const CPolynomial& p, const std::vector<std::string>& vars) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(json::array({e, complex_to_json(c)}));
  return json{{"terms", terms}, {"text", p.to_string(vars)}};
}

CPolynomial polynomial_from_json(const json& j, const std::vector<std::string>& vars) {
  const int n = vars.size();
  if (j.is_string()) return parse_polynomial(j.get<std::string>(), vars);
  if (j.is_number_integer() || (j.is_array() && j.size() == 2 && !j[0].is_array()))
    return CPolynomial::constant(n, complex_from_json(j));
  if (!j.is_object()) bad("expected a polynomial");
  CPolynomial p(n);
  for (const auto& t : field(j, "terms")) {
    if (!t.is_array() || t.size() != 2) bad("polynomial term must be [exponents, coefficient]");
    auto e = ints_from_json(t[0], "exponent");
    if (static_cast<int>(e.size()) != n) bad("exponent length differs from the variable list");
    p.add_term(e, complex_from_json(t[1]));
  }
  return p;
}

namespace {

PolyMatrix<ComplexRational> polymatrix_from_json(const json& j, const std::vector<std::string>& vars) {
  if (!j.is_array()) bad("matrix must be an array of rows");
  PolyMatrix<ComplexRational> m;
  for (const auto& row : j) {
    if (!row.is_array()) bad("matrix rows must be arrays");
    std::vector<CPolynomial> r;
    for (const auto& x : row) r.push_back(polynomial_from_json(x, vars));
    m.push_back(std::move(r));
  }
  return m;
}

json polymatrix_to_json(const PolyMatrix<ComplexRational>& m, const std::vector<std::string>& vars) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& p : row) r.push_back(polynomial_to_json(p, vars));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

json mf_to_json(const mf::MatrixFactorization<ComplexRational>& m, const std::vector<std::string>& vars) {
  return json{{"vars", vars},
              {"w", polynomial_to_json(m.w, vars)},
              {"phi", polymatrix_to_json(m.phi, vars)},
              {"psi", polymatrix_to_json(m.psi, vars)}};
}

mf::MatrixFactorization<ComplexRational> mf_from_json(const json& j, const std::vector<std::string>& vars) {
  if (j.contains("f")) {
    std::vector<CPolynomial> f, w;
    for (const auto& x : field(j, "f")) f.push_back(polynomial_from_json(x, vars));
    for (const auto& x : field(j, "w_list")) w.push_back(polynomial_from_json(x, vars));
    std::optional<CPolynomial> declared;
    if (j.contains("w")) declared = polynomial_from_json(j["w"], vars);
    return mf::koszul_stabilization(f, w, declared);
  }
  mf::MatrixFactorization<ComplexRational> m;
  m.w = polynomial_from_json(field(j, "w"), vars);
  m.phi = polymatrix_from_json(field(j, "phi"), vars);
  m.psi = polymatrix_from_json(field(j, "psi"), vars);
  mf::check_shapes(m);
  return m;
}

// ---------------------------------------------------------------------------
// Fans

json fan_to_json(const tropical::Fan& fan, const tropical::RatVec& phi) {
  json p = json::array();
  for (const auto& x : phi) p.push_back(rational_to_json(x));
  return json{{"n", fan.n}, {"rays", fan.rays}, {"max_cones", fan.max_cones}, {"phi", p}};
}

std::pair<tropical::Fan, tropical::RatVec> fan_from_json(const json& j) {
  tropical::Fan fan;
  fan.n = int_from_json(field(j, "n"), "n");
  for (const auto& r : field(j, "rays")) {
    tropical::IntVec v;
    for (int x : ints_from_json(r, "ray")) v.push_back(x);
    fan.rays.push_back(v);
  }
  for (const auto& c : field(j, "max_cones")) fan.max_cones.push_back(ints_from_json(c, "cone"));
  tropical::RatVec phi;
  for (const auto& x : field(j, "phi")) phi.push_back(rational_from_json(x));
  fan.check_shape();
  return {fan, phi};
}

// ---------------------------------------------------------------------------
// Equivariant data

json lie_to_json(const equivariant::LieAlgebraData& g) {
  json c = json::array();
  for (const auto& x : g.constants) c.push_back(rational_to_json(x));
  return json{{"rank", g.rank}, {"constants", c}};
}

equivariant::LieAlgebraData lie_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "so3") return equivariant::LieAlgebraData::so3();
    if (s == "u1" || s == "s1") return equivariant::LieAlgebraData::abelian(1);
    bad("unknown Lie algebra " + s);
  }
  if (j.is_object() && j.contains("abelian"))
    return equivariant::LieAlgebraData::abelian(int_from_json(j["abelian"], "abelian rank"));
  equivariant::LieAlgebraData g;
  g.rank = int_from_json(field(j, "rank"), "rank");
  if (g.rank < 0) bad("rank must be nonnegative");
  for (const auto& x : field(j, "constants")) g.constants.push_back(rational_from_json(x));
  g.validate();
  return g;
}

json cmatrix_to_json(const equivariant::CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(complex_to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

equivariant::CMatrix cmatrix_from_json(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) bad("matrix must have " + std::to_string(rows) + " rows");
  equivariant::CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) bad("matrix rows must have " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

json gdiff_to_json(const equivariant::GDiffSpace& m) {
  json in = json::array(), lie = json::array();
  for (const auto& x : m.interior) in.push_back(cmatrix_to_json(x));
  for (const auto& x : m.lie) lie.push_back(cmatrix_to_json(x));
  return json{{"labels", m.labels},
              {"degrees", m.degrees},
              {"delta", cmatrix_to_json(m.delta)},
              {"interior", in},
              {"lie", lie}};
}

equivariant::GDiffSpace gdiff_from_json(const json& j, const equivariant::LieAlgebraData& g) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "point") return equivariant::point_space(g.rank);
    if (s == "circle_free") return equivariant::circle_free();
    if (s == "circle_trivial") return equivariant::circle_trivial();
    if (s == "chevalley_eilenberg") return equivariant::chevalley_eilenberg(g);
    bad("unknown g-differential space " + s);
  }
  equivariant::GDiffSpace m;
  m.degrees = ints_from_json(field(j, "degrees"), "degree");
  const std::size_t n = m.degrees.size();
  if (j.contains("labels")) {
    for (const auto& x : j["labels"]) m.labels.push_back(x.get<std::string>());
    if (m.labels.size() != n) bad("labels and degrees differ in length");
  } else {
    for (std::size_t i = 0; i < n; ++i) m.labels.push_back("b" + std::to_string(i));
  }
  m.delta = cmatrix_from_json(field(j, "delta"), n, n);
  for (const auto& x : field(j, "interior")) m.interior.push_back(cmatrix_from_json(x, n, n));
  for (const auto& x : field(j, "lie")) m.lie.push_back(cmatrix_from_json(x, n, n));
  if (static_cast<int>(m.interior.size()) != g.rank || static_cast<int>(m.lie.size()) != g.rank)
    bad("expected one interior and one Lie matrix per basis element of g");
  return m;
}

// ---------------------------------------------------------------------------
// Gapped A-infinity algebras

json algebra_to_json(const ainfty::GappedAInfty& a) {
  const auto& mon = a.monoid();
  json gens = json::array();
  for (const auto& g : mon.generators())
    gens.push_back(json{{"maslov", g.maslov}, {"energy", rational_to_json(g.energy)}, {"name", g.name}});
  json declared = json::array(), entries = json::array();
  for (const auto& [key, t] : a.tensors()) {
    const auto& beta = mon.elements()[key.second];
    declared.push_back(json::array({key.first, beta}));
    for (const auto& [idx, v] : t.entries) {
      std::vector<int> inputs(idx.begin(), idx.end() - 1);
      entries.push_back(json::array({key.first, beta, inputs, idx.back(), complex_to_json(v)}));
    }
  }
  json out{{"basis", {{"labels", a.basis().labels}, {"degrees", a.basis().degrees}, {"unit", a.basis().unit}}},
           {"monoid", {{"generators", gens}, {"cutoff", rational_to_json(mon.cutoff())}}},
           {"max_arity", a.max_arity()},
           {"declared", declared},
           {"entries", entries}};
  if (a.action) {
    json in = json::array(), lie = json::array();
    for (const auto& x : a.action->interior) in.push_back(cmatrix_to_json(x));
    for (const auto& x : a.action->lie) lie.push_back(cmatrix_to_json(x));
    out["action"] = json{{"lie_algebra", lie_to_json(a.action->g)}, {"interior", in}, {"lie", lie}};
  }
  return out;
}

ainfty::GappedAInfty algebra_from_json(const json& j) {
  const auto& b = field(j, "basis");
  ainfty::GradedBasis basis;
  basis.degrees = ints_from_json(field(b, "degrees"), "degree");
  const std::size_t n = basis.degrees.size();
  if (b.contains("labels")) {
    for (const auto& x : b["labels"]) basis.labels.push_back(x.get<std::string>());
  } else {
    for (std::size_t i = 0; i < n; ++i) basis.labels.push_back("b" + std::to_string(i));
  }
  if (basis.labels.size() != n) bad("labels and degrees differ in length");
  basis.unit = int_from_json(field(b, "unit"), "unit");

  const auto& m = field(j, "monoid");
  std::vector<ainfty::DiskClassGenerator> gens;
  for (const auto& g : field(m, "generators")) {
    gens.push_back({int_from_json(field(g, "maslov"), "maslov"), rational_from_json(field(g, "energy")),
                    g.contains("name") ? g["name"].get<std::string>() : "b" + std::to_string(gens.size() + 1)});
  }
  ainfty::GappedMonoid mon(gens, rational_from_json(field(m, "cutoff")));
  ainfty::GappedAInfty a(basis, mon, int_from_json(field(j, "max_arity"), "max_arity"));

  auto beta_index = [&](const json& x) {
    if (x.is_number_integer()) {
      int i = x.get<int>();
      if (i < 0 || i >= mon.size()) bad("monoid index out of range");
      return i;
    }
    auto e = ints_from_json(x, "beta");
    if (e.size() != gens.size()) bad("beta must list one multiplicity per generator");
    int i = mon.index(e);
    if (i < 0) bad("beta lies above the energy cutoff");
    return i;
  };
  if (j.contains("declared")) {
    for (const auto& d : j["declared"]) {
      if (!d.is_array() || d.size() != 2) bad("declared entries are [k, beta]");
      a.declare(int_from_json(d[0], "k"), beta_index(d[1]));
    }
  } else {
    a.declare_all();
  }
  for (const auto& e : field(j, "entries")) {
    if (!e.is_array() || e.size() != 5) bad("tensor entries are [k, beta, inputs, output, value]");
    a.set(int_from_json(e[0], "k"), beta_index(e[1]), ints_from_json(e[2], "input"), int_from_json(e[3], "output"),
          complex_from_json(e[4]));
  }
  if (j.contains("action")) {
    const auto& act = j["action"];
    ainfty::GAction g;
    g.g = lie_from_json(field(act, "lie_algebra"));
    for (const auto& x : field(act, "interior")) g.interior.push_back(cmatrix_from_json(x, n, n));
    for (const auto& x : field(act, "lie")) g.lie.push_back(cmatrix_from_json(x, n, n));
    if (static_cast<int>(g.interior.size()) != g.g.rank || static_cast<int>(g.lie.size()) != g.g.rank)
      bad("action needs one interior and one Lie matrix per basis element of g");
    a.action = std::move(g);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Reports

json mirror_report_to_json(const mirror::CorrespondenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json ladder = json::array();
    for (const auto& x : row.ladder) ladder.push_back(novikov_to_json(x));
    json clifford = nullptr;
    if (row.clifford) {
      clifford = json{{"product", novikov_to_json(row.clifford->product)},
                      {"clifford", novikov_to_json(row.clifford->clifford)},
                      {"hessian", novikov_to_json(row.clifford->hessian)},
                      {"match", row.clifford->match}};
    }
    rows.push_back(json{{"root", novikov_to_json(row.root)},
                        {"u", rational_to_json(row.brane.u)},
                        {"holonomy", coefficient_to_json(row.brane.c0)},
                        {"b0", coefficient_to_json(row.brane.b0)},
                        {"b_plus", novikov_to_json(row.brane.b_plus)},
                        {"curvature", novikov_to_json(row.curvature)},
                        {"m1", novikov_to_json(row.m1)},
                        {"m2", novikov_to_json(row.m2)},
                        {"clifford", clifford},
                        {"ladder", ladder},
                        {"hom_support", row.hom_support}});
  }
  return json{{"geometry", r.geometry.name()},
              {"lambda", novikov_to_json(r.lambda)},
              {"precision", rational_to_json(r.precision)},
              {"degenerate", r.degenerate},
              {"rows", rows}};
}

}  // namespace eqhms::json_io
