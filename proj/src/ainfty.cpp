#include "eqhms/ainfty.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "eqhms/error.hpp"
#include "eqhms/linalg.hpp"

namespace eqhms::ainfty {

namespace {

double magnitude(const Scalar& s) { return s.abs(); }
double magnitude(const NovikovScalar& s) { return s.max_abs_coefficient(); }
bool vanishes(const NovikovScalar& s) { return s.is_zero(); }

int parity_sign(int exponent) { return (exponent % 2 == 0) ? 1 : -1; }

template <class S>
S signed_value(int sign, const S& v) {
  return sign > 0 ? v : -v;
}

// Adds sum_i (-1)^{|x_1|'+..+|x_i|'} outer(x_1..x_i, inner(...), ...) into res.
template <class S>
void compose_into(std::map<std::vector<int>, S>& res, const SparseTensor<S>& outer, const SparseTensor<S>& inner,
                  const std::vector<int>& degrees) {
  if (outer.entries.empty() || inner.entries.empty()) return;
  std::map<int, std::vector<const std::pair<const std::vector<int>, S>*>> by_output;
  for (const auto& e : inner.entries) by_output[e.first.back()].push_back(&e);
  const int k1 = outer.arity;
  const int k2 = inner.arity;
  for (const auto& [okey, ov] : outer.entries) {
    int shifted = 0;
    for (int i = 0; i < k1; ++i) {
      auto it = by_output.find(okey[i]);
      if (it != by_output.end()) {
        const int sign = parity_sign(shifted);
        for (const auto* ie : it->second) {
          std::vector<int> key;
          key.reserve(k1 + k2);
          key.insert(key.end(), okey.begin(), okey.begin() + i);
          key.insert(key.end(), ie->first.begin(), ie->first.end() - 1);
          key.insert(key.end(), okey.begin() + i + 1, okey.end());
          S term = signed_value(sign, ov * ie->second);
          auto [slot, inserted] = res.try_emplace(std::move(key), term);
          if (!inserted) slot->second += term;
        }
      }
      shifted += degrees[okey[i]] - 1;
    }
  }
}

template <class S>
double max_magnitude(const std::map<std::vector<int>, S>& res) {
  double m = 0.0;
  for (const auto& e : res) m = std::max(m, magnitude(e.second));
  return m;
}

template <class S>
void prune(SparseTensor<S>& t) {
  for (auto it = t.entries.begin(); it != t.entries.end();) {
    if (vanishes(it->second))
      it = t.entries.erase(it);
    else
      ++it;
  }
}

std::string key_label(const GradedBasis& b, const std::vector<int>& key) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i + 1 < key.size(); ++i) os << (i ? "," : "") << b.labels[key[i]];
  os << ") -> " << b.labels[key.back()];
  return os.str();
}

std::string op_label(int k, const std::string& beta) { return "m_{" + std::to_string(k) + "," + beta + "}"; }

// res from i_X m + sum_i (-1)^{..} m(.., i_X x_i, ..), or L_X m - sum m(.., L_X x_i, ..).
std::map<std::vector<int>, Scalar> derivation_residual(const SparseTensor<Scalar>& t, const equivariant::CMatrix& op,
                                                       const std::vector<int>& degrees, bool odd) {
  std::map<std::vector<int>, Scalar> res;
  const int n = static_cast<int>(op.rows());
  for (const auto& [key, v] : t.entries) {
    const int out = key.back();
    for (int r = 0; r < n; ++r) {
      if (op(r, out).is_zero()) continue;
      std::vector<int> nk = key;
      nk.back() = r;
      res[nk] += op(r, out) * v;
    }
    int shifted = 0;
    for (int i = 0; i < t.arity; ++i) {
      const int sign = odd ? parity_sign(shifted) : -1;
      for (int x = 0; x < n; ++x) {
        if (op(key[i], x).is_zero()) continue;
        std::vector<int> nk = key;
        nk[i] = x;
        res[nk] += signed_value(sign, op(key[i], x) * v);
      }
      shifted += degrees[key[i]] - 1;
    }
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------- monoid

GappedMonoid::GappedMonoid(std::vector<DiskClassGenerator> generators, Rational cutoff)
    : generators_(std::move(generators)), cutoff_(std::move(cutoff)) {
  for (const auto& g : generators_) {
    if (sgn(g.energy) <= 0) throw InputError("disk class generator energy must be positive");
    if (g.maslov % 2 != 0) throw InputError("disk class generator Maslov index must be even");
  }
  if (sgn(cutoff_) < 0) throw InputError("energy cutoff must be nonnegative");
  const std::size_t n = generators_.size();
  Element cur(n, 0);
  std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t g, const Rational& used) {
    if (g == n) {
      elements_.push_back(cur);
      return;
    }
    Rational e = used;
    for (int m = 0; e <= cutoff_; ++m) {
      cur[g] = m;
      rec(g + 1, e);
      e += generators_[g].energy;
    }
    cur[g] = 0;
  };
  rec(0, Rational(0));
  std::vector<std::pair<Rational, Element>> keyed;
  for (auto& e : elements_) {
    Rational en(0);
    for (std::size_t g = 0; g < n; ++g) en += generators_[g].energy * e[g];
    keyed.emplace_back(en, e);
  }
  std::sort(keyed.begin(), keyed.end());
  elements_.clear();
  for (auto& [en, e] : keyed) {
    index_[e] = static_cast<int>(elements_.size());
    elements_.push_back(e);
  }
}

int GappedMonoid::index(const Element& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

int GappedMonoid::maslov(int idx) const {
  int m = 0;
  for (std::size_t g = 0; g < generators_.size(); ++g) m += generators_[g].maslov * elements_.at(idx)[g];
  return m;
}

Rational GappedMonoid::energy(int idx) const {
  Rational e(0);
  for (std::size_t g = 0; g < generators_.size(); ++g) e += generators_[g].energy * elements_.at(idx)[g];
  return e;
}

std::string GappedMonoid::label(int idx) const {
  const auto& e = elements_.at(idx);
  std::string s;
  for (std::size_t g = 0; g < generators_.size(); ++g) {
    if (e[g] == 0) continue;
    if (!s.empty()) s += "+";
    if (e[g] > 1) s += std::to_string(e[g]);
    s += generators_[g].name.empty() ? "b" + std::to_string(g + 1) : generators_[g].name;
  }
  return s.empty() ? "0" : s;
}

std::vector<std::pair<int, int>> GappedMonoid::splits(int idx) const {
  const auto& e = elements_.at(idx);
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size(); ++a) {
    const auto& x = elements_[a];
    Element rest(e.size());
    bool ok = true;
    for (std::size_t g = 0; g < e.size() && ok; ++g) {
      rest[g] = e[g] - x[g];
      ok = rest[g] >= 0;
    }
    if (ok) out.emplace_back(a, index(rest));
  }
  return out;
}

// ---------------------------------------------------------------- gapped algebra

GappedAInfty::GappedAInfty(GradedBasis basis, GappedMonoid monoid, int max_arity)
    : basis_(std::move(basis)), monoid_(std::move(monoid)), max_arity_(max_arity) {
  if (basis_.labels.size() != basis_.degrees.size()) throw InputError("basis labels and degrees differ in length");
  if (basis_.dim() == 0) throw InputError("empty basis");
  if (basis_.unit < 0 || basis_.unit >= basis_.dim()) throw InputError("unit index out of range");
  if (basis_.degrees[basis_.unit] != 0) throw InputError("unit must have degree 0");
  if (max_arity_ < 1) throw InputError("max arity must be at least 1");
}

void GappedAInfty::declare(int k, int beta) {
  if (k < 0 || k > max_arity_) throw InputError("arity out of range: " + std::to_string(k));
  if (beta < 0 || beta >= monoid_.size()) throw InputError("disk class index out of range");
  auto& t = tensors_[{k, beta}];
  t.arity = k;
}

void GappedAInfty::declare_all() {
  for (int k = 0; k <= max_arity_; ++k)
    for (int b = 0; b < monoid_.size(); ++b) declare(k, b);
}

bool GappedAInfty::declared(int k, int beta) const { return tensors_.count({k, beta}) > 0; }

void GappedAInfty::check_index(int k, int beta, const std::vector<int>& inputs, int output) const {
  if (static_cast<int>(inputs.size()) != k) throw InputError("wrong number of inputs");
  for (int x : inputs)
    if (x < 0 || x >= dim()) throw InputError("basis index out of range");
  if (output < 0 || output >= dim()) throw InputError("basis index out of range");
  if (beta < 0 || beta >= monoid_.size()) throw InputError("disk class index out of range");
}

void GappedAInfty::set(int k, int beta, const std::vector<int>& inputs, int output, const Scalar& value) {
  check_index(k, beta, inputs, output);
  declare(k, beta);
  std::vector<int> key = inputs;
  key.push_back(output);
  auto& t = tensors_[{k, beta}];
  if (value.is_zero())
    t.entries.erase(key);
  else
    t.entries[key] = value;
}

Scalar GappedAInfty::get(int k, int beta, const std::vector<int>& inputs, int output) const {
  check_index(k, beta, inputs, output);
  auto it = tensors_.find({k, beta});
  if (it == tensors_.end()) return {};
  std::vector<int> key = inputs;
  key.push_back(output);
  auto e = it->second.entries.find(key);
  return e == it->second.entries.end() ? Scalar{} : e->second;
}

const SparseTensor<Scalar>* GappedAInfty::tensor(int k, int beta) const {
  auto it = tensors_.find({k, beta});
  return it == tensors_.end() ? nullptr : &it->second;
}

AInftyReport check_ainfty(const GappedAInfty& a) {
  std::vector<std::string> missing;
  for (int k = 0; k <= a.max_arity(); ++k)
    for (int b = 0; b < a.monoid().size(); ++b)
      if (!a.declared(k, b)) missing.push_back("(" + std::to_string(k) + "," + a.monoid().label(b) + ")");
  if (!missing.empty()) {
    std::string msg = "undeclared structure maps:";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }
  AInftyReport rep;
  const auto& deg = a.basis().degrees;
  for (const auto& [kb, t] : a.tensors()) {
    const int mu = a.monoid().maslov(kb.second);
    for (const auto& [key, v] : t.entries) {
      int expected = 2 - kb.first - mu;
      for (int i = 0; i < kb.first; ++i) expected += deg[key[i]];
      if (deg[key.back()] != expected)
        rep.degree_violations.push_back(op_label(kb.first, a.monoid().label(kb.second)) + key_label(a.basis(), key));
    }
  }
  bool curved = false;
  for (int b = 0; b < a.monoid().size(); ++b)
    if (!a.tensor(0, b)->entries.empty()) curved = true;
  const int top = curved ? a.max_arity() - 1 : a.max_arity();
  for (int k = 0; k <= top; ++k) {
    for (int b = 0; b < a.monoid().size(); ++b) {
      std::map<std::vector<int>, Scalar> res;
      for (auto [b1, b2] : a.monoid().splits(b))
        for (int k2 = 0; k2 <= k + 1; ++k2)
          if (k + 1 - k2 <= a.max_arity() && k2 <= a.max_arity())
            compose_into(res, *a.tensor(k + 1 - k2, b1), *a.tensor(k2, b2), deg);
      const double r = max_magnitude(res);
      rep.relations.push_back({k, b, r});
      if (r != 0.0) rep.pass = false;
    }
  }
  if (!rep.degree_violations.empty()) rep.pass = false;
  return rep;
}

UnitalityReport check_unitality(const GappedAInfty& a) {
  UnitalityReport rep;
  const int u = a.basis().unit;
  const auto& deg = a.basis().degrees;
  for (const auto& [kb, t] : a.tensors()) {
    if (kb.first == 2 && kb.second == 0) continue;
    for (const auto& [key, v] : t.entries) {
      if (std::find(key.begin(), key.end() - 1, u) != key.end() - 1) {
        rep.failures.push_back(op_label(kb.first, a.monoid().label(kb.second)) + key_label(a.basis(), key) +
                               " is nonzero on the unit");
      }
    }
  }
  for (int x = 0; x < a.dim(); ++x) {
    for (int out = 0; out < a.dim(); ++out) {
      const Scalar want = (out == x) ? Scalar(1) : Scalar{};
      const Scalar left = a.get(2, 0, {u, x}, out);
      Scalar right = a.get(2, 0, {x, u}, out);
      if (deg[x] % 2 != 0) right = -right;
      if (!(left == want))
        rep.failures.push_back("m_{2,0}(1," + a.basis().labels[x] + ") != " + a.basis().labels[x]);
      if (!(right == want))
        rep.failures.push_back("m_{2,0}(" + a.basis().labels[x] + ",1) has the wrong sign or value");
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

GDiffCompatReport check_gdiff_compat(const GappedAInfty& a) {
  if (!a.action) throw InputError("no g-action attached to the algebra");
  const GAction& act = *a.action;
  const int n = a.dim();
  const int r = act.g.rank;
  if (static_cast<int>(act.interior.size()) != r || static_cast<int>(act.lie.size()) != r)
    throw InputError("action has the wrong number of operators");
  GDiffCompatReport rep;
  equivariant::GDiffSpace space;
  space.labels = a.basis().labels;
  space.degrees = a.basis().degrees;
  space.delta = equivariant::CMatrix(n, n);
  if (const auto* t = a.tensor(1, 0))
    for (const auto& [key, v] : t->entries) space.delta(key[1], key[0]) = v;
  space.interior = act.interior;
  space.lie = act.lie;
  rep.space = equivariant::check_gdiff_axioms(space, act.g);
  const auto& deg = a.basis().degrees;
  for (const auto& [kb, t] : a.tensors()) {
    double ri = 0.0;
    double rl = 0.0;
    for (int x = 0; x < r; ++x) {
      if (!(kb.first == 1 && kb.second == 0))
        ri = std::max(ri, max_magnitude(derivation_residual(t, act.interior[x], deg, true)));
      rl = std::max(rl, max_magnitude(derivation_residual(t, act.lie[x], deg, false)));
    }
    if (!(kb.first == 1 && kb.second == 0)) {
      rep.interior.push_back({kb.first, kb.second, ri});
      if (ri != 0.0) rep.interior_pass = false;
    }
    rep.lie.push_back({kb.first, kb.second, rl});
    if (rl != 0.0) rep.lie_pass = false;
  }
  const int u = a.basis().unit;
  for (int x = 0; x < r; ++x)
    for (int row = 0; row < n; ++row)
      if (!act.interior[x](row, u).is_zero() || !act.lie[x](row, u).is_zero()) rep.unit_pass = false;
  rep.consistent = !(rep.interior_pass && rep.space.pass) || rep.lie_pass;
  rep.pass = rep.space.pass && rep.interior_pass && rep.lie_pass && rep.unit_pass;
  return rep;
}

// ---------------------------------------------------------------- curved algebra

NovikovScalar CurvedAInfty::get(int k, const std::vector<int>& inputs, int output) const {
  if (k < 0 || k > max_arity()) throw InputError("arity out of range");
  std::vector<int> key = inputs;
  key.push_back(output);
  auto it = ops[k].entries.find(key);
  return it == ops[k].entries.end() ? NovikovScalar::zero(precision) : it->second;
}

CurvedReport check_curved(const CurvedAInfty& c, double tol) {
  CurvedReport rep;
  const auto& deg = c.basis.degrees;
  const int top = c.ops.empty() || c.ops[0].entries.empty() ? c.max_arity() : c.max_arity() - 1;
  for (int k = 0; k <= top; ++k) {
    std::map<std::vector<int>, NovikovScalar> res;
    for (int k2 = 0; k2 <= k + 1; ++k2)
      if (k + 1 - k2 <= c.max_arity() && k2 <= c.max_arity()) compose_into(res, c.ops[k + 1 - k2], c.ops[k2], deg);
    const double r = max_magnitude(res);
    rep.relations.emplace_back(k, r);
    if (r > tol) rep.relations_pass = false;
  }
  const int u = c.basis.unit;
  for (int k = 0; k <= c.max_arity(); ++k) {
    if (k == 2) continue;
    for (const auto& [key, v] : c.ops[k].entries)
      if (std::find(key.begin(), key.end() - 1, u) != key.end() - 1 && v.max_abs_coefficient() > tol)
        rep.unit_failures.push_back("m_" + std::to_string(k) + key_label(c.basis, key) + " is nonzero on the unit");
  }
  if (c.max_arity() >= 2) {
    for (int x = 0; x < c.dim(); ++x) {
      for (int out = 0; out < c.dim(); ++out) {
        const NovikovScalar want = NovikovScalar::constant(out == x ? 1.0 : 0.0);
        NovikovScalar right = c.get(2, {x, u}, out);
        if (deg[x] % 2 != 0) right = -right;
        if (!approx_equal(c.get(2, {u, x}, out), want, tol) || !approx_equal(right, want, tol))
          rep.unit_failures.push_back("m_2 is not unital on " + c.basis.labels[x]);
      }
    }
  }
  rep.unit_pass = rep.unit_failures.empty();
  rep.pass = rep.relations_pass && rep.unit_pass;
  return rep;
}

CurvedAInfty associated_curved(const GappedAInfty& a, const Rational& precision,
                               const std::vector<Coefficient>& holonomy) {
  const auto& gens = a.monoid().generators();
  if (!holonomy.empty() && holonomy.size() != gens.size())
    throw InputError("holonomy needs one value per disk class generator");
  if (precision > a.monoid().cutoff())
    throw InputError("precision exceeds the energy cutoff of the disk class monoid");
  CurvedAInfty c;
  c.basis = a.basis();
  c.precision = precision;
  c.ops.resize(a.max_arity() + 1);
  for (int k = 0; k <= a.max_arity(); ++k) c.ops[k].arity = k;
  for (const auto& [kb, t] : a.tensors()) {
    const Rational e = a.monoid().energy(kb.second);
    if (e >= precision) continue;
    Coefficient rho = 1.0;
    if (!holonomy.empty())
      for (std::size_t g = 0; g < gens.size(); ++g)
        for (int m = 0; m < a.monoid().elements()[kb.second][g]; ++m) rho *= holonomy[g];
    for (const auto& [key, v] : t.entries) {
      NovikovScalar term = NovikovScalar::monomial(rho * v.to_complex(), e, precision);
      auto [slot, inserted] = c.ops[kb.first].entries.try_emplace(key, term);
      if (!inserted) slot->second += term;
    }
  }
  for (auto& op : c.ops) prune(op);
  return c;
}

GappedAInfty invariant_part(const GappedAInfty& a) {
  if (!a.action) return a;
  const auto& act = *a.action;
  bool trivial = true;
  for (const auto& l : act.lie)
    if (!l.is_zero()) trivial = false;
  if (trivial) return a;

  const int n = a.dim();
  const auto& deg = a.basis().degrees;
  // Homogeneous invariant vectors, unit first.
  std::vector<std::vector<Scalar>> vecs;
  std::vector<int> vdeg;
  {
    std::vector<Scalar> unit(n);
    unit[a.basis().unit] = Scalar(1);
    vecs.push_back(unit);
    vdeg.push_back(0);
  }
  std::vector<int> degree_list(deg.begin(), deg.end());
  std::sort(degree_list.begin(), degree_list.end());
  degree_list.erase(std::unique(degree_list.begin(), degree_list.end()), degree_list.end());
  for (int d : degree_list) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (deg[j] == d) cols.push_back(j);
    equivariant::CMatrix stacked(n * act.lie.size(), cols.size());
    for (std::size_t x = 0; x < act.lie.size(); ++x)
      for (int row = 0; row < n; ++row)
        for (std::size_t c = 0; c < cols.size(); ++c) stacked(x * n + row, c) = act.lie[x](row, cols[c]);
    for (const auto& kv : kernel_basis(stacked)) {
      std::vector<Scalar> v(n);
      for (std::size_t c = 0; c < cols.size(); ++c) v[cols[c]] = kv[c];
      auto trial = vecs;
      trial.push_back(v);
      if (rank(equivariant::CMatrix::from_columns(n, trial)) == trial.size()) {
        vecs = std::move(trial);
        vdeg.push_back(d);
      }
    }
  }
  const int m = static_cast<int>(vecs.size());
  const auto V = equivariant::CMatrix::from_columns(n, vecs);
  auto coords = [&](const std::vector<Scalar>& w) {
    auto x = solve(V, w);
    if (!x) throw HypothesisError("structure maps do not preserve the invariant part");
    return *x;
  };

  GradedBasis nb;
  nb.unit = 0;
  for (int j = 0; j < m; ++j) {
    int hit = -1;
    int nonzero = 0;
    for (int i = 0; i < n; ++i)
      if (!vecs[j][i].is_zero()) {
        ++nonzero;
        hit = i;
      }
    nb.labels.push_back(nonzero == 1 && vecs[j][hit] == Scalar(1) ? a.basis().labels[hit] : "v" + std::to_string(j));
    nb.degrees.push_back(vdeg[j]);
  }
  GappedAInfty out(nb, a.monoid(), a.max_arity());
  // Nonzero rows of V for each ambient index.
  std::vector<std::vector<std::pair<int, Scalar>>> support(n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (!vecs[j][i].is_zero()) support[i].emplace_back(j, vecs[j][i]);

  for (const auto& [kb, t] : a.tensors()) {
    out.declare(kb.first, kb.second);
    std::map<std::vector<int>, std::vector<Scalar>> images;
    for (const auto& [key, v] : t.entries) {
      std::vector<int> idx(kb.first, 0);
      std::function<void(int, const Scalar&)> rec = [&](int pos, const Scalar& coef) {
        if (pos == kb.first) {
          auto& img = images[idx];
          if (img.empty()) img.assign(n, Scalar{});
          img[key.back()] += coef;
          return;
        }
        for (const auto& [j, s] : support[key[pos]]) {
          idx[pos] = j;
          rec(pos + 1, coef * s);
        }
      };
      rec(0, v);
    }
    for (const auto& [inputs, img] : images) {
      auto c = coords(img);
      for (int j = 0; j < m; ++j)
        if (!c[j].is_zero()) out.set(kb.first, kb.second, inputs, j, c[j]);
    }
  }
  if (act.g.is_abelian()) {
    GAction na;
    na.g = act.g;
    for (const auto& i : act.interior) {
      equivariant::CMatrix ni(m, m);
      for (int j = 0; j < m; ++j) {
        auto w = i.apply(vecs[j]);
        auto c = coords(w);
        for (int r = 0; r < m; ++r) ni(r, j) = c[r];
      }
      na.interior.push_back(ni);
      na.lie.push_back(equivariant::CMatrix(m, m));
    }
    out.action = na;
  }
  return out;
}

CurvedAInfty evaluate_lambda(const GappedAInfty& a, const std::vector<NovikovScalar>& lambda, const Rational& precision,
                             const std::vector<Coefficient>& holonomy) {
  if (!a.action) throw InputError("lambda evaluation needs a g-action");
  if (!a.action->g.is_abelian()) throw HypothesisError("evaluation requires abelian g");
  if (static_cast<int>(lambda.size()) != a.action->g.rank)
    throw InputError("lambda needs one value per basis element of g");
  GappedAInfty inv = invariant_part(a);
  CurvedAInfty c = associated_curved(inv, precision, holonomy);
  if (c.max_arity() < 1) return c;
  for (std::size_t x = 0; x < lambda.size(); ++x) {
    const auto& i = inv.action->interior[x];
    for (std::size_t row = 0; row < i.rows(); ++row)
      for (std::size_t col = 0; col < i.cols(); ++col) {
        if (i(row, col).is_zero()) continue;
        NovikovScalar term = (-i(row, col).to_complex()) * lambda[x].truncated(precision);
        std::vector<int> key{static_cast<int>(col), static_cast<int>(row)};
        auto [slot, inserted] = c.ops[1].entries.try_emplace(key, term);
        if (!inserted) slot->second += term;
      }
  }
  prune(c.ops[1]);
  return c;
}

CurvedAInfty deform(const CurvedAInfty& c, const std::vector<NovikovScalar>& b, int min_arity, bool verify) {
  if (static_cast<int>(b.size()) != c.dim()) throw InputError("cochain has the wrong dimension");
  std::optional<Rational> vb;
  for (int i = 0; i < c.dim(); ++i) {
    if (b[i].is_zero()) continue;
    if (c.basis.degrees[i] % 2 == 0) throw HypothesisError("not a bounding-cochain candidate: b must be odd");
    auto v = b[i].valuation();
    if (sgn(*v) <= 0) throw HypothesisError("not a bounding-cochain candidate: b must have positive valuation");
    if (!vb || *v < *vb) vb = *v;
  }
  if (!vb) return c;
  if (!c.precision) throw InputError("deformation needs a finite precision");
  const Rational& P = *c.precision;
  // Words with l >= l_stop copies of b vanish below the precision.
  Rational ratio = P / *vb;
  mpz_class ceil_ratio;
  mpz_cdiv_q(ceil_ratio.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  const long l_stop = std::max<long>(1, ceil_ratio.get_si());
  const int k_out = c.max_arity() - static_cast<int>(l_stop - 1);
  if (k_out < min_arity) {
    throw HypothesisError("arity budget exceeded: deformation to precision " + to_string(P) + " needs max arity >= " +
                          std::to_string(min_arity + l_stop - 1));
  }
  CurvedAInfty out;
  out.basis = c.basis;
  out.precision = c.precision;
  out.ops.resize(k_out + 1);
  for (int k = 0; k <= k_out; ++k) out.ops[k].arity = k;
  // Left-to-right over the word: each slot is either an input x or a copy of b.
  using State = std::pair<std::vector<int>, long>;  // (inputs kept, copies of b used)
  for (int n = 0; n <= c.max_arity(); ++n) {
    for (const auto& [key, v] : c.ops[n].entries) {
      std::map<State, NovikovScalar> states;
      states.emplace(State{{}, 0}, v);
      for (int i = 0; i < n; ++i) {
        std::map<State, NovikovScalar> next;
        auto add = [&](State st, const NovikovScalar& coef) {
          if (coef.is_zero()) return;
          auto [slot, inserted] = next.try_emplace(std::move(st), coef);
          if (!inserted) slot->second += coef;
        };
        const bool can_b = !b[key[i]].is_zero();
        for (const auto& [st, coef] : states) {
          if (static_cast<int>(st.first.size()) < k_out) {
            State sx = st;
            sx.first.push_back(key[i]);
            add(std::move(sx), coef);
          }
          if (can_b && st.second + 1 < l_stop) add(State{st.first, st.second + 1}, (coef * b[key[i]]).truncated(P));
        }
        states = std::move(next);
      }
      for (auto& [st, coef] : states) {
        std::vector<int> nk = st.first;
        nk.push_back(key.back());
        auto& op = out.ops[nk.size() - 1];
        auto [slot, inserted] = op.entries.try_emplace(std::move(nk), coef.truncated(P));
        if (!inserted) slot->second += coef.truncated(P);
      }
    }
  }
  for (auto& op : out.ops) prune(op);
  if (verify) {
    double scale = 1.0;
    for (const auto& op : c.ops)
      for (const auto& e : op.entries) scale = std::max(scale, e.second.max_abs_coefficient());
    for (const auto& x : b) scale = std::max(scale, x.max_abs_coefficient());
    const double tol = 1e-9 * std::pow(scale, static_cast<double>(std::min<long>(l_stop, 8)) + 2.0);
    auto rep = check_curved(out, tol);
    if (!rep.pass) throw HypothesisError("deformed structure fails the curved A-infinity relations");
  }
  return out;
}

std::vector<NovikovScalar> validate_candidate(const GappedAInfty& a, const BoundingCochainCandidate& b) {
  const int n = a.dim();
  if (static_cast<int>(b.coefficients.size()) != n) throw InputError("cochain has the wrong dimension");
  for (int i = 0; i < n; ++i) {
    if (b.coefficients[i].is_zero()) continue;
    if (a.basis().degrees[i] != 1) throw HypothesisError("not a bounding-cochain candidate: b must lie in degree 1");
    auto v = b.coefficients[i].valuation();
    if (sgn(*v) <= 0) throw HypothesisError("not a bounding-cochain candidate: b must have positive valuation");
  }
  std::vector<NovikovScalar> db(n, NovikovScalar::zero());
  if (const auto* t = a.tensor(1, 0))
    for (const auto& [key, v] : t->entries) db[key[1]] += v.to_complex() * b.coefficients[key[0]];
  for (const auto& x : db)
    if (!x.is_zero()) throw HypothesisError("not a bounding-cochain candidate: delta b is nonzero");
  std::vector<NovikovScalar> consts;
  if (!a.action) return consts;
  for (const auto& i : a.action->interior) {
    std::vector<NovikovScalar> ib(n, NovikovScalar::zero());
    for (int row = 0; row < n; ++row)
      for (int col = 0; col < n; ++col)
        if (!i(row, col).is_zero()) ib[row] += i(row, col).to_complex() * b.coefficients[col];
    for (int row = 0; row < n; ++row)
      if (row != a.basis().unit && !ib[row].is_zero())
        throw HypothesisError("not a bounding-cochain candidate: i_X b is not a multiple of the unit");
    consts.push_back(ib[a.basis().unit]);
  }
  return consts;
}

CurvedAInfty deform(const GappedAInfty& a, const BoundingCochainCandidate& b, const Rational& precision,
                    const std::vector<Coefficient>& holonomy, int min_arity) {
  validate_candidate(a, b);
  return deform(associated_curved(a, precision, holonomy), b.coefficients, min_arity);
}

std::optional<NovikovScalar> curvature_unit_multiple(const CurvedAInfty& c) {
  if (c.ops.empty()) throw InputError("curved algebra has no operations");
  NovikovScalar w = NovikovScalar::zero(c.precision);
  for (const auto& [key, v] : c.ops[0].entries) {
    if (key.back() != c.basis.unit) {
      if (!v.is_zero()) return std::nullopt;
      continue;
    }
    w = v;
  }
  return w;
}

}  // namespace eqhms::ainfty
