#include "eqhms/equivariant.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <optional>
#include <stdexcept>

#include "eqhms/error.hpp"

namespace eqhms::equivariant {

namespace {

using Element = std::map<WeilMonomial, Scalar>;

double max_abs(const CMatrix& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, m(i, j).abs());
  return r;
}

void add_to(Element& e, const WeilMonomial& m, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = e.find(m);
  if (it == e.end()) {
    e.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) e.erase(it);
}

std::vector<std::vector<int>> exponent_vectors(int r, int max_total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == r) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
    cur[i] = 0;
  };
  rec(0, max_total);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    return sa < sb;
  });
  return out;
}

class WeilBuilder {
 public:
  WeilBuilder(const LieAlgebraData& g, int D) : g_(g), D_(D), r_(g.rank) {}

  std::optional<std::pair<int, WeilMonomial>> multiply(const WeilMonomial& a, const WeilMonomial& b) const {
    if (a.mask & b.mask) return std::nullopt;
    int swaps = 0;
    for (int bit = 0; bit < r_; ++bit)
      if (b.mask & (1u << bit)) swaps += std::popcount(a.mask >> (bit + 1));
    WeilMonomial out;
    out.mask = a.mask | b.mask;
    out.f_exponents.assign(r_, 0);
    int total = 0;
    for (int i = 0; i < r_; ++i) {
      out.f_exponents[i] = a.f_exponents[i] + b.f_exponents[i];
      total += out.f_exponents[i];
    }
    if (total > D_) return std::nullopt;
    return std::make_pair(swaps % 2 ? -1 : 1, out);
  }

  Element multiply(const Element& a, const Element& b) const {
    Element out;
    for (const auto& [ma, ca] : a)
      for (const auto& [mb, cb] : b) {
        auto p = multiply(ma, mb);
        if (!p) continue;
        add_to(out, p->second, Scalar(p->first) * ca * cb);
      }
    return out;
  }

  WeilMonomial unit() const { return {0u, std::vector<int>(r_, 0)}; }
  Element theta(int i) const {
    WeilMonomial m = unit();
    m.mask = 1u << i;
    return {{m, Scalar(1)}};
  }
  Element curvature(int i) const {
    WeilMonomial m = unit();
    m.f_exponents[i] = 1;
    if (D_ < 1) return {};
    return {{m, Scalar(1)}};
  }
  Element one() const { return {{unit(), Scalar(1)}}; }

  // Apply a derivation of the given parity, specified on the generators.
  Element derivation(const WeilMonomial& m, bool odd, const std::vector<Element>& on_theta,
                     const std::vector<Element>& on_f) const {
    std::vector<std::pair<bool, int>> factors;  // (is_theta, index)
    for (int i = 0; i < r_; ++i)
      if (m.mask & (1u << i)) factors.push_back({true, i});
    for (int i = 0; i < r_; ++i)
      for (int e = 0; e < m.f_exponents[i]; ++e) factors.push_back({false, i});
    Element out;
    int odd_before = 0;
    for (std::size_t a = 0; a < factors.size(); ++a) {
      Element left = one();
      for (std::size_t b = 0; b < a; ++b) left = multiply(left, factor(factors[b]));
      Element mid = factors[a].first ? on_theta[factors[a].second] : on_f[factors[a].second];
      Element right = one();
      for (std::size_t b = a + 1; b < factors.size(); ++b) right = multiply(right, factor(factors[b]));
      Element term = multiply(multiply(left, mid), right);
      Scalar sign((odd && odd_before % 2) ? -1 : 1);
      for (const auto& [mm, c] : term) add_to(out, mm, sign * c);
      if (factors[a].first) ++odd_before;
    }
    return out;
  }

  TruncatedWeil build() const {
    TruncatedWeil w;
    w.g = g_;
    w.D = D_;
    for (const auto& exps : exponent_vectors(r_, D_))
      for (unsigned mask = 0; mask < (1u << r_); ++mask) w.basis.push_back({mask, exps});
    std::stable_sort(w.basis.begin(), w.basis.end(),
                     [](const WeilMonomial& a, const WeilMonomial& b) { return a.degree() < b.degree(); });
    for (int k = 0; k < w.dim(); ++k) w.index[w.basis[k]] = k;

    std::vector<Element> d_theta(r_), d_f(r_);
    for (int i = 0; i < r_; ++i) {
      d_theta[i] = curvature(i);
      for (int j = 0; j < r_; ++j)
        for (int k = 0; k < r_; ++k) {
          const Rational& c = g_.c(i, j, k);
          if (sgn(c) == 0) continue;
          for (const auto& [m, v] : multiply(theta(j), theta(k))) add_to(d_theta[i], m, Scalar(Rational(-c / 2)) * v);
          for (const auto& [m, v] : multiply(curvature(j), theta(k))) add_to(d_f[i], m, Scalar(c) * v);
        }
    }
    w.delta = to_operator(w, [&](const WeilMonomial& m) { return derivation(m, true, d_theta, d_f); });
    for (int j = 0; j < r_; ++j) {
      std::vector<Element> i_theta(r_), i_f(r_), l_theta(r_), l_f(r_);
      i_theta[j] = one();
      for (int i = 0; i < r_; ++i)
        for (int k = 0; k < r_; ++k) {
          const Rational& c = g_.c(i, j, k);
          if (sgn(c) == 0) continue;
          for (const auto& [m, v] : theta(k)) add_to(l_theta[i], m, Scalar(Rational(-c)) * v);
          for (const auto& [m, v] : curvature(k)) add_to(l_f[i], m, Scalar(Rational(-c)) * v);
        }
      w.interior.push_back(to_operator(w, [&](const WeilMonomial& m) { return derivation(m, true, i_theta, i_f); }));
      w.lie.push_back(to_operator(w, [&](const WeilMonomial& m) { return derivation(m, false, l_theta, l_f); }));
    }
    return w;
  }

  SparseOperator left_multiplication(const TruncatedWeil& w, const Element& x) const {
    return to_operator(w, [&](const WeilMonomial& m) { return multiply(x, Element{{m, Scalar(1)}}); });
  }

  Element theta_elem(int i) const { return theta(i); }
  Element curvature_elem(int i) const { return curvature(i); }

 private:
  Element factor(const std::pair<bool, int>& f) const { return f.first ? theta(f.second) : curvature(f.second); }

  SparseOperator to_operator(const TruncatedWeil& w, const std::function<Element(const WeilMonomial&)>& f) const {
    SparseOperator op(w.dim(), w.dim());
    for (int col = 0; col < w.dim(); ++col) {
      SparseOperator::Column c;
      for (const auto& [m, v] : f(w.basis[col])) {
        auto it = w.index.find(m);
        if (it == w.index.end()) continue;  // beyond the truncation
        c.push_back({it->second, v});
      }
      op.set_column(col, std::move(c));
    }
    return op;
  }

  const LieAlgebraData& g_;
  int D_;
  int r_;
};

SparseOperator::Column combine(const SparseOperator::Column& col) {
  std::map<int, Scalar> acc;
  for (const auto& [i, v] : col) acc[i] += v;
  SparseOperator::Column out;
  for (auto& [i, v] : acc)
    if (!v.is_zero()) out.push_back({i, v});
  return out;
}

// Express each column of images (local coordinates) in the basis columns.
CMatrix coordinates(const CMatrix& basis, const CMatrix& images) {
  const std::size_t n = basis.cols();
  CMatrix aug(basis.rows(), n + images.cols());
  for (std::size_t i = 0; i < basis.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = basis(i, j);
    for (std::size_t j = 0; j < images.cols(); ++j) aug(i, n + j) = images(i, j);
  }
  auto e = row_echelon(std::move(aug));
  CMatrix out(n, images.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] >= n) throw std::logic_error("differential leaves the model subspace");
    for (std::size_t j = 0; j < images.cols(); ++j) out(e.pivots[r], j) = e.reduced(r, n + j);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

LieAlgebraData LieAlgebraData::abelian(int rank) {
  LieAlgebraData g;
  g.rank = rank;
  g.constants.assign(rank * rank * rank, Rational(0));
  return g;
}

LieAlgebraData LieAlgebraData::so3() {
  LieAlgebraData g = abelian(3);
  // [e_j, e_k] = eps_{jki} e_i
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    g.c(i, j, k) = 1;
    g.c(i, k, j) = -1;
  }
  return g;
}

bool LieAlgebraData::is_abelian() const {
  return std::all_of(constants.begin(), constants.end(), [](const Rational& c) { return sgn(c) == 0; });
}

void LieAlgebraData::validate() const {
  if (rank < 0 || static_cast<int>(constants.size()) != rank * rank * rank)
    throw InputError("structure constants must have rank^3 entries");
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      for (int k = 0; k < rank; ++k)
        if (c(i, j, k) != -c(i, k, j)) throw InputError("structure constants are not antisymmetric");
  // sum_m c^m_{jk} c^i_{lm} + cyclic = 0
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      for (int k = 0; k < rank; ++k)
        for (int l = 0; l < rank; ++l) {
          Rational s = 0;
          for (int m = 0; m < rank; ++m)
            s += c(m, j, k) * c(i, l, m) + c(m, k, l) * c(i, j, m) + c(m, l, j) * c(i, k, m);
          if (sgn(s) != 0) throw InputError("structure constants violate the Jacobi identity");
        }
}

GDiffSpace point_space(int rank) {
  GDiffSpace m;
  m.labels = {"1"};
  m.degrees = {0};
  m.delta = CMatrix(1, 1);
  m.interior.assign(rank, CMatrix(1, 1));
  m.lie.assign(rank, CMatrix(1, 1));
  return m;
}

GDiffSpace circle_trivial() {
  GDiffSpace m;
  m.labels = {"1", "e1"};
  m.degrees = {0, 1};
  m.delta = CMatrix(2, 2);
  m.interior = {CMatrix(2, 2)};
  m.lie = {CMatrix(2, 2)};
  return m;
}

GDiffSpace circle_free() {
  GDiffSpace m = circle_trivial();
  m.interior[0](0, 1) = Scalar(1);
  return m;
}

GDiffSpace chevalley_eilenberg(const LieAlgebraData& g) { return weil_algebra(g, 0).as_gdiff(); }

AxiomReport check_gdiff_axioms(const GDiffSpace& m, const LieAlgebraData& g) {
  const std::size_t n = m.dim();
  const int r = g.rank;
  auto square = [n](const CMatrix& a) { return a.rows() == n && a.cols() == n; };
  if (m.labels.size() != n || !square(m.delta) || static_cast<int>(m.interior.size()) != r ||
      static_cast<int>(m.lie.size()) != r)
    throw InputError("g-differential space: dimension mismatch");
  for (int j = 0; j < r; ++j)
    if (!square(m.interior[j]) || !square(m.lie[j])) throw InputError("g-differential space: dimension mismatch");

  AxiomReport rep;
  auto record = [&rep](std::string name, double res) {
    bool pass = res == 0.0;
    rep.residuals.push_back({std::move(name), res, pass});
    rep.pass = rep.pass && pass;
  };

  double deg_res = 0.0;
  auto check_degree = [&](const CMatrix& a, int shift) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!a(i, j).is_zero() && m.degrees[i] != m.degrees[j] + shift) deg_res = std::max(deg_res, a(i, j).abs());
  };
  check_degree(m.delta, 1);
  for (int j = 0; j < r; ++j) {
    check_degree(m.interior[j], -1);
    check_degree(m.lie[j], 0);
  }
  record("degree", deg_res);
  record("delta^2", max_abs(m.delta * m.delta));

  double r_dl = 0, r_cartan = 0, r_ll = 0, r_li = 0, r_ii = 0;
  for (int a = 0; a < r; ++a) {
    const auto &ia = m.interior[a], &la = m.lie[a];
    r_dl = std::max(r_dl, max_abs(m.delta * la - la * m.delta));
    r_cartan = std::max(r_cartan, max_abs(m.delta * ia + ia * m.delta - la));
    for (int b = 0; b < r; ++b) {
      const auto &ib = m.interior[b], &lb = m.lie[b];
      CMatrix l_br(n, n), i_br(n, n);
      for (int i = 0; i < r; ++i) {
        const Rational& c = g.c(i, a, b);
        if (sgn(c) == 0) continue;
        l_br = l_br + Scalar(c) * m.lie[i];
        i_br = i_br + Scalar(c) * m.interior[i];
      }
      r_ll = std::max(r_ll, max_abs(la * lb - lb * la - l_br));
      r_li = std::max(r_li, max_abs(la * ib - ib * la - i_br));
      r_ii = std::max(r_ii, max_abs(ia * ib + ib * ia));
    }
  }
  record("delta L - L delta", r_dl);
  record("delta i + i delta - L", r_cartan);
  record("[L_X, L_Y] - L_[X,Y]", r_ll);
  record("[L_X, i_Y] - i_[X,Y]", r_li);
  record("i_X i_Y + i_Y i_X", r_ii);
  return rep;
}

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator SparseOperator::from_dense(const CMatrix& m) {
  SparseOperator op(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Column c;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_zero()) c.push_back({static_cast<int>(i), m(i, j)});
    op.columns_[j] = std::move(c);
  }
  return op;
}

SparseOperator SparseOperator::identity(int n) {
  SparseOperator op(n, n);
  for (int j = 0; j < n; ++j) op.columns_[j] = {{j, Scalar(1)}};
  return op;
}

void SparseOperator::set_column(int j, Column c) { columns_[j] = combine(c); }

CVector SparseOperator::apply(const CVector& v) const {
  if (static_cast<int>(v.size()) != cols()) throw std::invalid_argument("operator shape mismatch");
  CVector out(rows_);
  for (int j = 0; j < cols(); ++j) {
    if (v[j].is_zero()) continue;
    for (const auto& [i, a] : columns_[j]) out[i] += a * v[j];
  }
  return out;
}

CMatrix SparseOperator::block(const std::vector<int>& rows, const std::vector<int>& cols) const {
  std::map<int, int> row_pos;
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
  CMatrix m(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& [i, a] : columns_[cols[j]]) {
      auto it = row_pos.find(i);
      if (it != row_pos.end()) m(it->second, j) = a;
    }
  return m;
}

CMatrix SparseOperator::dense() const {
  CMatrix m(rows_, cols());
  for (int j = 0; j < cols(); ++j)
    for (const auto& [i, a] : columns_[j]) m(i, j) = a;
  return m;
}

bool SparseOperator::is_zero() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const Column& c) { return c.empty(); });
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("operator product shape mismatch");
  SparseOperator out(a.rows(), b.cols());
  for (int j = 0; j < b.cols(); ++j) {
    SparseOperator::Column c;
    for (const auto& [k, bv] : b.column(j))
      for (const auto& [i, av] : a.column(k)) c.push_back({i, av * bv});
    out.set_column(j, std::move(c));
  }
  return out;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("operator sum shape mismatch");
  SparseOperator out(a.rows(), a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    SparseOperator::Column c = a.column(j);
    c.insert(c.end(), b.column(j).begin(), b.column(j).end());
    out.set_column(j, std::move(c));
  }
  return out;
}

SparseOperator operator*(const Scalar& s, const SparseOperator& a) {
  SparseOperator out(a.rows(), a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    SparseOperator::Column c = a.column(j);
    for (auto& e : c) e.second = s * e.second;
    out.set_column(j, std::move(c));
  }
  return out;
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return a + Scalar(-1) * b; }

// ---------------------------------------------------------------------------
// Weil algebra

int WeilMonomial::degree() const { return std::popcount(mask) + 2 * f_degree(); }

int WeilMonomial::f_degree() const {
  int s = 0;
  for (int e : f_exponents) s += e;
  return s;
}

std::vector<int> TruncatedWeil::degrees() const {
  std::vector<int> d;
  for (const auto& m : basis) d.push_back(m.degree());
  return d;
}

std::string TruncatedWeil::label(int k) const {
  const auto& m = basis[k];
  std::string s;
  for (int i = 0; i < g.rank; ++i)
    if (m.mask & (1u << i)) s += "t" + std::to_string(i + 1);
  for (int i = 0; i < g.rank; ++i)
    for (int e = 0; e < m.f_exponents[i]; ++e) s += "F" + std::to_string(i + 1);
  return s.empty() ? "1" : s;
}

GDiffSpace TruncatedWeil::as_gdiff() const {
  GDiffSpace m;
  for (int k = 0; k < dim(); ++k) m.labels.push_back(label(k));
  m.degrees = degrees();
  m.delta = delta.dense();
  for (const auto& op : interior) m.interior.push_back(op.dense());
  for (const auto& op : lie) m.lie.push_back(op.dense());
  return m;
}

std::vector<int> TruncatedWeil::horizontal() const {
  std::vector<int> h;
  for (int k = 0; k < dim(); ++k)
    if (basis[k].mask == 0) h.push_back(k);
  return h;
}

SparseOperator TruncatedWeil::multiply_theta(int j) const {
  WeilBuilder b(g, D);
  return b.left_multiplication(*this, b.theta_elem(j));
}

SparseOperator TruncatedWeil::multiply_f(int j) const {
  WeilBuilder b(g, D);
  return b.left_multiplication(*this, b.curvature_elem(j));
}

TruncatedWeil weil_algebra(const LieAlgebraData& g, int D) {
  g.validate();
  if (D < 0) throw InputError("truncation degree must be nonnegative");
  if (g.rank > 8) throw InputError("Lie algebra rank above 8 is not supported");
  return WeilBuilder(g, D).build();
}

// ---------------------------------------------------------------------------
// Models

namespace {

// Operator A (x) 1 on M (x) W.
SparseOperator left_factor(const CMatrix& a, int dim_w) {
  const int dm = static_cast<int>(a.rows());
  SparseOperator op(dm * dim_w, dm * dim_w);
  for (int m = 0; m < dm; ++m)
    for (int w = 0; w < dim_w; ++w) {
      SparseOperator::Column c;
      for (int i = 0; i < dm; ++i)
        if (!a(i, m).is_zero()) c.push_back({i * dim_w + w, a(i, m)});
      op.set_column(m * dim_w + w, std::move(c));
    }
  return op;
}

// Operator 1 (x) B on M (x) W with the Koszul sign (-1)^{|B||m|}.
SparseOperator right_factor(const SparseOperator& b, const std::vector<int>& m_degrees, bool odd) {
  const int dm = static_cast<int>(m_degrees.size());
  const int dw = b.rows();
  SparseOperator op(dm * dw, dm * dw);
  for (int m = 0; m < dm; ++m) {
    Scalar sign((odd && (m_degrees[m] % 2 != 0)) ? -1 : 1);
    for (int w = 0; w < dw; ++w) {
      SparseOperator::Column c;
      for (const auto& [i, v] : b.column(w)) c.push_back({m * dw + i, sign * v});
      op.set_column(m * dw + w, std::move(c));
    }
  }
  return op;
}

SparseOperator restrict_to(const SparseOperator& op, const std::vector<int>& idx) {
  return SparseOperator::from_dense(op.block(idx, idx));
}

}  // namespace

TensorModel tensor_model(const GDiffSpace& m, const LieAlgebraData& g, int D, ModelKind kind) {
  auto rep = check_gdiff_axioms(m, g);
  if (!rep.pass) {
    std::string failed;
    for (const auto& r : rep.residuals)
      if (!r.pass) failed += (failed.empty() ? "" : ", ") + r.name;
    throw HypothesisError("input is not a g-differential space (" + failed + ")");
  }
  if (D < 1) throw InputError("truncation degree D must be at least 1");
  TruncatedWeil w = weil_algebra(g, D);
  const int r = g.rank;
  TensorModel t;
  t.kind = kind;
  t.D = D;
  t.dim_m = static_cast<int>(m.dim());
  t.min_degree = m.dim() ? *std::min_element(m.degrees.begin(), m.degrees.end()) : 0;
  t.safe_max_degree = 2 * D - 1 + t.min_degree;

  if (kind == ModelKind::Weil) {
    t.dim_w = w.dim();
    auto wd = w.degrees();
    for (int a = 0; a < t.dim_m; ++a)
      for (int b = 0; b < t.dim_w; ++b) {
        t.degrees.push_back(m.degrees[a] + wd[b]);
        t.f_degrees.push_back(w.basis[b].f_degree());
        t.theta_masks.push_back(w.basis[b].mask);
      }
    t.delta = left_factor(m.delta, t.dim_w) + right_factor(w.delta, m.degrees, true);
    for (int j = 0; j < r; ++j) {
      t.interior.push_back(left_factor(m.interior[j], t.dim_w) + right_factor(w.interior[j], m.degrees, true));
      t.lie.push_back(left_factor(m.lie[j], t.dim_w) + right_factor(w.lie[j], m.degrees, false));
      t.multiply_f.push_back(right_factor(w.multiply_f(j), m.degrees, false));
    }
    return t;
  }

  const auto h = w.horizontal();
  t.dim_w = static_cast<int>(h.size());
  for (int a = 0; a < t.dim_m; ++a)
    for (int b : h) {
      t.degrees.push_back(m.degrees[a] + w.basis[b].degree());
      t.f_degrees.push_back(w.basis[b].f_degree());
      t.theta_masks.push_back(0u);
    }
  std::vector<SparseOperator> f_mult;
  for (int j = 0; j < r; ++j) f_mult.push_back(restrict_to(w.multiply_f(j), h));
  SparseOperator delta = left_factor(m.delta, t.dim_w);
  for (int j = 0; j < r; ++j) {
    // delta_Car = delta (x) 1 - sum_j i_{e_j} (x) F^j
    delta = delta - left_factor(m.interior[j], t.dim_w) * right_factor(f_mult[j], m.degrees, false);
    t.lie.push_back(left_factor(m.lie[j], t.dim_w) + right_factor(restrict_to(w.lie[j], h), m.degrees, false));
    t.multiply_f.push_back(right_factor(f_mult[j], m.degrees, false));
  }
  t.delta = delta;
  return t;
}

int EquivariantComplex::dim(int k) const {
  auto it = basis.find(k);
  return it == basis.end() ? 0 : static_cast<int>(it->second.size());
}

bool EquivariantComplex::squares_to_zero() const {
  for (int k = min_degree; k + 1 <= safe_max_degree; ++k) {
    auto a = differential.find(k), b = differential.find(k + 1);
    if (a == differential.end() || b == differential.end()) continue;
    if (a->second.cols() == 0 || b->second.rows() == 0) continue;
    if (!(b->second * a->second).is_zero()) return false;
  }
  return true;
}

EquivariantComplex build_model(const GDiffSpace& m, const LieAlgebraData& g, int D, ModelKind kind) {
  TensorModel t = tensor_model(m, g, D, kind);
  EquivariantComplex c;
  c.kind = kind;
  c.D = D;
  c.min_degree = t.min_degree;
  c.safe_max_degree = t.safe_max_degree;
  c.ambient_dim = t.dim();

  std::map<int, std::vector<int>> idx;
  for (int a = 0; a < t.dim(); ++a) idx[t.degrees[a]].push_back(a);
  std::map<int, CMatrix> local_basis;
  for (int k = c.min_degree; k <= c.safe_max_degree + 1; ++k) {
    const auto& cols = idx[k];
    CMatrix constraints(0, cols.size());
    auto stack = [&](const CMatrix& b) { constraints = constraints.vstack(b); };
    if (kind == ModelKind::Weil)
      for (const auto& op : t.interior) stack(op.block(idx[k - 1], cols));
    for (const auto& op : t.lie) stack(op.block(cols, cols));
    std::vector<CVector> kern;
    if (constraints.rows() == 0) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        CVector e(cols.size());
        e[j] = Scalar(1);
        kern.push_back(std::move(e));
      }
    } else {
      kern = kernel_basis(constraints);
    }
    local_basis[k] = CMatrix::from_columns(cols.size(), kern);
    auto& amb = c.basis[k];
    auto& fd = c.f_degree[k];
    for (const auto& v : kern) {
      CVector a(t.dim());
      int f = -2;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (v[j].is_zero()) continue;
        a[cols[j]] = v[j];
        int fj = t.f_degrees[cols[j]];
        f = (f == -2 || f == fj) ? fj : -1;
      }
      amb.push_back(std::move(a));
      fd.push_back(f == -2 ? 0 : f);
    }
  }
  for (int k = c.min_degree; k <= c.safe_max_degree; ++k) {
    const auto& src = c.basis[k];
    CMatrix images(idx[k + 1].size(), src.size());
    for (std::size_t j = 0; j < src.size(); ++j) {
      CVector img = t.delta.apply(src[j]);
      for (std::size_t i = 0; i < idx[k + 1].size(); ++i) images(i, j) = img[idx[k + 1][i]];
    }
    c.differential[k] = coordinates(local_basis[k + 1], images);
  }
  return c;
}

std::map<int, int> cohomology(const EquivariantComplex& c) { return cohomology(c, c.safe_max_degree); }

std::map<int, int> cohomology(const EquivariantComplex& c, int max_degree) {
  if (max_degree > c.safe_max_degree)
    throw InputError("degree " + std::to_string(max_degree) + " is beyond the truncation-safe range (max " +
                     std::to_string(c.safe_max_degree) + "); increase D");
  if (!c.squares_to_zero()) throw std::logic_error("model differential does not square to zero");
  std::map<int, int> h;
  for (int k = c.min_degree; k <= max_degree; ++k) {
    int n = c.dim(k);
    int rk_out = n ? static_cast<int>(rank(c.differential.at(k))) : 0;
    int rk_in = 0;
    auto it = c.differential.find(k - 1);
    if (it != c.differential.end() && it->second.rows() && it->second.cols()) rk_in = static_cast<int>(rank(it->second));
    h[k] = n - rk_out - rk_in;
  }
  return h;
}

MathaiQuillenReport mathai_quillen(const GDiffSpace& m, const LieAlgebraData& g, int D) {
  TensorModel weil = tensor_model(m, g, D, ModelKind::Weil);
  TensorModel cartan = tensor_model(m, g, D, ModelKind::Cartan);
  TruncatedWeil w = weil_algebra(g, D);
  const int r = g.rank;
  const int n = weil.dim();

  // gamma = sum_j theta^j o (i_{e_j} (x) 1), theta^j acting by left multiplication.
  SparseOperator gamma(n, n);
  for (int j = 0; j < r; ++j)
    gamma = gamma + right_factor(w.multiply_theta(j), m.degrees, true) * left_factor(m.interior[j], weil.dim_w);

  MathaiQuillenReport rep;
  rep.phi = SparseOperator::identity(n);
  rep.phi_inverse = SparseOperator::identity(n);
  SparseOperator power = SparseOperator::identity(n);
  Rational factorial = 1;
  for (int k = 1;; ++k) {
    power = power * gamma;
    if (power.is_zero()) {
      rep.nilpotency_order = k;
      break;
    }
    factorial *= k;
    rep.phi = rep.phi + Scalar(Rational(1 / factorial)) * power;
    rep.phi_inverse = rep.phi_inverse + Scalar(Rational((k % 2 ? -1 : 1) / factorial)) * power;
  }
  rep.invertible = (rep.phi * rep.phi_inverse - SparseOperator::identity(n)).is_zero();

  // Weil coordinate (m, w) with w horizontal -> Cartan coordinate (m, s).
  const auto h = w.horizontal();
  std::map<int, int> s_index;
  for (std::size_t s = 0; s < h.size(); ++s) s_index[h[s]] = static_cast<int>(s);
  auto project = [&](const CVector& v, bool& theta_free) {
    CVector out(cartan.dim());
    for (int a = 0; a < n; ++a) {
      if (v[a].is_zero()) continue;
      int mm = a / weil.dim_w, ww = a % weil.dim_w;
      auto it = s_index.find(ww);
      if (it == s_index.end()) {
        theta_free = false;
        continue;
      }
      out[mm * cartan.dim_w + it->second] = v[a];
    }
    return out;
  };

  EquivariantComplex wm = build_model(m, g, D, ModelKind::Weil);
  EquivariantComplex cm = build_model(m, g, D, ModelKind::Cartan);
  rep.lands_in_cartan = true;
  rep.intertwines = true;
  rep.dimensions_agree = true;
  for (int k = wm.min_degree; k <= wm.safe_max_degree; ++k) {
    if (wm.dim(k) != cm.dim(k)) rep.dimensions_agree = false;
    for (const auto& b : wm.basis.at(k)) {
      bool theta_free = true;
      CVector y = project(rep.phi.apply(b), theta_free);
      for (const auto& op : cartan.lie)
        for (const auto& x : op.apply(y))
          if (!x.is_zero()) theta_free = false;
      if (!theta_free) rep.lands_in_cartan = false;
      bool ok = true;
      CVector lhs = cartan.delta.apply(y);
      CVector rhs = project(rep.phi.apply(weil.delta.apply(b)), ok);
      if (!ok || lhs != rhs) rep.intertwines = false;
    }
  }
  return rep;
}

}  // namespace eqhms::equivariant
