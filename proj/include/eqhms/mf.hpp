#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqhms/error.hpp"
#include "eqhms/linalg.hpp"
#include "eqhms/polynomial.hpp"

namespace eqhms::mf {

// Rank of a set of sparse columns (row index -> entry).
template <class S>
std::size_t sparse_rank(std::vector<std::map<int, S>> columns) {
  using F = FieldTraits<S>;
  std::map<int, std::map<int, S>> pivots;  // leading row -> reduced column
  for (auto& col : columns) {
    while (!col.empty()) {
      const int lead = col.rbegin()->first;
      auto it = pivots.find(lead);
      if (it == pivots.end()) {
        pivots.emplace(lead, std::move(col));
        break;
      }
      const S factor = col.rbegin()->second * F::inverse(it->second.rbegin()->second);
      for (const auto& [r, v] : it->second) {
        auto [slot, inserted] = col.try_emplace(r, -(factor * v));
        if (!inserted) {
          slot->second -= factor * v;
          if (F::is_zero(slot->second)) col.erase(slot);
        } else if (F::is_zero(slot->second)) {
          col.erase(slot);
        }
      }
      col.erase(lead);
    }
  }
  return pivots.size();
}

template <class S>
using PolyMatrix = std::vector<std::vector<Polynomial<S>>>;  // row-major

template <class S>
PolyMatrix<S> multiply(const PolyMatrix<S>& a, const PolyMatrix<S>& b, int nvars) {
  const std::size_t n = a.size();
  const std::size_t k = b.size();
  const std::size_t m = k ? b[0].size() : 0;
  PolyMatrix<S> c(n, std::vector<Polynomial<S>>(m, Polynomial<S>(nvars)));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) throw InputError("matrix shape mismatch");
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < k; ++l)
        if (!a[i][l].is_zero() && !b[l][j].is_zero()) c[i][j] += a[i][l] * b[l][j];
  }
  return c;
}

// phi: P1 -> P0 (r0 x r1), psi: P0 -> P1 (r1 x r0).
template <class S>
struct MatrixFactorization {
  Polynomial<S> w;
  PolyMatrix<S> phi;
  PolyMatrix<S> psi;

  int nvars() const { return w.nvars(); }
  int r0() const { return static_cast<int>(phi.size()); }
  int r1() const { return static_cast<int>(psi.size()); }
};

struct VerifyReport {
  bool pass = false;
  double residual = 0.0;
};

template <class S>
void check_shapes(const MatrixFactorization<S>& m) {
  for (const auto& row : m.phi)
    if (static_cast<int>(row.size()) != m.r1()) throw InputError("phi must be r0 x r1");
  for (const auto& row : m.psi)
    if (static_cast<int>(row.size()) != m.r0()) throw InputError("psi must be r1 x r0");
  auto check_vars = [&](const PolyMatrix<S>& x) {
    for (const auto& row : x)
      for (const auto& p : row)
        if (p.nvars() != m.nvars()) throw InputError("matrix entries and w use different variables");
  };
  check_vars(m.phi);
  check_vars(m.psi);
}

// phi psi = w id and psi phi = w id; exact for exact scalars, else below tol.
template <class S>
VerifyReport mf_verify(const MatrixFactorization<S>& m, double tol = 1e-9) {
  check_shapes(m);
  VerifyReport rep;
  bool exact = true;
  auto diff = [&](const PolyMatrix<S>& prod) {
    for (std::size_t i = 0; i < prod.size(); ++i)
      for (std::size_t j = 0; j < prod[i].size(); ++j) {
        Polynomial<S> d = prod[i][j];
        if (i == j) d -= m.w;
        if (!d.is_zero()) exact = false;
        rep.residual = std::max(rep.residual, d.max_abs_coefficient());
      }
  };
  diff(multiply(m.phi, m.psi, m.nvars()));
  diff(multiply(m.psi, m.phi, m.nvars()));
  if constexpr (std::is_same_v<S, ComplexRational>)
    rep.pass = exact;
  else
    rep.pass = rep.residual < tol;
  return rep;
}

// d = sum f_i iota_i + sum w_i e_i^ on the exterior algebra with m generators.
template <class S>
MatrixFactorization<S> koszul_stabilization(const std::vector<Polynomial<S>>& f, const std::vector<Polynomial<S>>& w,
                                            const std::optional<Polynomial<S>>& declared = std::nullopt) {
  if (f.empty() || f.size() != w.size()) throw InputError("f and w lists must be nonempty and of equal length");
  const int m = static_cast<int>(f.size());
  if (m > 12) throw InputError("too many Koszul generators");
  const int n = f[0].nvars();
  Polynomial<S> total(n);
  for (int i = 0; i < m; ++i) total += f[i] * w[i];
  if (declared && !(*declared == total)) throw InputError("sum f_i w_i does not equal the declared w");
  std::vector<unsigned> even, odd;
  std::map<unsigned, int> pos;
  for (unsigned s = 0; s < (1u << m); ++s) {
    auto& v = (__builtin_popcount(s) % 2 == 0) ? even : odd;
    pos[s] = static_cast<int>(v.size());
    v.push_back(s);
  }
  MatrixFactorization<S> mf;
  mf.w = total;
  mf.phi.assign(even.size(), std::vector<Polynomial<S>>(odd.size(), Polynomial<S>(n)));
  mf.psi.assign(odd.size(), std::vector<Polynomial<S>>(even.size(), Polynomial<S>(n)));
  auto sign_before = [](unsigned s, int i) { return (__builtin_popcount(s & ((1u << i) - 1)) % 2 == 0) ? 1 : -1; };
  auto apply = [&](const std::vector<unsigned>& from, PolyMatrix<S>& target) {
    for (std::size_t c = 0; c < from.size(); ++c) {
      const unsigned s = from[c];
      for (int i = 0; i < m; ++i) {
        const S sg = ScalarOps<S>::from_rational(Rational(sign_before(s, i)));
        if (s & (1u << i))
          target[pos[s ^ (1u << i)]][c] += sg * f[i];
        else
          target[pos[s | (1u << i)]][c] += sg * w[i];
      }
    }
  };
  apply(odd, mf.phi);
  apply(even, mf.psi);
  return mf;
}

template <class S>
struct JetWindow {
  std::vector<S> point;
  int order = 4;  // keep total degree <= order
};

namespace detail {

template <class S>
std::vector<Polynomial<S>> translate_all(const std::vector<Polynomial<S>>& gens, const std::vector<S>& point) {
  std::vector<Polynomial<S>> out;
  for (const auto& g : gens) out.push_back(g.translated(point));
  return out;
}

// dim C[[z]] / (I + m^{order+1}) for translated generators.
template <class S>
int quotient_dim(const std::vector<Polynomial<S>>& gens, int nvars, int order) {
  const auto mons = monomials_up_to(nvars, order);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < mons.size(); ++i) index[mons[i]] = static_cast<int>(i);
  std::vector<std::map<int, S>> cols;
  for (const auto& g : gens) {
    const int lo = g.order();
    if (lo < 0 || lo > order) continue;
    for (const auto& a : monomials_up_to(nvars, order - lo)) {
      std::map<int, S> col;
      for (const auto& [e, c] : g.terms()) {
        std::vector<int> ne = e;
        for (int i = 0; i < nvars; ++i) ne[i] += a[i];
        auto it = index.find(ne);
        if (it != index.end()) col[it->second] += c;
      }
      for (auto it = col.begin(); it != col.end();)
        it = FieldTraits<S>::is_zero(it->second) ? col.erase(it) : std::next(it);
      if (!col.empty()) cols.push_back(std::move(col));
    }
  }
  return static_cast<int>(mons.size() - sparse_rank(std::move(cols)));
}

}  // namespace detail

// Jets of increasing order until dim O/(I + m^{D+1}) = dim O/(I + m^{D+2})
// (then m^{D+1} lies in I by Nakayama).
template <class S>
int local_multiplicity(const std::vector<Polynomial<S>>& gens, const JetWindow<S>& window, int max_order = 12) {
  if (gens.empty()) throw InputError("no generators");
  const int n = gens[0].nvars();
  if (static_cast<int>(window.point.size()) != n) throw InputError("expansion point has the wrong dimension");
  if (window.order < 1) throw InputError("jet order must be at least 1");
  const auto t = detail::translate_all(gens, window.point);
  int prev = detail::quotient_dim(t, n, window.order);
  for (int d = window.order + 1; d <= max_order + 1; ++d) {
    const int cur = detail::quotient_dim(t, n, d);
    if (cur == prev) return cur;
    prev = cur;
  }
  throw HypothesisError("not an isolated point at this order");
}

template <class S>
int tyurina_dim(const Polynomial<S>& h, const JetWindow<S>& window, int max_order = 12) {
  std::vector<Polynomial<S>> gens{h};
  for (int i = 0; i < h.nvars(); ++i) gens.push_back(h.derivative(i));
  return local_multiplicity(gens, window, max_order);
}

template <class S>
int milnor_number(const Polynomial<S>& h, const JetWindow<S>& window, int max_order = 12) {
  std::vector<Polynomial<S>> gens;
  for (int i = 0; i < h.nvars(); ++i) gens.push_back(h.derivative(i));
  return local_multiplicity(gens, window, max_order);
}

struct HomDims {
  int even = 0;
  int odd = 0;
  int total() const { return even + odd; }
  bool operator==(const HomDims& o) const { return even == o.even && odd == o.odd; }
};

namespace detail {

template <class S>
PolyMatrix<S> full_differential(const MatrixFactorization<S>& m, const std::vector<S>& point) {
  const int r = m.r0() + m.r1();
  PolyMatrix<S> d(r, std::vector<Polynomial<S>>(r, Polynomial<S>(m.nvars())));
  for (int i = 0; i < m.r0(); ++i)
    for (int j = 0; j < m.r1(); ++j) d[i][m.r0() + j] = m.phi[i][j].translated(point);
  for (int i = 0; i < m.r1(); ++i)
    for (int j = 0; j < m.r0(); ++j) d[m.r0() + i][j] = m.psi[i][j].translated(point);
  for (const auto& row : d)
    for (const auto& p : row)
      if (!p.is_zero() && p.order() == 0)
        throw HypothesisError("matrix factorization is not reduced at the expansion point");
  return d;
}

// Ranks of d restricted to each parity, from jets of degree <= src_order into
// jets of degree <= src_order + 1.
template <class S>
std::pair<std::size_t, std::size_t> hom_ranks(const PolyMatrix<S>& d_src, int r0_src, const PolyMatrix<S>& d_tgt,
                                              int r0_tgt, int nvars, int src_order) {
  const int rs = static_cast<int>(d_src.size());
  const int rt = static_cast<int>(d_tgt.size());
  const auto mons_src = monomials_up_to(nvars, src_order);
  const auto mons_tgt = monomials_up_to(nvars, src_order + 1);
  std::map<std::vector<int>, int> tindex;
  for (std::size_t i = 0; i < mons_tgt.size(); ++i) tindex[mons_tgt[i]] = static_cast<int>(i);
  const int nt = static_cast<int>(mons_tgt.size());
  std::vector<std::map<int, S>> even_cols, odd_cols;
  for (int a = 0; a < rt; ++a)
    for (int b = 0; b < rs; ++b) {
      const int parity = ((a >= r0_tgt) + (b >= r0_src)) % 2;
      const S sign = ScalarOps<S>::from_rational(Rational(parity ? -1 : 1));
      for (const auto& alpha : mons_src) {
        std::map<int, S> col;
        auto add = [&](int row, int colidx, const Polynomial<S>& p, const S& coef) {
          for (const auto& [e, c] : p.terms()) {
            std::vector<int> ne = e;
            for (int i = 0; i < nvars; ++i) ne[i] += alpha[i];
            auto it = tindex.find(ne);
            if (it == tindex.end()) continue;
            col[(row * rs + colidx) * nt + it->second] += coef * c;
          }
        };
        // D' E_ab: column a of D' into column b.
        for (int c = 0; c < rt; ++c)
          if (!d_tgt[c][a].is_zero()) add(c, b, d_tgt[c][a], FieldTraits<S>::one());
        // -(-1)^{|f|} E_ab D: row b of D into row a.
        for (int c = 0; c < rs; ++c)
          if (!d_src[b][c].is_zero()) add(a, c, d_src[b][c], -sign);
        for (auto it = col.begin(); it != col.end();)
          it = FieldTraits<S>::is_zero(it->second) ? col.erase(it) : std::next(it);
        (parity ? odd_cols : even_cols).push_back(std::move(col));
      }
    }
  return {sparse_rank(std::move(even_cols)), sparse_rank(std::move(odd_cols))};
}

template <class S>
HomDims hom_at_order(const PolyMatrix<S>& ds, int r0s, const PolyMatrix<S>& dt, int r0t, int nvars, int order) {
  const int rs = static_cast<int>(ds.size());
  const int rt = static_cast<int>(dt.size());
  const int r1s = rs - r0s;
  const int r1t = rt - r0t;
  const int nm = static_cast<int>(monomials_up_to(nvars, order).size());
  const int even_blocks = r0t * r0s + r1t * r1s;
  const int odd_blocks = r0t * r1s + r1t * r0s;
  auto [rank_even, rank_odd] = hom_ranks(ds, r0s, dt, r0t, nvars, order);
  auto [prev_even, prev_odd] = hom_ranks(ds, r0s, dt, r0t, nvars, order - 1);
  HomDims h;
  h.even = even_blocks * nm - static_cast<int>(rank_even) - static_cast<int>(prev_odd);
  h.odd = odd_blocks * nm - static_cast<int>(rank_odd) - static_cast<int>(prev_even);
  return h;
}

}  // namespace detail

// Cohomology of Hom(M, M') on jets of the given order around the window point,
// with d(f) = d' f - (-1)^{|f|} f d; checked against order + 1.
template <class S>
HomDims hom_cohomology_dim(const MatrixFactorization<S>& m, const MatrixFactorization<S>& mp, const JetWindow<S>& window) {
  check_shapes(m);
  check_shapes(mp);
  if (!(m.w == mp.w)) throw InputError("matrix factorizations of different potentials");
  if (window.order < 1) throw InputError("jet order must be at least 1");
  const int n = m.nvars();
  if (static_cast<int>(window.point.size()) != n) throw InputError("expansion point has the wrong dimension");
  const auto ds = detail::full_differential(m, window.point);
  const auto dt = detail::full_differential(mp, window.point);
  const HomDims a = detail::hom_at_order(ds, m.r0(), dt, mp.r0(), n, window.order);
  const HomDims b = detail::hom_at_order(ds, m.r0(), dt, mp.r0(), n, window.order + 1);
  if (!(a == b)) throw HypothesisError("increase jet order");
  return a;
}

// Clifford algebra of a symmetric bilinear form q: t_i t_j + t_j t_i = 2 q_ij.
template <class S>
class CliffordAlgebra {
 public:
  using Element = std::map<unsigned, S>;  // basis monomial (sorted generators) -> coefficient

  explicit CliffordAlgebra(Matrix<S> q) : q_(std::move(q)) {
    if (q_.rows() != q_.cols()) throw InputError("quadratic form must be square");
    if (q_.rows() > 16) throw InputError("too many Clifford generators");
    for (std::size_t i = 0; i < q_.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (!FieldTraits<S>::is_zero(q_(i, j) - q_(j, i))) throw InputError("quadratic form must be symmetric");
  }

  // q = -H / 2.
  static CliffordAlgebra from_hessian(const Matrix<S>& h) {
    const S half = ScalarOps<S>::from_rational(make_rational(-1, 2));
    return CliffordAlgebra(half * h);
  }

  const Matrix<S>& form() const { return q_; }
  int generators() const { return static_cast<int>(q_.rows()); }
  std::size_t dimension() const { return std::size_t{1} << q_.rows(); }

  Element unit() const { return {{0u, FieldTraits<S>::one()}}; }
  Element generator(int i) const { return {{1u << i, FieldTraits<S>::one()}}; }

  Element multiply(const Element& a, const Element& b) const {
    Element out;
    for (const auto& [ma, ca] : a)
      for (const auto& [mb, cb] : b) {
        Element cur{{ma, ca * cb}};
        for (int j = 0; j < generators(); ++j)
          if (mb & (1u << j)) cur = right_multiply(cur, j);
        accumulate(out, cur);
      }
    return out;
  }

  S coefficient(const Element& a, unsigned mask) const {
    auto it = a.find(mask);
    return it == a.end() ? FieldTraits<S>::zero() : it->second;
  }

 private:
  static void accumulate(Element& out, const Element& x, const S& scale = FieldTraits<S>::one()) {
    for (const auto& [m, c] : x) {
      auto [it, inserted] = out.try_emplace(m, scale * c);
      if (!inserted) it->second += scale * c;
      if (FieldTraits<S>::is_zero(it->second)) out.erase(it);
    }
  }

  Element right_multiply(const Element& x, int j) const {
    Element out;
    for (const auto& [m, c] : x) accumulate(out, word_times(m, j), c);
    return out;
  }

  // theta_mask * theta_j
  Element word_times(unsigned mask, int j) const {
    if (mask == 0) return {{1u << j, FieldTraits<S>::one()}};
    const int last = 31 - __builtin_clz(mask);
    const unsigned rest = mask ^ (1u << last);
    if (last < j) return {{mask | (1u << j), FieldTraits<S>::one()}};
    if (last == j) return {{rest, q_(j, j)}};
    Element out;
    const S two = ScalarOps<S>::from_rational(Rational(2));
    accumulate(out, right_multiply(word_times(rest, j), last), ScalarOps<S>::from_rational(Rational(-1)));
    accumulate(out, {{rest, FieldTraits<S>::one()}}, two * q_(last, j));
    return out;
  }

  Matrix<S> q_;
};

template <class S>
struct GiventalPotential {
  Polynomial<S> f;
  std::vector<Polynomial<S>> g;
  std::vector<S> lambda;
};

template <class S>
struct DLogComponent {
  Polynomial<S> numerator;   // polynomial after clearing
  Polynomial<S> multiplier;  // prod g times the clearing monomial
};

// Components of dF = df - sum lambda_i dg_i / g_i along vector fields given by
// their coefficient lists (default: coordinate fields).
template <class S>
std::vector<DLogComponent<S>> givental_dlog(const GiventalPotential<S>& F,
                                            std::vector<std::vector<Polynomial<S>>> directions = {}) {
  const int n = F.f.nvars();
  if (F.g.size() != F.lambda.size()) throw InputError("need one lambda per g");
  for (const auto& g : F.g)
    if (g.is_zero()) throw HypothesisError("g not invertible");
  if (directions.empty())
    for (int j = 0; j < n; ++j) {
      std::vector<Polynomial<S>> v(n, Polynomial<S>(n));
      v[j] = Polynomial<S>::constant(n, FieldTraits<S>::one());
      directions.push_back(v);
    }
  Polynomial<S> G = Polynomial<S>::constant(n, FieldTraits<S>::one());
  for (const auto& g : F.g) G = G * g;
  std::vector<DLogComponent<S>> out;
  for (const auto& v : directions) {
    if (static_cast<int>(v.size()) != n) throw InputError("direction has the wrong number of components");
    Polynomial<S> num(n);
    for (int j = 0; j < n; ++j) {
      if (v[j].is_zero()) continue;
      Polynomial<S> comp = G * F.f.derivative(j);
      for (std::size_t i = 0; i < F.g.size(); ++i) {
        Polynomial<S> others = Polynomial<S>::constant(n, FieldTraits<S>::one());
        for (std::size_t k = 0; k < F.g.size(); ++k)
          if (k != i) others = others * F.g[k];
        comp -= F.lambda[i] * (F.g[i].derivative(j) * others);
      }
      num += v[j] * comp;
    }
    std::vector<int> shift = num.min_exponent();
    for (int& s : shift) s = s < 0 ? -s : 0;
    DLogComponent<S> c;
    c.numerator = num.shifted(shift);
    c.multiplier = G.shifted(shift);
    out.push_back(std::move(c));
  }
  return out;
}

struct LagrangeLift {
  std::vector<ComplexRational> lambda;  // multipliers at the lifted point
  int restricted_dim = 0;               // J(f_T) at y
  int lifted_dim = 0;                   // J(F) at L(y)
  bool match = false;
};

// F = f - sum lambda_i log g_i on X x C^r, T = {g = 1}.  The restricted side is
// O_X / (g - 1, (r+1)-minors of [df; dg]).
LagrangeLift lagrange_lift(const CPolynomial& f, const std::vector<CPolynomial>& g,
                           const std::vector<ComplexRational>& point, int order = 2, int max_order = 12);

}  // namespace eqhms::mf
