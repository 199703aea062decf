#include "eqhms/mf.hpp"

#include <algorithm>
#include <numeric>

namespace eqhms::mf {

namespace {

CPolynomial embed(const CPolynomial& p, int nvars) {
  CPolynomial out(nvars);
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> ne = e;
    ne.resize(nvars, 0);
    out.add_term(ne, c);
  }
  return out;
}

CPolynomial poly_determinant(const std::vector<std::vector<CPolynomial>>& m, int nvars) {
  const int k = static_cast<int>(m.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  CPolynomial det(nvars);
  do {
    int inv = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inv;
    CPolynomial t = CPolynomial::constant(nvars, ComplexRational(inv % 2 ? -1 : 1));
    for (int i = 0; i < k && !t.is_zero(); ++i) t = t * m[i][perm[i]];
    det += t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

LagrangeLift lagrange_lift(const CPolynomial& f, const std::vector<CPolynomial>& g,
                           const std::vector<ComplexRational>& point, int order, int max_order) {
  const int n = f.nvars();
  const int r = static_cast<int>(g.size());
  if (static_cast<int>(point.size()) != n) throw InputError("point has the wrong number of coordinates");
  for (const auto& gi : g) {
    if (gi.nvars() != n) throw InputError("g and f use different variables");
    if (!(gi.evaluate(point) == ComplexRational(1))) throw HypothesisError("point does not lie on T = {g = 1}");
  }
  Matrix<ComplexRational> dg(n, r);
  std::vector<ComplexRational> df(n);
  for (int j = 0; j < n; ++j) {
    df[j] = f.derivative(j).evaluate(point);
    for (int i = 0; i < r; ++i) dg(j, i) = g[i].derivative(j).evaluate(point);
  }
  if (static_cast<int>(rank(dg)) != r) throw HypothesisError("dg_1, ..., dg_r are linearly dependent at the point");
  auto lam = solve(dg, df);
  if (!lam) throw HypothesisError("point is not critical for f restricted to T");

  LagrangeLift out;
  out.lambda = *lam;

  // Lifted side in (z, mu) with lambda = lambda* + mu, expanded at the origin.
  const int N = n + r;
  const int M = max_order + 2;
  std::vector<CPolynomial> inv, logs;
  for (const auto& gi : g) {
    const CPolynomial h = (gi - CPolynomial::constant(n, ComplexRational(1))).translated(point);
    CPolynomial pw = CPolynomial::constant(n, ComplexRational(1));
    CPolynomial s_inv = pw;
    CPolynomial s_log(n);
    for (int k = 1; k <= M; ++k) {
      pw = (pw * h).truncated(M);
      s_inv += ComplexRational(k % 2 ? -1 : 1) * pw;
      s_log += ComplexRational(Rational(k % 2 ? 1 : -1) / k) * pw;
    }
    inv.push_back(s_inv);
    logs.push_back(s_log);
  }
  std::vector<CPolynomial> lifted;
  for (int j = 0; j < n; ++j) {
    CPolynomial gen = embed(f.derivative(j).translated(point), N);
    for (int i = 0; i < r; ++i) {
      CPolynomial lam_i = CPolynomial::constant(N, out.lambda[i]) + CPolynomial::variable(N, n + i);
      gen -= lam_i * embed((g[i].derivative(j).translated(point) * inv[i]).truncated(M), N);
    }
    lifted.push_back(gen.truncated(M));
  }
  for (int i = 0; i < r; ++i) lifted.push_back(-embed(logs[i], N));
  out.lifted_dim = local_multiplicity(lifted, JetWindow<ComplexRational>{std::vector<ComplexRational>(N), order}, max_order);

  // Restricted side: g - 1 and the maximal minors of [df; dg].
  std::vector<CPolynomial> restricted;
  for (const auto& gi : g) restricted.push_back(gi - CPolynomial::constant(n, ComplexRational(1)));
  std::vector<std::vector<CPolynomial>> rows;
  rows.emplace_back();
  for (int j = 0; j < n; ++j) rows[0].push_back(f.derivative(j));
  for (const auto& gi : g) {
    rows.emplace_back();
    for (int j = 0; j < n; ++j) rows.back().push_back(gi.derivative(j));
  }
  if (r + 1 <= n) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + r + 1, true);
    do {
      std::vector<std::vector<CPolynomial>> sub(r + 1);
      for (int a = 0; a <= r; ++a)
        for (int j = 0; j < n; ++j)
          if (pick[j]) sub[a].push_back(rows[a][j]);
      CPolynomial minor = poly_determinant(sub, n);
      if (!minor.is_zero()) restricted.push_back(minor);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  if (restricted.empty()) restricted.push_back(CPolynomial(n));
  out.restricted_dim = local_multiplicity(restricted, JetWindow<ComplexRational>{point, order}, max_order);
  out.match = out.lifted_dim == out.restricted_dim;
  return out;
}

}  // namespace eqhms::mf
