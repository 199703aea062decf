#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eqhms/rational.hpp"

namespace eqhms {

// Field operations used by the generic elimination routines.  A
// specialization provides zero(), one(), is_zero(), inverse() and
// prefer(a, b): whether a is a strictly better pivot than b.
template <class S>
struct FieldTraits;

template <>
struct FieldTraits<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& a) { return sgn(a) == 0; }
  static Rational inverse(const Rational& a) { return Rational(1) / a; }
  static bool prefer(const Rational&, const Rational&) { return false; }
};

template <>
struct FieldTraits<ComplexRational> {
  static ComplexRational zero() { return {}; }
  static ComplexRational one() { return ComplexRational(1); }
  static bool is_zero(const ComplexRational& a) { return a.is_zero(); }
  static ComplexRational inverse(const ComplexRational& a) { return a.inverse(); }
  static bool prefer(const ComplexRational&, const ComplexRational&) { return false; }
};

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, FieldTraits<S>::zero()) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldTraits<S>::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!FieldTraits<S>::is_zero(x)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<S> column(std::size_t j) const {
    std::vector<S> v;
    v.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
    return v;
  }

  std::vector<S> apply(const std::vector<S>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<S> out(rows_, FieldTraits<S>::zero());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const S& a = (*this)(i, j);
        if (FieldTraits<S>::is_zero(a) || FieldTraits<S>::is_zero(v[j])) continue;
        out[i] += a * v[j];
      }
    return out;
  }

  // Stack rows of b under this matrix.
  Matrix vstack(const Matrix& b) const {
    if (rows_ != 0 && b.rows_ != 0 && b.cols_ != cols_) throw std::invalid_argument("vstack shape mismatch");
    Matrix m(rows_ + b.rows_, rows_ ? cols_ : b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) m(rows_ + i, j) = b(i, j);
    return m;
  }

  static Matrix from_columns(std::size_t rows, const std::vector<std::vector<S>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& x = a(i, k);
        if (FieldTraits<S>::is_zero(x)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const S& y = b(k, j);
          if (!FieldTraits<S>::is_zero(y)) c(i, j) += x * y;
        }
      }
    return c;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const S& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

template <class S>
struct Echelon {
  Matrix<S> reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

// Reduced row echelon form.
template <class S>
Echelon<S> row_echelon(Matrix<S> m) {
  using F = FieldTraits<S>;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t best = m.rows();
    for (std::size_t i = r; i < m.rows(); ++i) {
      if (F::is_zero(m(i, c))) continue;
      if (best == m.rows() || F::prefer(m(i, c), m(best, c))) best = i;
    }
    if (best == m.rows()) continue;
    if (best != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(best, j));
    S inv = F::inverse(m(r, c));
    for (std::size_t j = c; j < m.cols(); ++j)
      if (!F::is_zero(m(r, j))) m(r, j) = inv * m(r, j);
    m(r, c) = F::one();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || F::is_zero(m(i, c))) continue;
      S f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (!F::is_zero(m(r, j))) m(i, j) -= f * m(r, j);
      m(i, c) = F::zero();
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

template <class S>
std::size_t rank(const Matrix<S>& m) {
  return row_echelon(m).pivots.size();
}

// Columns spanning the kernel.
template <class S>
std::vector<std::vector<S>> kernel_basis(const Matrix<S>& m) {
  using F = FieldTraits<S>;
  auto e = row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<S>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<S> v(m.cols(), F::zero());
    v[free] = F::one();
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Some x with m x = b, or nullopt when inconsistent.
template <class S>
std::optional<std::vector<S>> solve(const Matrix<S>& m, const std::vector<S>& b) {
  using F = FieldTraits<S>;
  if (b.size() != m.rows()) throw std::invalid_argument("solve shape mismatch");
  Matrix<S> aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto e = row_echelon(std::move(aug));
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  for (std::size_t i = e.pivots.size(); i < m.rows(); ++i)
    if (!F::is_zero(e.reduced(i, m.cols()))) return std::nullopt;
  std::vector<S> x(m.cols(), F::zero());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
  return x;
}

template <class S>
S determinant(Matrix<S> m) {
  using F = FieldTraits<S>;
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  S det = F::one();
  const std::size_t n = m.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = n;
    for (std::size_t i = c; i < n; ++i) {
      if (F::is_zero(m(i, c))) continue;
      if (best == n || F::prefer(m(i, c), m(best, c))) best = i;
    }
    if (best == n) return F::zero();
    if (best != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(best, j));
      det = -det;
    }
    det = det * m(c, c);
    S inv = F::inverse(m(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      if (F::is_zero(m(i, c))) continue;
      S f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

}  // namespace eqhms
