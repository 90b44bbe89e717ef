#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lagfib/scalar.hpp"

namespace lagfib {

/// Minimal dense matrix for exact field arithmetic (Rational or
/// GaussianRational). Float-mode linear algebra goes through Eigen instead.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  DenseMatrix transposed() const {
    DenseMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("DenseMatrix::apply: size mismatch");
    std::vector<T> y(rows_, T(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix: product shape mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  int rows_, cols_;
  std::vector<T> a_;
};

/// In-place reduced row echelon form over a field; returns pivot columns.
template <class T>
std::vector<int> rref(DenseMatrix<T>& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (!(m(i, c) == T(0))) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    T inv = T(1) / m(r, c);
    for (int j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == T(0)) continue;
      T f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
int exact_rank(DenseMatrix<T> m) {
  return static_cast<int>(rref(m).size());
}

/// Basis of the right kernel {x : m x = 0}, from the RREF free columns.
template <class T>
std::vector<std::vector<T>> kernel_basis(DenseMatrix<T> m) {
  const int n = m.cols();
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (int c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    std::vector<T> v(n, T(0));
    v[c] = T(1);
    for (size_t r = 0; r < pivots.size(); ++r)
      if (pivots[r] < c) v[pivots[r]] = -m(static_cast<int>(r), c);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves a square system exactly; nullopt when singular.
template <class T>
std::optional<std::vector<T>> solve_exact(DenseMatrix<T> a, const std::vector<T>& b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_exact: shape mismatch");
  DenseMatrix<T> aug(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) != n || pivots.back() == n) return std::nullopt;
  std::vector<T> x(n, T(0));
  for (int i = 0; i < n; ++i) x[pivots[i]] = aug(i, n);
  return x;
}

template <class T>
T determinant_exact(DenseMatrix<T> m) {
  const int n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("determinant_exact: matrix not square");
  T det(1);
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (!(m(i, c) == T(0))) {
        p = i;
        break;
      }
    if (p < 0) return T(0);
    if (p != c) {
      for (int j = c; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det = det * m(c, c);
    T inv = T(1) / m(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (m(i, c) == T(0)) continue;
      T f = m(i, c) * inv;
      for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Sylvester test: all leading principal minors positive. T must be ordered
/// (Rational); used for exact positive-definiteness of Im tau.
inline bool positive_definite_exact(const DenseMatrix<Rational>& m) {
  const int n = m.rows();
  for (int k = 1; k <= n; ++k) {
    DenseMatrix<Rational> lead(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lead(i, j) = m(i, j);
    if (!(determinant_exact(lead) > 0)) return false;
  }
  return true;
}

/// Canonical basis (RREF rows) of the span of the given vectors; enables
/// exact subspace comparison.
template <class T>
std::vector<std::vector<T>> span_canonical_basis(const std::vector<std::vector<T>>& vecs) {
  if (vecs.empty()) return {};
  const int n = static_cast<int>(vecs[0].size());
  DenseMatrix<T> m(static_cast<int>(vecs.size()), n);
  for (size_t i = 0; i < vecs.size(); ++i) {
    if (static_cast<int>(vecs[i].size()) != n)
      throw std::invalid_argument("span_canonical_basis: inconsistent vector lengths");
    for (int j = 0; j < n; ++j) m(static_cast<int>(i), j) = vecs[i][j];
  }
  std::vector<int> pivots = rref(m);
  std::vector<std::vector<T>> basis;
  for (size_t r = 0; r < pivots.size(); ++r) {
    std::vector<T> v(n);
    for (int j = 0; j < n; ++j) v[j] = m(static_cast<int>(r), j);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
bool same_span(const std::vector<std::vector<T>>& a, const std::vector<std::vector<T>>& b) {
  return span_canonical_basis(a) == span_canonical_basis(b);
}

template <class T>
std::optional<DenseMatrix<T>> inverse_exact(const DenseMatrix<T>& m) {
  const int n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("inverse_exact: matrix not square");
  DenseMatrix<T> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  DenseMatrix<T> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// ---------------------------------------------------------------------------
// Float-mode helpers (Eigen).

/// Number of singular values above tol * max(sigma_max, floor_scale).
/// floor_scale = 0 gives the pure relative policy; rank decisions on
/// Jacobians pass floor_scale = 1 so that noise-level matrices report rank 0.
inline int rank_from_singular_values(const Eigen::VectorXd& sv, double tol, double floor_scale = 0.0) {
  if (sv.size() == 0) return 0;
  double smax = sv(0);
  for (int i = 1; i < sv.size(); ++i) smax = std::max(smax, sv(i));
  double thresh = tol * std::max(smax, floor_scale);
  if (smax == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++r;
  return r;
}

inline int numeric_rank(const Eigen::MatrixXcd& m, double tol, double floor_scale = 0.0) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol, floor_scale);
}

inline int numeric_rank(const Eigen::MatrixXd& m, double tol, double floor_scale = 0.0) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol, floor_scale);
}

/// sin of the largest principal angle between the column spans of a and b
/// (orthonormalized internally). Zero iff the spans agree.
inline double subspace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.cols() != b.cols()) return 1.0;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qa(a), qb(b);
  Eigen::MatrixXcd ua = qa.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd ub = qb.householderQ() * Eigen::MatrixXcd::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ua.adjoint() * ub);
  double cmin = svd.singularValues().minCoeff();
  cmin = std::min(1.0, std::max(-1.0, cmin));
  return std::sqrt(std::max(0.0, 1.0 - cmin * cmin));
}

template <class T>
Eigen::MatrixXcd to_complex_matrix(const DenseMatrix<T>& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = to_complex(m(i, j));
  return out;
}

inline Eigen::MatrixXd to_real_matrix(const DenseMatrix<Rational>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

inline Eigen::MatrixXd to_real_matrix(const DenseMatrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace lagfib
