#pragma once

#include <stdexcept>
#include <vector>

#include "lagfib/linalg.hpp"
#include "lagfib/mvpoly.hpp"

namespace lagfib {

/// Symmetric n x n form. Construction through from_matrix validates symmetry
/// (exactly in exact mode, entrywise 1e-12 relative in float mode); the
/// in-library builders fill symmetric pairs directly.
template <class K>
class QuadraticForm {
 public:
  explicit QuadraticForm(int n) : n_(n), m_(n, n) {
    if (n <= 0) throw std::invalid_argument("QuadraticForm: dimension must be positive");
  }

  static QuadraticForm from_matrix(const DenseMatrix<K>& m, double float_tol = 1e-12) {
    if (m.rows() != m.cols()) throw std::invalid_argument("QuadraticForm: matrix not square");
    QuadraticForm q(m.rows());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        if constexpr (scalar_traits<K>::is_exact) {
          if (!(m(i, j) == m(j, i))) throw std::invalid_argument("QuadraticForm: matrix not symmetric");
        } else {
          double d = scalar_traits<K>::abs_approx(m(i, j) - m(j, i));
          double s = std::max(scalar_traits<K>::abs_approx(m(i, j)), scalar_traits<K>::abs_approx(m(j, i)));
          if (d > float_tol * std::max(1.0, s))
            throw std::invalid_argument("QuadraticForm: matrix not symmetric within tolerance");
        }
        q.m_(i, j) = m(i, j);
      }
    return q;
  }

  int n() const { return n_; }
  const DenseMatrix<K>& matrix() const { return m_; }

  const K& at(int i, int j) const { return m_(i, j); }
  void set_sym(int i, int j, const K& v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  bool is_zero() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (!scalar_traits<K>::is_zero(m_(i, j))) return false;
    return true;
  }

  K eval(const std::vector<K>& v) const {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("QuadraticForm::eval: dimension mismatch");
    K acc = scalar_traits<K>::zero();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) acc += m_(i, j) * v[i] * v[j];
    return acc;
  }

  /// Restriction B^T M B to the subspace spanned by the given basis vectors.
  DenseMatrix<K> restricted(const std::vector<std::vector<K>>& basis) const {
    const int d = static_cast<int>(basis.size());
    DenseMatrix<K> r(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        K acc = scalar_traits<K>::zero();
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) acc += m_(i, j) * basis[a][i] * basis[b][j];
        r(a, b) = acc;
      }
    return r;
  }

  QuadraticForm& operator+=(const QuadraticForm& o) {
    check(o);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m_(i, j) += o.m_(i, j);
    return *this;
  }
  QuadraticForm& operator-=(const QuadraticForm& o) {
    check(o);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m_(i, j) -= o.m_(i, j);
    return *this;
  }
  QuadraticForm& operator*=(const K& s) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m_(i, j) *= s;
    return *this;
  }
  friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
  friend QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }
  friend QuadraticForm operator*(QuadraticForm a, const K& s) { return a *= s; }

  friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) {
    return a.n_ == b.n_ && a.m_ == b.m_;
  }

 private:
  void check(const QuadraticForm& o) const {
    if (n_ != o.n_) throw std::invalid_argument("QuadraticForm: dimension mismatch");
  }
  int n_;
  DenseMatrix<K> m_;
};

/// Fully symmetric 3-tensor, stored dense (the dimensions in play are small).
template <class K>
class CubicForm {
 public:
  explicit CubicForm(int n) : n_(n), c_(static_cast<size_t>(n) * n * n, scalar_traits<K>::zero()) {
    if (n <= 0) throw std::invalid_argument("CubicForm: dimension must be positive");
  }

  int n() const { return n_; }

  const K& at(int i, int j, int k) const { return c_[idx(i, j, k)]; }

  /// Assigns the value to all permutations of (i, j, k).
  void set_sym(int i, int j, int k, const K& v) {
    c_[idx(i, j, k)] = v;
    c_[idx(i, k, j)] = v;
    c_[idx(j, i, k)] = v;
    c_[idx(j, k, i)] = v;
    c_[idx(k, i, j)] = v;
    c_[idx(k, j, i)] = v;
  }

  bool is_zero() const {
    for (const K& v : c_)
      if (!scalar_traits<K>::is_zero(v)) return false;
    return true;
  }

  /// (Q_v)_{jk} = sum_i v_i C_{ijk}.
  QuadraticForm<K> contract(const std::vector<K>& v) const {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("CubicForm::contract: dimension mismatch");
    QuadraticForm<K> q(n_);
    for (int j = 0; j < n_; ++j)
      for (int k = j; k < n_; ++k) {
        K acc = scalar_traits<K>::zero();
        for (int i = 0; i < n_; ++i)
          if (!scalar_traits<K>::is_zero(v[i])) acc += v[i] * at(i, j, k);
        q.set_sym(j, k, acc);
      }
    return q;
  }

  K apply(const std::vector<K>& u, const std::vector<K>& v, const std::vector<K>& w) const {
    K acc = scalar_traits<K>::zero();
    for (int i = 0; i < n_; ++i) {
      if (scalar_traits<K>::is_zero(u[i])) continue;
      for (int j = 0; j < n_; ++j) {
        if (scalar_traits<K>::is_zero(v[j])) continue;
        for (int k = 0; k < n_; ++k) acc += u[i] * v[j] * w[k] * at(i, j, k);
      }
    }
    return acc;
  }

  /// Substitution action: result(x) = C(Ax).
  CubicForm transformed(const DenseMatrix<K>& a) const {
    if (a.rows() != n_ || a.cols() != n_) throw std::invalid_argument("CubicForm::transformed: shape mismatch");
    CubicForm r(n_);
    for (int p = 0; p < n_; ++p)
      for (int q = p; q < n_; ++q)
        for (int s = q; s < n_; ++s) {
          K acc = scalar_traits<K>::zero();
          for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
              for (int k = 0; k < n_; ++k) acc += at(i, j, k) * a(i, p) * a(j, q) * a(k, s);
          r.set_sym(p, q, s, acc);
        }
    return r;
  }

  friend bool operator==(const CubicForm& a, const CubicForm& b) { return a.n_ == b.n_ && a.c_ == b.c_; }

 private:
  size_t idx(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_)
      throw std::out_of_range("CubicForm: index out of range");
    return (static_cast<size_t>(i) * n_ + j) * n_ + k;
  }
  int n_;
  std::vector<K> c_;
};

template <class K>
QuadraticForm<K> contract(const CubicForm<K>& c, const std::vector<K>& v) {
  return c.contract(v);
}

/// Symmetric matrix of second partials of p at b. Entries are computed once
/// per unordered pair and mirrored, so the result is symmetric by
/// construction in both scalar modes.
template <class K>
QuadraticForm<K> hessian_at(const MVPoly<K>& p, const std::vector<K>& b) {
  const int n = p.nvars();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("hessian_at: point dimension mismatch");
  QuadraticForm<K> h(n);
  for (int i = 0; i < n; ++i) {
    MVPoly<K> di = p.diff(i);
    for (int j = i; j < n; ++j) h.set_sym(i, j, di.diff(j).eval(b));
  }
  return h;
}

/// Symmetric tensor of third partials of p at b.
template <class K>
CubicForm<K> third_tensor_at(const MVPoly<K>& p, const std::vector<K>& b) {
  const int n = p.nvars();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("third_tensor_at: point dimension mismatch");
  CubicForm<K> c(n);
  for (int i = 0; i < n; ++i) {
    MVPoly<K> di = p.diff(i);
    for (int j = i; j < n; ++j) {
      MVPoly<K> dij = di.diff(j);
      for (int k = j; k < n; ++k) c.set_sym(i, j, k, dij.diff(k).eval(b));
    }
  }
  return c;
}

/// Rank of a symmetric form: exact elimination over the coefficient field in
/// exact mode, singular values above tol * sigma_max in float mode.
template <class K>
int form_rank(const QuadraticForm<K>& q, double tol = 1e-8) {
  if constexpr (scalar_traits<K>::is_exact) {
    (void)tol;
    return exact_rank(q.matrix());
  } else {
    return numeric_rank(to_complex_matrix(q.matrix()), tol);
  }
}

/// Third-partials tensor of a cubic polynomial; a scalar multiple of the
/// coefficient tensor, which is all the degeneracy machinery cares about.
template <class K>
CubicForm<K> cubic_form_of_polynomial(const MVPoly<K>& p) {
  if (p.total_degree() > 3)
    throw std::invalid_argument("cubic_form_of_polynomial: polynomial degree exceeds 3");
  std::vector<K> zero(p.nvars(), scalar_traits<K>::zero());
  return third_tensor_at(p, zero);
}

}  // namespace lagfib
