#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lagfib/errors.hpp"
#include "lagfib/forms.hpp"
#include "lagfib/rng.hpp"

namespace lagfib {

/// Kernel of the linear map v -> contract(C, v) into symmetric matrices.
/// Nonempty kernel <=> the cubic is a cone; the kernel directions span the
/// vertex. Exact mode eliminates over the coefficient field; float mode uses
/// right singular vectors below tol (approximate verdict).
template <class K>
std::optional<std::vector<std::vector<K>>> is_cone(const CubicForm<K>& c, double tol = 1e-8) {
  const int n = c.n();
  const int rows = n * (n + 1) / 2;
  DenseMatrix<K> m(rows, n);
  int r = 0;
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k, ++r)
      for (int i = 0; i < n; ++i) m(r, i) = c.at(i, j, k);

  if constexpr (scalar_traits<K>::is_exact) {
    (void)tol;
    auto basis = kernel_basis(m);
    if (basis.empty()) return std::nullopt;
    return basis;
  } else {
    Eigen::MatrixXcd em = to_complex_matrix(m);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    std::vector<std::vector<K>> basis;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol * std::max(smax, 1.0)) continue;
      std::vector<K> v(n);
      for (int j = 0; j < n; ++j) v[j] = svd.matrixV()(j, i);
      basis.push_back(std::move(v));
    }
    for (int extra = sv.size(); extra < n; ++extra) {
      std::vector<K> v(n, scalar_traits<K>::zero());
      v[extra] = scalar_traits<K>::one();
      basis.push_back(std::move(v));
    }
    if (basis.empty()) return std::nullopt;
    return basis;
  }
}

namespace detail {

/// Determinant of a matrix of polynomials by Laplace expansion with
/// memoization on column subsets.
template <class K>
MVPoly<K> poly_det(const std::vector<std::vector<MVPoly<K>>>& m, int nvars) {
  const int n = static_cast<int>(m.size());
  std::map<std::uint32_t, MVPoly<K>> memo;
  // minor over rows [n - popcount(mask), n) and the columns in mask
  auto rec = [&](auto&& self, std::uint32_t mask) -> MVPoly<K> {
    if (mask == 0) return MVPoly<K>::constant(nvars, scalar_traits<K>::one());
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    int row = n - __builtin_popcount(mask);
    MVPoly<K> acc(nvars);
    int sign = 1;
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1u << j))) continue;
      if (!m[row][j].is_zero()) {
        MVPoly<K> term = m[row][j] * self(self, mask & ~(1u << j));
        if (sign < 0) term *= -scalar_traits<K>::one();
        acc += term;
      }
      sign = -sign;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return rec(rec, (1u << n) - 1);
}

}  // namespace detail

/// D(lambda) = det(contract(C, lambda)) as an exact polynomial, homogeneous
/// of degree n or identically zero. Exact scalars only: identity-vanishing is
/// an algebraic decision.
template <class K>
MVPoly<K> det_polynomial(const CubicForm<K>& c) {
  static_assert(scalar_traits<K>::is_exact, "det_polynomial requires the exact scalar mode");
  const int n = c.n();
  std::vector<std::vector<MVPoly<K>>> m(n, std::vector<MVPoly<K>>(n, MVPoly<K>(n)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      MVPoly<K> e(n);
      for (int i = 0; i < n; ++i) {
        typename MVPoly<K>::exponents ex(n, 0);
        ex[i] = 1;
        e.add_term(ex, c.at(i, j, k));
      }
      m[j][k] = std::move(e);
    }
  return detail::poly_det(m, n);
}

/// Evaluates det(contract(C, lambda)) on the integer grid {0..n}^n with early
/// exit. A degree-<=n polynomial vanishing on that grid vanishes identically,
/// so this decides the same predicate as det_polynomial(c).is_zero(); it is
/// kept as an independent route for cross-checks.
template <class K>
bool det_vanishes_on_grid(const CubicForm<K>& c) {
  static_assert(scalar_traits<K>::is_exact, "det_vanishes_on_grid requires the exact scalar mode");
  const int n = c.n();
  std::vector<int> lam(n, 0);
  while (true) {
    bool all_zero = true;
    for (int v : lam)
      if (v != 0) all_zero = false;
    if (!all_zero) {
      std::vector<K> l(n);
      for (int i = 0; i < n; ++i) l[i] = scalar_traits<K>::from_int(lam[i]);
      if (!(determinant_exact(c.contract(l).matrix()) == K(0))) return false;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++lam[i] <= n) break;
      lam[i] = 0;
    }
    if (i == n) return true;
  }
}

/// Exact mode: the determinant polynomial vanishes identically. Float mode:
/// every one of `samples` seeded random contractions is rank-deficient -- a
/// probabilistic verdict, flagged as such by classify().
template <class K>
bool all_partials_degenerate(const CubicForm<K>& c, double tol = 1e-8, int samples = 32,
                             std::uint64_t seed = 0) {
  if constexpr (scalar_traits<K>::is_exact) {
    (void)tol;
    (void)samples;
    (void)seed;
    return det_polynomial(c).is_zero();
  } else {
    const int n = c.n();
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
      std::vector<K> lambda(n);
      for (int i = 0; i < n; ++i) lambda[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      if (form_rank(c.contract(lambda), tol) >= n) return false;
    }
    return true;
  }
}

/// true iff every partial-derivative quadric of C vanishes identically on the
/// span of W (exactly in exact mode, below tol * max(1, |C|) in float mode).
template <class K>
bool vanishes_doubly(const CubicForm<K>& c, const std::vector<std::vector<K>>& w, double tol = 1e-8) {
  if (w.empty()) return true;
  const int n = c.n();
  double scale = 1.0;
  if constexpr (!scalar_traits<K>::is_exact) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) scale = std::max(scale, scalar_traits<K>::abs_approx(c.at(i, j, k)));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<K> e(n, scalar_traits<K>::zero());
    e[i] = scalar_traits<K>::one();
    DenseMatrix<K> r = c.contract(e).restricted(w);
    for (int a = 0; a < r.rows(); ++a)
      for (int b = 0; b < r.cols(); ++b) {
        if constexpr (scalar_traits<K>::is_exact) {
          if (!(r(a, b) == K(0))) return false;
        } else {
          if (scalar_traits<K>::abs_approx(r(a, b)) > tol * scale) return false;
        }
      }
  }
  return true;
}

struct PlaneRecoveryConfig {
  std::uint64_t seed = 0;
  int draws = 12;
  int retries = 3;
  double tol = 1e-8;  // float mode only
};

namespace detail {

template <class K>
std::vector<K> random_integer_vector(int n, Rng& rng) {
  std::vector<K> v(n);
  for (int i = 0; i < n; ++i) v[i] = scalar_traits<K>::from_int(rng.uniform_int(-20, 20));
  return v;
}

/// Scales an exact vector so its first nonzero entry is 1 (canonical form).
inline std::vector<GaussianRational> normalize_exact(std::vector<GaussianRational> v) {
  for (const auto& x : v) {
    if (!x.is_zero()) {
      GaussianRational inv = GaussianRational(1) / x;
      for (auto& y : v) y *= inv;
      break;
    }
  }
  return v;
}

}  // namespace detail

struct PlaneRecovery {
  std::optional<std::vector<std::vector<GaussianRational>>> plane;
  std::string diagnostic;
  std::vector<std::vector<GaussianRational>> kernel_witnesses;
  int rounds_used = 0;
};

/// Recovers the 3-dimensional singular plane of a 5-variable non-cone cubic
/// with degenerate partials, from kernels of rank-4 sampled contractions.
/// Verification via vanishes_doubly is mandatory; failure reports a
/// diagnostic instead of a plane.
inline PlaneRecovery singular_plane(const CubicForm<GaussianRational>& c,
                                    PlaneRecoveryConfig cfg = {}) {
  PlaneRecovery out;
  const int n = c.n();
  if (n != 5) throw precondition_error("cubic_classify", "singular_plane is defined for n = 5 only");
  if (is_cone(c)) throw precondition_error("cubic_classify", "singular_plane requires a non-cone input");
  if (!all_partials_degenerate(c))
    throw precondition_error("cubic_classify", "singular_plane requires degenerate partials");

  Rng rng(cfg.seed);
  std::vector<std::vector<GaussianRational>> collected;
  for (int round = 0; round < cfg.retries; ++round) {
    out.rounds_used = round + 1;
    for (int d = 0; d < cfg.draws; ++d) {
      auto lambda = detail::random_integer_vector<GaussianRational>(n, rng);
      QuadraticForm<GaussianRational> q = c.contract(lambda);
      auto ker = kernel_basis(q.matrix());
      if (ker.size() != 1) continue;  // want rank exactly 4
      collected.push_back(detail::normalize_exact(ker[0]));
      out.kernel_witnesses.push_back(collected.back());
    }
    auto basis = span_canonical_basis(collected);
    if (basis.size() == 3) {
      if (vanishes_doubly(c, basis)) {
        out.plane = basis;
        return out;
      }
      out.diagnostic = "candidate 3-space failed double-vanishing verification";
      return out;
    }
    if (basis.size() > 3) {
      out.diagnostic = "kernel vectors span more than 3 dimensions; input violates the plane dichotomy";
      return out;
    }
  }
  out.diagnostic = "fewer than 3 independent kernel directions found after retries";
  return out;
}

/// Float-mode plane recovery via SVD spectral gaps; approximate.
inline PlaneRecovery singular_plane_float(const CubicForm<Complex>& c, PlaneRecoveryConfig cfg,
                                          std::vector<std::vector<Complex>>& plane_out) {
  PlaneRecovery out;
  const int n = c.n();
  if (n != 5) throw precondition_error("cubic_classify", "singular_plane is defined for n = 5 only");
  Rng rng(cfg.seed);
  Eigen::MatrixXcd stacked(n, 0);
  for (int round = 0; round < cfg.retries; ++round) {
    out.rounds_used = round + 1;
    for (int d = 0; d < cfg.draws; ++d) {
      std::vector<Complex> lambda(n);
      for (int i = 0; i < n; ++i) lambda[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      Eigen::MatrixXcd q = to_complex_matrix(c.contract(lambda).matrix());
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q, Eigen::ComputeThinV);
      if (rank_from_singular_values(svd.singularValues(), cfg.tol) != n - 1) continue;
      stacked.conservativeResize(n, stacked.cols() + 1);
      stacked.col(stacked.cols() - 1) = svd.matrixV().col(n - 1);
    }
    if (stacked.cols() >= 3) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> span(stacked, Eigen::ComputeThinU);
      int dim = rank_from_singular_values(span.singularValues(), cfg.tol);
      if (dim == 3) {
        std::vector<std::vector<Complex>> basis(3, std::vector<Complex>(n));
        for (int b = 0; b < 3; ++b)
          for (int i = 0; i < n; ++i) basis[b][i] = span.matrixU()(i, b);
        if (vanishes_doubly(c, basis, cfg.tol)) {
          plane_out = basis;
          out.plane.emplace();  // marker; float basis returned separately
          return out;
        }
        out.diagnostic = "candidate 3-space failed double-vanishing verification";
        return out;
      }
      if (dim > 3) {
        out.diagnostic = "kernel vectors span more than 3 dimensions; input violates the plane dichotomy";
        return out;
      }
    }
  }
  out.diagnostic = "fewer than 3 independent kernel directions found after retries";
  return out;
}

/// true iff det(mu Q0 - contract(C, lambda)) is not identically zero in
/// (mu, lambda). Exact scalars only.
template <class K>
bool pencil_nondegenerate(const QuadraticForm<K>& q0, const CubicForm<K>& c) {
  static_assert(scalar_traits<K>::is_exact, "pencil_nondegenerate requires the exact scalar mode");
  const int n = c.n();
  if (q0.n() != n) throw std::invalid_argument("pencil_nondegenerate: dimension mismatch");
  // entries are linear in (mu, lambda_1..lambda_n)
  std::vector<std::vector<MVPoly<K>>> m(n, std::vector<MVPoly<K>>(n, MVPoly<K>(n + 1)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      MVPoly<K> e(n + 1);
      typename MVPoly<K>::exponents ex(n + 1, 0);
      ex[0] = 1;
      e.add_term(ex, q0.at(j, k));
      for (int i = 0; i < n; ++i) {
        typename MVPoly<K>::exponents el(n + 1, 0);
        el[i + 1] = 1;
        e.add_term(el, -c.at(i, j, k));
      }
      m[j][k] = std::move(e);
    }
  return !detail::poly_det(m, n + 1).is_zero();
}

/// The canonical 5-variable cubic X1^2 X3 + X2^2 X4 + X1 X2 X5 (third-partials
/// tensor): not a cone, every partial derivative degenerate, singular exactly
/// along the plane {X1 = X2 = 0}.
inline CubicForm<GaussianRational> plane_singular_example() {
  CubicForm<GaussianRational> c(5);
  c.set_sym(0, 0, 2, GaussianRational(2));  // X1^2 X3
  c.set_sym(1, 1, 3, GaussianRational(2));  // X2^2 X4
  c.set_sym(0, 1, 4, GaussianRational(1));  // X1 X2 X5
  return c;
}

/// Random symmetric cubic with integer entries in [-bound, bound].
inline CubicForm<GaussianRational> random_cubic_form(int n, Rng& rng, int bound = 9) {
  CubicForm<GaussianRational> c(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        c.set_sym(i, j, k, scalar_traits<GaussianRational>::from_int(rng.uniform_int(-bound, bound)));
  return c;
}

/// Random integer matrix with determinant +-1 (a short product of elementary
/// row operations), together with its exact inverse by construction.
inline DenseMatrix<GaussianRational> random_unimodular(int n, Rng& rng, int ops = 6) {
  DenseMatrix<GaussianRational> a = DenseMatrix<GaussianRational>::identity(n);
  for (int t = 0; t < ops; ++t) {
    int i = static_cast<int>(rng.uniform_int(0, n - 1));
    int j = static_cast<int>(rng.uniform_int(0, n - 1));
    if (i == j) continue;
    long cmul = rng.uniform_int(0, 1) ? 1 : -1;
    if (rng.uniform_int(0, 2) == 0) cmul *= 2;
    for (int k = 0; k < n; ++k) a(i, k) += GaussianRational(cmul) * a(j, k);
  }
  return a;
}

/// Random cone: a cubic supported on a hyperplane's worth of variables,
/// conjugated by a random unimodular change of coordinates.
inline CubicForm<GaussianRational> random_cone_cubic(int n, Rng& rng, int bound = 9) {
  CubicForm<GaussianRational> c(n);
  for (int i = 0; i + 1 < n; ++i)
    for (int j = i; j + 1 < n; ++j)
      for (int k = j; k + 1 < n; ++k)
        c.set_sym(i, j, k, scalar_traits<GaussianRational>::from_int(rng.uniform_int(-bound, bound)));
  return c.transformed(random_unimodular(n, rng));
}

template <class K>
struct ClassificationReport {
  int n = 0;
  bool cone = false;
  std::vector<std::vector<K>> vertex_basis;
  bool partials_degenerate = false;
  bool probabilistic = false;  // float-mode degeneracy verdict
  int lambda_samples = 0;
  std::optional<MVPoly<K>> det_poly;  // exact mode
  std::optional<std::vector<std::vector<K>>> plane;
  std::string plane_diagnostic;
  std::vector<std::vector<K>> kernel_witnesses;
};

/// Full classification driver: cone test, degenerate-partials test, and for
/// 5-variable non-cone degenerate inputs the singular-plane recovery.
inline ClassificationReport<GaussianRational> classify(const CubicForm<GaussianRational>& c,
                                                       PlaneRecoveryConfig cfg = {}) {
  ClassificationReport<GaussianRational> rep;
  rep.n = c.n();
  auto vertex = is_cone(c);
  rep.cone = vertex.has_value();
  if (vertex) rep.vertex_basis = *vertex;
  rep.det_poly = det_polynomial(c);
  rep.partials_degenerate = rep.det_poly->is_zero();
  if (rep.n == 5 && !rep.cone && rep.partials_degenerate) {
    PlaneRecovery pr = singular_plane(c, cfg);
    rep.plane = pr.plane;
    rep.plane_diagnostic = pr.diagnostic;
    rep.kernel_witnesses = pr.kernel_witnesses;
  }
  return rep;
}

inline ClassificationReport<Complex> classify(const CubicForm<Complex>& c, PlaneRecoveryConfig cfg = {}) {
  ClassificationReport<Complex> rep;
  rep.n = c.n();
  rep.probabilistic = true;
  rep.lambda_samples = 32;
  auto vertex = is_cone(c, cfg.tol);
  rep.cone = vertex.has_value();
  if (vertex) rep.vertex_basis = *vertex;
  rep.partials_degenerate = all_partials_degenerate(c, cfg.tol, rep.lambda_samples, cfg.seed);
  if (rep.n == 5 && !rep.cone && rep.partials_degenerate) {
    std::vector<std::vector<Complex>> basis;
    PlaneRecovery pr = singular_plane_float(c, cfg, basis);
    if (pr.plane) rep.plane = basis;
    rep.plane_diagnostic = pr.diagnostic;
  }
  return rep;
}

}  // namespace lagfib
