#pragma once

#include <string>
#include <vector>

#include "lagfib/betti.hpp"
#include "lagfib/cubic.hpp"

namespace lagfib {

/// One predictor-corrector walk along a Betti fiber, with the affinity and
/// holomorphy residuals of the traced points.
struct FiberTrace {
  std::vector<std::vector<Complex>> points;
  std::vector<double> point_residuals;  // |a(b_t) - a(b_0)|_inf per point
  double affine_residual = 0.0;
  double holo_residual = 0.0;
  int rank = 0;
  int kernel_dim = 0;
  int steps_taken = 0;
  int corrector_failures = 0;
};

namespace detail {

/// Flat coordinates of a base point: (Re z_1..Re z_n, Re g_1..Re g_n) where
/// g_i are the first partials of the potential. The additive constants are
/// pinned by the literal polynomial values.
inline Eigen::VectorXd flat_coordinates(const detail::Jet3<Complex>& gjet, const std::vector<Complex>& b) {
  const int n = static_cast<int>(b.size());
  std::vector<Complex> grad = gjet.gradient_at(b);
  Eigen::VectorXd x(2 * n);
  for (int i = 0; i < n; ++i) {
    x(i) = b[i].real();
    x(n + i) = grad[i].real();
  }
  return x;
}

/// Kernel basis (orthonormal, 2n x 2k) of a Jacobian, aligned against a
/// reference frame so predictor directions vary continuously along a trace.
inline Eigen::MatrixXd aligned_kernel(const Eigen::MatrixXd& j, int kdim, const Eigen::MatrixXd& ref) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  Eigen::MatrixXd v = svd.matrixV().rightCols(kdim);
  if (ref.cols() == kdim && ref.rows() == v.rows()) {
    Eigen::MatrixXd proj = v * (v.transpose() * ref);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(proj);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(proj.rows(), kdim);
    // keep orientation of each column matched to the reference
    for (int c = 0; c < kdim; ++c)
      if (q.col(c).dot(ref.col(c)) < 0) q.col(c) = -q.col(c);
    return q;
  }
  return v;
}

}  // namespace detail

/// Traces the Betti fiber through b0: predictor steps along Jacobian kernel
/// directions (round-robin over a kernel basis), corrector = least-squares
/// Newton back onto {a = a(b0)}. Requires the rank to be locally constant and
/// below 2n at b0, probed on the +/- axis perturbations at 10x the step size.
inline FiberTrace fiber_trace(const Potential<Complex>& pot, const Section<Complex>& sec,
                              const std::vector<Complex>& b0, int steps = 200, double step_size = 1e-2,
                              double corrector_tol = 1e-10, double rank_tol = 1e-8) {
  BettiSolver<Complex> solver(pot, sec, rank_tol);
  const int n = solver.n();
  const int d = 2 * n;

  BettiState<Complex> st0 = solver.state(b0);
  if (st0.rank >= d)
    throw precondition_error("foliation", "Betti rank is maximal at the base point; no fiber to trace");
  const double probe_radius = 10.0 * step_size;
  for (int r = 0; r < d; ++r) {
    for (int sgn : {+1, -1}) {
      std::vector<Complex> bp = b0;
      if (r < n)
        bp[r] += Complex(sgn * probe_radius, 0.0);
      else
        bp[r - n] += Complex(0.0, sgn * probe_radius);
      BettiState<Complex> stp;
      try {
        stp = solver.state(bp);
      } catch (const precondition_error&) {
        throw precondition_error("foliation", "rank probe left the admissible region");
      }
      if (stp.rank != st0.rank)
        throw precondition_error("foliation", "Betti rank is not locally constant at the base point");
    }
  }

  const int kdim = d - st0.rank;
  FiberTrace tr;
  tr.rank = st0.rank;
  tr.kernel_dim = kdim;

  Eigen::VectorXd target(d);
  for (int i = 0; i < d; ++i) target(i) = st0.a[i];

  detail::Jet3<Complex> gjet(pot.g, 1);

  Eigen::VectorXd x = detail::realify(b0);
  tr.points.push_back(b0);
  tr.point_residuals.push_back(0.0);

  NewtonConfig corrector;
  corrector.tol = corrector_tol;
  corrector.max_iters = 25;

  Eigen::MatrixXd ref;  // kernel alignment frame
  for (int s = 0; s < steps; ++s) {
    std::vector<Complex> b = detail::complexify(x);
    auto a = solver.coords(b);
    DenseMatrix<double> jd = solver.jacobian_analytic(b, a);
    Eigen::MatrixXd j = to_real_matrix(jd);
    Eigen::MatrixXd kernel = detail::aligned_kernel(j, kdim, ref);
    ref = kernel;
    Eigen::VectorXd dir = kernel.col(s % kdim);
    Eigen::VectorXd xp = x + step_size * dir;
    NewtonOutcome nw = detail::newton_to_target(solver, xp, target, corrector);
    if (!nw.converged) {
      ++tr.corrector_failures;
      break;
    }
    x = nw.x;
    tr.points.push_back(detail::complexify(x));
    tr.point_residuals.push_back(nw.residual);
    ++tr.steps_taken;
  }
  if (tr.points.size() < 2)
    throw precondition_error("foliation", "corrector diverged before any trace point was produced");

  // affinity: the flat coordinates of the trace must fit a kdim-dimensional
  // affine subspace; residual = first singular value beyond that dimension
  const int np = static_cast<int>(tr.points.size());
  Eigen::MatrixXd flat(np, d);
  for (int i = 0; i < np; ++i) flat.row(i) = detail::flat_coordinates(gjet, tr.points[i]).transpose();
  Eigen::RowVectorXd centroid = flat.colwise().mean();
  Eigen::MatrixXd centered = flat.rowwise() - centroid;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  tr.affine_residual = (kdim < sv.size()) ? sv(kdim) : 0.0;

  // holomorphy: for covectors u spanning the image of the Jacobian at b0,
  // sum_i u_i f_i must be constant along the fiber
  Eigen::MatrixXd j0 = to_real_matrix(solver.jacobian_analytic(b0, st0.a));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd0(j0, Eigen::ComputeFullU);
  std::vector<Eigen::VectorXd> us;
  for (int i = 0; i < svd0.singularValues().size(); ++i)
    if (svd0.singularValues()(i) > rank_tol * std::max(svd0.singularValues()(0), 1.0))
      us.push_back(svd0.matrixU().col(i));
  auto frame_values = [&](const std::vector<Complex>& b) {
    std::vector<Complex> f(d);
    std::vector<Complex> grad = gjet.gradient_at(b);
    for (int i = 0; i < n; ++i) {
      f[i] = b[i];
      f[n + i] = grad[i];
    }
    return f;
  };
  std::vector<Complex> f0 = frame_values(tr.points.front());
  for (const auto& pt : tr.points) {
    std::vector<Complex> f = frame_values(pt);
    for (const auto& u : us) {
      Complex acc = 0.0;
      for (int i = 0; i < d; ++i) acc += u(i) * (f[i] - f0[i]);
      tr.holo_residual = std::max(tr.holo_residual, std::abs(acc));
    }
  }
  return tr;
}

/// Leaf direction at b: the singular plane of the third-derivative tensor.
/// Defined for n = 5; the cubic-classification gates propagate.
template <class K>
std::vector<std::vector<K>> leaf_subspace(const Potential<K>& pot, const std::vector<K>& b,
                                          PlaneRecoveryConfig cfg = {}) {
  if (pot.n != 5) throw precondition_error("foliation", "leaf_subspace is defined for n = 5 only");
  CubicForm<K> c = third_tensor_at(pot.g, b);
  if constexpr (scalar_traits<K>::is_exact) {
    PlaneRecovery pr = singular_plane(c, cfg);
    if (!pr.plane)
      throw precondition_error("foliation", "singular plane not recovered: " + pr.diagnostic);
    return *pr.plane;
  } else {
    std::vector<std::vector<Complex>> basis;
    if (is_cone(c, cfg.tol)) throw precondition_error("cubic_classify", "singular_plane requires a non-cone input");
    if (!all_partials_degenerate(c, cfg.tol, 32, cfg.seed))
      throw precondition_error("cubic_classify", "singular_plane requires degenerate partials");
    PlaneRecovery pr = singular_plane_float(c, cfg, basis);
    if (!pr.plane)
      throw precondition_error("foliation", "singular plane not recovered: " + pr.diagnostic);
    return basis;
  }
}

struct LeafReport {
  double constancy_residual = 0.0;
  double quadraticity_residual = 0.0;
  double affine_partials_residual = 0.0;
  int probes_used = 0;
  int probes_skipped = 0;
  int plane_recovery_failures = 0;
  bool pass = false;
};

namespace detail {

template <class K>
std::vector<K> scale_to_unit(const std::vector<K>& v) {
  // normalize by the entry of largest magnitude; keeps exact vectors exact
  int best = 0;
  double mag = -1.0;
  for (size_t i = 0; i < v.size(); ++i) {
    double m = scalar_traits<K>::abs_approx(v[i]);
    if (m > mag) {
      mag = m;
      best = static_cast<int>(i);
    }
  }
  std::vector<K> out = v;
  if (mag > 0) {
    K inv = scalar_traits<K>::one() / v[best];
    for (auto& x : out) x = x * inv;
  }
  return out;
}

template <class K>
Eigen::MatrixXcd basis_matrix(const std::vector<std::vector<K>>& basis) {
  if (basis.empty()) return {};
  Eigen::MatrixXcd m(static_cast<int>(basis[0].size()), static_cast<int>(basis.size()));
  for (size_t c = 0; c < basis.size(); ++c)
    for (size_t r = 0; r < basis[c].size(); ++r) m(static_cast<int>(r), static_cast<int>(c)) = to_complex(basis[c][r]);
  return m;
}

}  // namespace detail

/// Probes the leaf through b along its own directions and reports three
/// residuals: constancy of the recovered plane, third derivatives of g in
/// leaf-direction triples (quadraticity of g on the leaf) and leaf-direction
/// Hessians of the partials g_i (affinity of the g_i on the leaf).
/// The leaf direction defaults to the recovered singular plane at b; a
/// caller-supplied candidate direction is probed the same way, which is how
/// foliation-breaking perturbations are surfaced as FAIL rather than refusal.
template <class K>
LeafReport leaf_checks(const Potential<K>& pot, const std::vector<K>& b, int probes = 10,
                       const typename scalar_traits<K>::real_type& probe_scale = typename scalar_traits<K>::real_type(1) / 100,
                       double tol = 1e-6,
                       const std::vector<std::vector<K>>* candidate_leaf = nullptr,
                       PlaneRecoveryConfig cfg = {}) {
  if (pot.n != 5) throw precondition_error("foliation", "leaf_checks is defined for n = 5 only");
  const int n = pot.n;
  std::vector<std::vector<K>> w = candidate_leaf ? *candidate_leaf : leaf_subspace(pot, b, cfg);
  for (auto& v : w) v = detail::scale_to_unit(v);
  Eigen::MatrixXcd wmat = detail::basis_matrix(w);

  LeafReport rep;
  // probe pattern: +/- each basis direction, then pair sums, then the triple
  std::vector<std::vector<K>> directions;
  for (size_t i = 0; i < w.size(); ++i) {
    directions.push_back(w[i]);
    std::vector<K> neg(w[i].size());
    for (size_t j = 0; j < w[i].size(); ++j) neg[j] = -w[i][j];
    directions.push_back(std::move(neg));
  }
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = i + 1; j < w.size(); ++j) {
      std::vector<K> sum(w[i].size());
      for (size_t t = 0; t < sum.size(); ++t) sum[t] = w[i][t] + w[j][t];
      directions.push_back(std::move(sum));
    }
  if (w.size() == 3) {
    std::vector<K> all(w[0].size());
    for (size_t t = 0; t < all.size(); ++t) all[t] = w[0][t] + w[1][t] + w[2][t];
    directions.push_back(std::move(all));
  }

  K scale = scalar_traits<K>::from_parts(probe_scale, typename scalar_traits<K>::real_type(0));
  detail::Jet3<K> gjet(pot.g, 3);
  for (int p = 0; p < probes && p < static_cast<int>(directions.size()); ++p) {
    std::vector<K> bp = b;
    for (int i = 0; i < n; ++i) bp[i] += scale * directions[p][i];
    PeriodFrame<K> fr{bp, gjet.hessian_at(bp), {}, {}};
    if (!check_riemann(fr).admissible) {
      ++rep.probes_skipped;
      continue;
    }
    ++rep.probes_used;
    CubicForm<K> c = gjet.third_at(bp);
    for (size_t i = 0; i < w.size(); ++i)
      for (size_t j = i; j < w.size(); ++j) {
        for (size_t k = j; k < w.size(); ++k)
          rep.quadraticity_residual =
              std::max(rep.quadraticity_residual, scalar_traits<K>::abs_approx(c.apply(w[i], w[j], w[k])));
        for (int l = 0; l < n; ++l) {
          std::vector<K> e(n, scalar_traits<K>::zero());
          e[l] = scalar_traits<K>::one();
          rep.affine_partials_residual =
              std::max(rep.affine_partials_residual, scalar_traits<K>::abs_approx(c.apply(e, w[i], w[j])));
        }
      }
    try {
      auto wp = leaf_subspace(pot, bp, cfg);
      rep.constancy_residual =
          std::max(rep.constancy_residual, subspace_distance(wmat, detail::basis_matrix(wp)));
    } catch (const precondition_error&) {
      ++rep.plane_recovery_failures;
      rep.constancy_residual = 1.0;
    }
  }
  rep.pass = rep.constancy_residual < tol && rep.quadraticity_residual < tol &&
             rep.affine_partials_residual < tol;
  return rep;
}

struct SectionLeafCompat {
  bool compatible = false;
  double restricted_norm = 0.0;       // size of Hess f restricted to the leaf
  std::optional<bool> pencil_degenerate;  // exact mode: must be true when compatible
  bool consistent = true;             // compatible implies pencil degenerate
};

/// Compatible iff the Hessian of f at b vanishes on the leaf direction. In
/// exact mode a compatible section additionally has its (mu, lambda) pencil
/// with the cubic identically degenerate; the report carries that check.
template <class K>
SectionLeafCompat section_leaf_compat(const Potential<K>& pot, const Section<K>& sec,
                                      const std::vector<K>& b, double tol = 1e-8,
                                      PlaneRecoveryConfig cfg = {}) {
  auto w = leaf_subspace(pot, b, cfg);
  QuadraticForm<K> f2 = hessian_at(sec.f, b);
  DenseMatrix<K> r = f2.restricted(w);
  SectionLeafCompat out;
  bool zero = true;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) {
      double m = scalar_traits<K>::abs_approx(r(i, j));
      out.restricted_norm = std::max(out.restricted_norm, m);
      if constexpr (scalar_traits<K>::is_exact) {
        if (!(r(i, j) == K(0))) zero = false;
      } else {
        if (m > tol) zero = false;
      }
    }
  out.compatible = zero;
  if constexpr (scalar_traits<K>::is_exact) {
    if (out.compatible) {
      bool nondeg = pencil_nondegenerate(f2, third_tensor_at(pot.g, b));
      out.pencil_degenerate = !nondeg;
      out.consistent = !nondeg;
    }
  }
  return out;
}

}  // namespace lagfib
