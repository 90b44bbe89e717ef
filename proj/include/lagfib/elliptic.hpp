#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lagfib/betti.hpp"

namespace lagfib {

/// One-dimensional family: period tau(b) in the upper half plane over the
/// domain, section lift s(b). This module solves the 1-dimensional Betti
/// problem in closed form so it can serve as an oracle, independent of the
/// general frame-matrix route, for block potentials with a single factor.
struct EllipticFamily {
  MVPoly<Complex> tau;
  MVPoly<Complex> s;
  Box domain;  // dim 2: (Re b, Im b)
};

/// Validates Im tau > 0 on a verification grid over the domain.
inline EllipticFamily make_elliptic_family(MVPoly<Complex> tau, MVPoly<Complex> s, Box domain,
                                           int verify_grid = 17) {
  if (tau.nvars() != 1 || s.nvars() != 1)
    throw std::invalid_argument("EllipticFamily: tau and s must be polynomials in one variable");
  domain.validate();
  if (domain.dim() != 2) throw std::invalid_argument("EllipticFamily: domain must be 2-dimensional");
  for (int i = 0; i < verify_grid; ++i)
    for (int j = 0; j < verify_grid; ++j) {
      double x = domain.lo[0] + (domain.hi[0] - domain.lo[0]) * (verify_grid == 1 ? 0.5 : double(i) / (verify_grid - 1));
      double y = domain.lo[1] + (domain.hi[1] - domain.lo[1]) * (verify_grid == 1 ? 0.5 : double(j) / (verify_grid - 1));
      Complex t = tau.eval({Complex(x, y)});
      if (!(t.imag() > 0))
        throw precondition_error("elliptic_toy", "Im tau is not positive on the domain (grid check)");
    }
  return EllipticFamily{std::move(tau), std::move(s), std::move(domain)};
}

/// The unique real pair with s(b) = beta1 + beta2 * tau(b).
inline std::pair<double, double> betti_elliptic(const EllipticFamily& fam, Complex b) {
  Complex t = fam.tau.eval({b});
  if (!(t.imag() > 0)) throw precondition_error("elliptic_toy", "Im tau nonpositive at the evaluation point");
  Complex sv = fam.s.eval({b});
  double beta2 = sv.imag() / t.imag();
  double beta1 = sv.real() - beta2 * t.real();
  return {beta1, beta2};
}

/// Analytic 2x2 Jacobian of (beta1, beta2) in the coordinates (Re b, Im b).
inline Eigen::Matrix2d elliptic_jacobian(const EllipticFamily& fam, Complex b) {
  Complex t = fam.tau.eval({b});
  if (!(t.imag() > 0)) throw precondition_error("elliptic_toy", "Im tau nonpositive at the evaluation point");
  Complex sv = fam.s.eval({b});
  Complex dt = fam.tau.diff(0).eval({b});
  Complex ds = fam.s.diff(0).eval({b});
  // for holomorphic h: d(Re h)/dx = Re h', d(Re h)/dy = -Im h',
  //                    d(Im h)/dx = Im h', d(Im h)/dy = Re h'
  double beta2 = sv.imag() / t.imag();
  double it = t.imag();
  double b2x = (ds.imag() * it - sv.imag() * dt.imag()) / (it * it);
  double b2y = (ds.real() * it - sv.imag() * dt.real()) / (it * it);
  double b1x = ds.real() - b2x * t.real() - beta2 * dt.real();
  double b1y = -ds.imag() - b2y * t.real() + beta2 * dt.imag();
  Eigen::Matrix2d j;
  j << b1x, b1y, b2x, b2y;
  return j;
}

/// Thresholded rank of the Betti Jacobian, asserted to be 0 or 2; a value of
/// 1 above threshold raises a diagnostic (it would contradict the complex-
/// kernel dichotomy).
inline int rank_dichotomy(const EllipticFamily& fam, Complex b, double tol = 1e-8) {
  Eigen::Matrix2d j = elliptic_jacobian(fam, b);
  int r = numeric_rank(Eigen::MatrixXd(j), tol, 1.0);
  if (r == 1)
    throw std::runtime_error("rank_dichotomy: thresholded rank 1 observed; dichotomy violated at this tolerance");
  return r;
}

struct EllipticHit {
  Complex b;
  long p1 = 0, p2 = 0;  // beta = (p1/N, p2/N)
  double residual = 0.0;
  int iters = 0;
};

/// All points in the domain with beta(b) in (1/N)Z^2, by Newton iteration
/// from a seed grid with deterministic deduplication.
inline std::vector<EllipticHit> torsion_enumerate(const EllipticFamily& fam, long N,
                                                  const std::vector<int>& grid = {129, 129},
                                                  NewtonConfig cfg = {}) {
  if (N <= 0) throw std::invalid_argument("torsion_enumerate: order bound must be positive");
  auto seeds = detail::grid_seeds(fam.domain, grid);
  if (cfg.dedup_radius <= 0.0) cfg.dedup_radius = 0.5 * detail::min_grid_spacing(fam.domain, grid);

  std::vector<EllipticHit> raw;
  for (const auto& seed : seeds) {
    Complex b(seed(0), seed(1));
    std::pair<double, double> beta;
    try {
      beta = betti_elliptic(fam, b);
    } catch (const precondition_error&) {
      continue;
    }
    long p1 = std::lround(beta.first * double(N));
    long p2 = std::lround(beta.second * double(N));
    double t1 = double(p1) / double(N), t2 = double(p2) / double(N);

    double r = std::max(std::abs(beta.first - t1), std::abs(beta.second - t2));
    int it = 0;
    bool ok = r <= cfg.tol;
    Complex x = b;
    for (; it < cfg.max_iters && !ok; ++it) {
      Eigen::Matrix2d j = elliptic_jacobian(fam, x);
      Eigen::Vector2d g(betti_elliptic(fam, x).first - t1, betti_elliptic(fam, x).second - t2);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
      cod.setThreshold(1e-12);
      cod.compute(j);
      Eigen::Vector2d step = cod.solve(-g);
      if (!step.allFinite() || step.cwiseAbs().maxCoeff() < 1e-16) break;
      double lambda = 1.0;
      bool improved = false;
      for (int halve = 0; halve < 8; ++halve) {
        Complex xn = x + Complex(lambda * step(0), lambda * step(1));
        try {
          auto bn = betti_elliptic(fam, xn);
          double rn = std::max(std::abs(bn.first - t1), std::abs(bn.second - t2));
          if (rn < r) {
            x = xn;
            r = rn;
            improved = true;
            break;
          }
        } catch (const precondition_error&) {
        }
        lambda *= 0.5;
      }
      if (!improved) break;
      ok = r <= cfg.tol;
    }
    if (!ok) continue;
    Eigen::VectorXd xv(2);
    xv << x.real(), x.imag();
    if (!fam.domain.contains(xv)) continue;
    raw.push_back(EllipticHit{x, p1, p2, r, it});
  }

  std::sort(raw.begin(), raw.end(), [](const EllipticHit& a, const EllipticHit& b) {
    if (a.p2 != b.p2) return a.p2 < b.p2;
    if (a.p1 != b.p1) return a.p1 < b.p1;
    if (a.b.real() != b.b.real()) return a.b.real() < b.b.real();
    return a.b.imag() < b.b.imag();
  });
  std::vector<EllipticHit> hits;
  for (const auto& h : raw) {
    bool dup = false;
    for (const auto& k : hits) {
      if (k.p1 != h.p1 || k.p2 != h.p2) continue;
      if (std::abs(k.b - h.b) < cfg.dedup_radius) {
        dup = true;
        break;
      }
    }
    if (!dup) hits.push_back(h);
  }
  return hits;
}

/// Finite-dimensional rational representation data: generators of the image
/// of a group in GL(V_Q).
struct MonodromyProblem {
  std::vector<DenseMatrix<Rational>> generators;
  int dim = 0;
};

inline MonodromyProblem make_monodromy_problem(std::vector<DenseMatrix<Rational>> generators) {
  if (generators.empty()) throw std::invalid_argument("MonodromyProblem: at least one generator required");
  int d = generators[0].rows();
  for (const auto& g : generators) {
    if (g.rows() != d || g.cols() != d) throw std::invalid_argument("MonodromyProblem: generators must be square of equal size");
    if (determinant_exact(g) == Rational(0))
      throw std::invalid_argument("MonodromyProblem: generator not invertible over Q");
  }
  return MonodromyProblem{std::move(generators), d};
}

/// Exact basis of the invariant subspace: the intersection of the kernels of
/// rho(gamma) - I over all generators.
inline std::vector<std::vector<Rational>> invariant_subspace(const MonodromyProblem& mp) {
  const int d = mp.dim;
  const int g = static_cast<int>(mp.generators.size());
  DenseMatrix<Rational> stacked(g * d, d);
  for (int t = 0; t < g; ++t)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        stacked(t * d + i, j) = mp.generators[t](i, j) - (i == j ? Rational(1) : Rational(0));
  return kernel_basis(stacked);
}

enum class QuasiRationalVerdict { pass, consistent, near_violation };

struct QuasiRationalReport {
  QuasiRationalVerdict verdict = QuasiRationalVerdict::consistent;
  bool v_near_rational = false;
  std::vector<bool> displacement_near_rational;  // per generator
  double worst_entry_error = 0.0;
};

namespace detail {

inline bool vector_near_rational(const Eigen::VectorXd& v, long long max_den, double tol, double& worst) {
  bool ok = true;
  for (int i = 0; i < v.size(); ++i) {
    RationalApprox a = nearest_rational(v(i), max_den);
    worst = std::max(worst, a.err);
    if (a.err > tol) ok = false;
  }
  return ok;
}

}  // namespace detail

/// One-sided consistency check of torsion monodromy on a trivial-invariants
/// representation: with v rational the displacement rho(gamma)v - v is
/// rational for every generator (verified: PASS); with v a float that is not
/// near-rational, all displacements near-rational is flagged, never asserted
/// as a counterexample (float inputs cannot certify irrationality).
inline QuasiRationalReport quasi_rational_check(const MonodromyProblem& mp, const Eigen::VectorXd& v,
                                                long long denominator_bound, double tol = 1e-9) {
  if (!invariant_subspace(mp).empty())
    throw precondition_error("elliptic_toy", "quasi_rational_check requires a trivial invariant subspace");
  if (v.size() != mp.dim) throw std::invalid_argument("quasi_rational_check: vector dimension mismatch");

  QuasiRationalReport rep;
  rep.v_near_rational = detail::vector_near_rational(v, denominator_bound, tol, rep.worst_entry_error);

  // displacements may pick up the generators' denominators
  Rational den_lcm(1);
  for (const auto& g : mp.generators)
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        mpz_class d = g(i, j).get_den();
        mpz_class l = den_lcm.get_num();
        mpz_class lc;
        mpz_lcm(lc.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
        den_lcm = Rational(lc);
      }
  long long disp_bound = denominator_bound;
  if (den_lcm.get_num().fits_slong_p()) {
    long l = den_lcm.get_num().get_si();
    if (l > 0 && denominator_bound <= (1LL << 40) / l) disp_bound = denominator_bound * l;
  }

  bool all_disp_rational = true;
  for (const auto& g : mp.generators) {
    Eigen::MatrixXd gd = to_real_matrix(g);
    Eigen::VectorXd w = gd * v - v;
    double worst = 0.0;
    bool near = detail::vector_near_rational(w, disp_bound, tol, worst);
    rep.displacement_near_rational.push_back(near);
    if (!near) all_disp_rational = false;
  }

  if (rep.v_near_rational)
    rep.verdict = QuasiRationalVerdict::pass;
  else if (all_disp_rational)
    rep.verdict = QuasiRationalVerdict::near_violation;
  else
    rep.verdict = QuasiRationalVerdict::consistent;
  return rep;
}

}  // namespace lagfib
