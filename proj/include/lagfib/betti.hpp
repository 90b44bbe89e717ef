#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lagfib/period.hpp"
#include "lagfib/rng.hpp"

namespace lagfib {

/// A section given by a global holomorphic function f: the associated 1-form
/// df is closed by construction (it is exact).
template <class K>
struct Section {
  MVPoly<K> f;
};

/// Axis-aligned box in the 2n real base coordinates
/// (Re z_1, ..., Re z_n, Im z_1, ..., Im z_n). Degenerate intervals (lo == hi)
/// pin a coordinate and define slices.
struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  void validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("Box: lo/hi length mismatch");
    for (size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("Box: lo > hi");
  }

  bool contains(const Eigen::VectorXd& x, double slack = 1e-9) const {
    for (int i = 0; i < dim(); ++i)
      if (x(i) < lo[i] - slack || x(i) > hi[i] + slack) return false;
    return true;
  }

  Eigen::VectorXd sample(Rng& rng) const {
    Eigen::VectorXd x(dim());
    for (int i = 0; i < dim(); ++i) x(i) = lo[i] == hi[i] ? lo[i] : rng.uniform(lo[i], hi[i]);
    return x;
  }
};

struct NewtonConfig {
  double tol = 1e-12;
  int max_iters = 50;
  double dedup_radius = 0.0;  // 0 = half the seed-grid spacing
};

struct TorsionHit {
  std::vector<Complex> b;
  long N = 0;
  std::vector<long> p;
  double residual = 0.0;
  int newton_iters = 0;
};

namespace detail {

inline Eigen::VectorXd realify(const std::vector<Complex>& w) {
  const int n = static_cast<int>(w.size());
  Eigen::VectorXd x(2 * n);
  for (int i = 0; i < n; ++i) {
    x(i) = w[i].real();
    x(n + i) = w[i].imag();
  }
  return x;
}

inline std::vector<Complex> complexify(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size()) / 2;
  std::vector<Complex> b(n);
  for (int i = 0; i < n; ++i) b[i] = Complex(x(i), x(n + i));
  return b;
}

template <class K>
std::vector<typename scalar_traits<K>::real_type> realify_exact(const std::vector<K>& w) {
  using RT = typename scalar_traits<K>::real_type;
  const int n = static_cast<int>(w.size());
  std::vector<RT> x(2 * n);
  for (int i = 0; i < n; ++i) {
    x[i] = scalar_traits<K>::real(w[i]);
    x[n + i] = scalar_traits<K>::imag(w[i]);
  }
  return x;
}

/// Derivative jets of a polynomial, precomputed once so point evaluations in
/// search loops do not rebuild derivative polynomials.
template <class K>
class Jet3 {
 public:
  Jet3() = default;
  Jet3(const MVPoly<K>& p, int order) : n_(p.nvars()), order_(order) {
    grad_.reserve(n_);
    for (int i = 0; i < n_; ++i) grad_.push_back(p.diff(i));
    if (order >= 2) {
      hess_.reserve(static_cast<size_t>(n_) * (n_ + 1) / 2);
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) hess_.push_back(grad_[i].diff(j));
    }
    if (order >= 3) {
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
          for (int k = j; k < n_; ++k) third_.push_back(hess_[hidx(i, j)].diff(k));
    }
  }

  std::vector<K> gradient_at(const std::vector<K>& b) const {
    std::vector<K> g(n_);
    for (int i = 0; i < n_; ++i) g[i] = grad_[i].eval(b);
    return g;
  }

  QuadraticForm<K> hessian_at(const std::vector<K>& b) const {
    QuadraticForm<K> h(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) h.set_sym(i, j, hess_[hidx(i, j)].eval(b));
    return h;
  }

  CubicForm<K> third_at(const std::vector<K>& b) const {
    CubicForm<K> c(n_);
    size_t t = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        for (int k = j; k < n_; ++k) c.set_sym(i, j, k, third_[t++].eval(b));
    return c;
  }

 private:
  size_t hidx(int i, int j) const {
    // i <= j; row-major over the upper triangle
    return static_cast<size_t>(i) * n_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
  }
  int n_ = 0;
  int order_ = 0;
  std::vector<MVPoly<K>> grad_, hess_, third_;
};

}  // namespace detail

/// Betti coordinates at a point plus Jacobian data in the real coordinates
/// (Re z_1..Re z_n, Im z_1..Im z_n).
template <class K>
struct BettiState {
  using RT = typename scalar_traits<K>::real_type;
  std::vector<K> b;
  std::vector<RT> a;
  DenseMatrix<RT> jacobian;  // empty until a Jacobian method runs
  int rank = -1;
  bool rank_even_ok = true;
  double residual = 0.0;   // inf-norm of the linear-system residual
  double condition = 0.0;  // condition estimate of the frame matrix (float)
};

enum class JacobianMethod { analytic, finite_difference };

/// Solves the Betti linear system and its derivatives for one fixed
/// (potential, section) pair. Pure and reentrant; callers may share one
/// instance across threads.
template <class K>
class BettiSolver {
 public:
  using RT = typename scalar_traits<K>::real_type;

  BettiSolver(Potential<K> pot, Section<K> sec, double rank_tol = 1e-8, double riemann_tol = 1e-8)
      : pot_(std::move(pot)),
        sec_(std::move(sec)),
        rank_tol_(rank_tol),
        riemann_tol_(riemann_tol),
        gjet_(pot_.g, 3),
        fjet_(sec_.f, 2) {
    if (sec_.f.nvars() != pot_.n) throw std::invalid_argument("BettiSolver: section/potential dimension mismatch");
  }

  int n() const { return pot_.n; }
  const Potential<K>& potential() const { return pot_; }
  const Section<K>& section() const { return sec_; }
  double rank_tol() const { return rank_tol_; }

  AdmissibilityReport admissibility(const std::vector<K>& b) const {
    PeriodFrame<K> fr{b, gjet_.hessian_at(b), {}, {}};
    return check_riemann(fr, riemann_tol_);
  }

  /// 2n x 2n real matrix whose columns are the realified frame differentials.
  DenseMatrix<RT> frame_matrix(const std::vector<K>& b) const {
    const int n = pot_.n;
    QuadraticForm<K> tau = gjet_.hessian_at(b);
    DenseMatrix<RT> m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      // column i: df_i = dz_i
      m(i, i) = RT(1);
      // column n+i: df_{n+i} = sum_j tau_ij dz_j
      for (int j = 0; j < n; ++j) {
        m(j, n + i) = scalar_traits<K>::real(tau.at(i, j));
        m(n + j, n + i) = scalar_traits<K>::imag(tau.at(i, j));
      }
    }
    return m;
  }

  std::vector<RT> coords(const std::vector<K>& b) const {
    double cond = 0.0, res = 0.0;
    return coords_impl(b, cond, res);
  }

  BettiState<K> state(const std::vector<K>& b, JacobianMethod method = JacobianMethod::analytic,
                      double fd_step = 1e-5) const {
    BettiState<K> st;
    st.b = b;
    st.a = coords_impl(b, st.condition, st.residual);
    if constexpr (scalar_traits<K>::is_exact) {
      if (method != JacobianMethod::analytic)
        throw std::invalid_argument("finite-difference Jacobians are a float-mode method");
      st.jacobian = jacobian_analytic(b, st.a);
    } else {
      st.jacobian = (method == JacobianMethod::analytic) ? jacobian_analytic(b, st.a) : jacobian_fd(b, fd_step);
    }
    if constexpr (scalar_traits<K>::is_exact) {
      st.rank = exact_rank(st.jacobian);
    } else {
      st.rank = numeric_rank(to_real_matrix(st.jacobian), rank_tol_, 1.0);
    }
    st.rank_even_ok = (st.rank % 2) == 0;
    return st;
  }

  /// Differentiates the linear system M(b) a = w(b): for each real
  /// coordinate direction u, da = M^{-1}(dw - dM a), with dtau given by the
  /// third-derivative tensor and dw by the Hessian of f.
  DenseMatrix<RT> jacobian_analytic(const std::vector<K>& b, const std::vector<RT>& a) const {
    const int n = pot_.n;
    DenseMatrix<RT> m = frame_matrix(b);
    CubicForm<K> g3 = gjet_.third_at(b);
    QuadraticForm<K> hf = fjet_.hessian_at(b);

    // dM a depends only on the tail of a through the tau columns
    std::vector<RT> tail(a.begin() + n, a.end());

    DenseMatrix<RT> rhs(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
      // direction d/dx_k corresponds to the complex direction e_k,
      // direction d/dy_k to i e_k
      for (int part = 0; part < 2; ++part) {
        std::vector<K> u(n, scalar_traits<K>::zero());
        u[k] = part == 0 ? scalar_traits<K>::one() : scalar_traits<K>::i();
        std::vector<K> r(n, scalar_traits<K>::zero());
        QuadraticForm<K> dtau = g3.contract(u);
        for (int j = 0; j < n; ++j) {
          K acc = scalar_traits<K>::zero();
          for (int l = 0; l < n; ++l) acc += hf.at(j, l) * u[l];
          for (int l = 0; l < n; ++l) acc -= dtau.at(j, l) * K(tail[l]);
          r[j] = acc;
        }
        auto rr = detail::realify_exact<K>(r);
        for (int i = 0; i < 2 * n; ++i) rhs(i, part == 0 ? k : n + k) = rr[i];
      }
    }
    return solve_columns(m, rhs);
  }

  DenseMatrix<RT> jacobian_fd(const std::vector<K>& b, double h) const
    requires(!scalar_traits<K>::is_exact)
  {
    const int n = pot_.n;
    DenseMatrix<RT> j(2 * n, 2 * n);
    for (int r = 0; r < 2 * n; ++r) {
      std::vector<K> bp = b, bm = b;
      int var = r % n;
      K delta = r < n ? K(h, 0.0) : K(0.0, h);
      bp[var] += delta;
      bm[var] -= delta;
      auto ap = coords(bp);
      auto am = coords(bm);
      for (int i = 0; i < 2 * n; ++i) j(i, r) = (ap[i] - am[i]) / (2 * h);
    }
    return j;
  }

 private:
  std::vector<RT> coords_impl(const std::vector<K>& b, double& cond, double& res) const {
    const int n = pot_.n;
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("betti_coords: point dimension mismatch");
    AdmissibilityReport adm = admissibility(b);
    if (!adm.admissible) throw precondition_error("betti", "inadmissible frame: " + adm.reason);
    DenseMatrix<RT> m = frame_matrix(b);
    std::vector<K> w = fjet_.gradient_at(b);
    std::vector<RT> rhs = detail::realify_exact<K>(w);

    std::vector<RT> a;
    if constexpr (scalar_traits<K>::is_exact) {
      auto sol = solve_exact(m, rhs);
      if (!sol) throw precondition_error("betti", "singular frame system");
      a = *sol;
      cond = 0.0;
      res = 0.0;
    } else {
      Eigen::MatrixXd em = to_real_matrix(m);
      Eigen::VectorXd erhs(2 * n);
      for (int i = 0; i < 2 * n; ++i) erhs(i) = rhs[i];
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(em);
      Eigen::VectorXd x = lu.solve(erhs);
      double rnorm = (em * x - erhs).cwiseAbs().maxCoeff();
      if (!x.allFinite() || rnorm > 1e-6 * std::max(1.0, erhs.cwiseAbs().maxCoeff())) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(em);
        double c = svd.singularValues()(0) / std::max(svd.singularValues().tail(1)(0), 1e-300);
        throw precondition_error("betti", "singular frame system (condition " + std::to_string(c) + ")");
      }
      res = rnorm;
      a.resize(2 * n);
      for (int i = 0; i < 2 * n; ++i) a[i] = x(i);
      cond = 0.0;
    }
    return a;
  }

  DenseMatrix<RT> solve_columns(const DenseMatrix<RT>& m, const DenseMatrix<RT>& rhs) const {
    const int d = m.rows();
    DenseMatrix<RT> out(d, rhs.cols());
    if constexpr (scalar_traits<K>::is_exact) {
      // one elimination for all right-hand sides
      DenseMatrix<RT> aug(d, d + rhs.cols());
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) aug(i, j) = m(i, j);
        for (int j = 0; j < rhs.cols(); ++j) aug(i, d + j) = rhs(i, j);
      }
      auto pivots = rref(aug);
      if (static_cast<int>(pivots.size()) < d || pivots[d - 1] != d - 1)
        throw precondition_error("betti", "singular frame system");
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < rhs.cols(); ++j) out(i, j) = aug(i, d + j);
    } else {
      Eigen::MatrixXd em = to_real_matrix(m);
      Eigen::MatrixXd er(d, rhs.cols());
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < rhs.cols(); ++j) er(i, j) = rhs(i, j);
      Eigen::MatrixXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(em).solve(er);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < rhs.cols(); ++j) out(i, j) = x(i, j);
    }
    return out;
  }

  Potential<K> pot_;
  Section<K> sec_;
  double rank_tol_;
  double riemann_tol_;
  detail::Jet3<K> gjet_;
  detail::Jet3<K> fjet_;
};

template <class K>
std::vector<typename scalar_traits<K>::real_type> betti_coords(const Potential<K>& pot, const Section<K>& sec,
                                                               const std::vector<K>& b) {
  return BettiSolver<K>(pot, sec).coords(b);
}

template <class K>
BettiState<K> betti_jacobian(const Potential<K>& pot, const Section<K>& sec, const std::vector<K>& b,
                             JacobianMethod method = JacobianMethod::analytic, double rank_tol = 1e-8) {
  return BettiSolver<K>(pot, sec, rank_tol).state(b, method);
}

// ---------------------------------------------------------------------------
// Newton-based torsion search (float mode).

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXd x;
  double residual = 0.0;
  int iters = 0;
};

namespace detail {

inline NewtonOutcome newton_to_target(const BettiSolver<Complex>& solver, const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& target, const NewtonConfig& cfg) {
  NewtonOutcome out;
  out.x = x0;
  auto eval_residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> bool {
    std::vector<Complex> b = complexify(x);
    try {
      auto a = solver.coords(b);
      g.resize(static_cast<int>(a.size()));
      for (int i = 0; i < g.size(); ++i) g(i) = a[i] - target(i);
      return true;
    } catch (const precondition_error&) {
      return false;
    }
  };

  Eigen::VectorXd g;
  if (!eval_residual(out.x, g)) return out;
  double r = g.cwiseAbs().maxCoeff();

  for (out.iters = 0; out.iters < cfg.max_iters; ++out.iters) {
    if (r <= cfg.tol) {
      out.converged = true;
      out.residual = r;
      return out;
    }
    std::vector<Complex> b = complexify(out.x);
    auto a = solver.coords(b);
    DenseMatrix<double> jd = solver.jacobian_analytic(b, a);
    Eigen::MatrixXd j = to_real_matrix(jd);
    // rank-revealing least-squares step handles rank-deficient Jacobians
    // (torsion loci can be positive-dimensional)
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(j);
    Eigen::VectorXd step = cod.solve(-g);
    if (!step.allFinite() || step.cwiseAbs().maxCoeff() < 1e-16) break;  // stalled

    double lambda = 1.0;
    bool improved = false;
    for (int halve = 0; halve < 8; ++halve) {
      Eigen::VectorXd xn = out.x + lambda * step;
      Eigen::VectorXd gn;
      if (eval_residual(xn, gn)) {
        double rn = gn.cwiseAbs().maxCoeff();
        if (rn < r) {
          out.x = xn;
          g = gn;
          r = rn;
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  out.residual = r;
  out.converged = r <= cfg.tol;
  return out;
}

inline std::vector<Eigen::VectorXd> grid_seeds(const Box& box, const std::vector<int>& counts) {
  box.validate();
  const int d = box.dim();
  if (static_cast<int>(counts.size()) != d) throw std::invalid_argument("grid_seeds: counts length mismatch");
  std::vector<int> c(counts);
  for (int i = 0; i < d; ++i) {
    if (box.lo[i] == box.hi[i]) c[i] = 1;
    if (c[i] < 1) throw std::invalid_argument("grid_seeds: counts must be positive");
  }
  std::vector<Eigen::VectorXd> seeds;
  std::vector<int> odo(d, 0);
  while (true) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) {
      if (c[i] == 1)
        x(i) = 0.5 * (box.lo[i] + box.hi[i]);
      else
        x(i) = box.lo[i] + (box.hi[i] - box.lo[i]) * odo[i] / (c[i] - 1);
    }
    seeds.push_back(std::move(x));
    int i = 0;
    for (; i < d; ++i) {
      if (++odo[i] < c[i]) break;
      odo[i] = 0;
    }
    if (i == d) break;
  }
  return seeds;
}

inline double min_grid_spacing(const Box& box, const std::vector<int>& counts) {
  double sp = std::numeric_limits<double>::infinity();
  for (int i = 0; i < box.dim(); ++i) {
    if (box.lo[i] == box.hi[i] || counts[i] <= 1) continue;
    sp = std::min(sp, (box.hi[i] - box.lo[i]) / (counts[i] - 1));
  }
  return std::isfinite(sp) ? sp : 1.0;
}

}  // namespace detail

struct TorsionSearchResult {
  std::vector<TorsionHit> hits;
  long seeds = 0;
  long converged = 0;
  long nonconverged = 0;
};

/// Rounds a(seed) * N to the nearest integer vector and runs Newton on
/// a(b) = p/N from every grid seed. Converged in-box hits are re-verified by
/// an independent coordinate recomputation and deduplicated deterministically.
inline TorsionSearchResult torsion_search(const BettiSolver<Complex>& solver, const Box& box, long N,
                                          const std::vector<int>& grid, NewtonConfig cfg = {}) {
  if (N <= 0) throw std::invalid_argument("torsion_search: order bound must be positive");
  const int d = 2 * solver.n();
  if (box.dim() != d) throw std::invalid_argument("torsion_search: box dimension mismatch");

  auto seeds = detail::grid_seeds(box, grid);
  if (cfg.dedup_radius <= 0.0) cfg.dedup_radius = 0.5 * detail::min_grid_spacing(box, grid);

  TorsionSearchResult result;
  result.seeds = static_cast<long>(seeds.size());

  std::vector<std::pair<std::vector<long>, Eigen::VectorXd>> raw;  // (p, point)
  std::vector<std::pair<double, int>> extra;                       // (residual, iters) per raw entry
  for (const auto& seed : seeds) {
    std::vector<Complex> b = detail::complexify(seed);
    std::vector<double> a = solver.coords(b);  // inadmissible seeds abort the search (precondition)
    Eigen::VectorXd target(d);
    std::vector<long> p(d);
    for (int i = 0; i < d; ++i) {
      p[i] = std::lround(a[i] * static_cast<double>(N));
      target(i) = static_cast<double>(p[i]) / static_cast<double>(N);
    }
    NewtonOutcome nw = detail::newton_to_target(solver, seed, target, cfg);
    if (!nw.converged) {
      ++result.nonconverged;
      continue;
    }
    if (!box.contains(nw.x)) continue;
    // independent recomputation at the converged point
    auto averify = solver.coords(detail::complexify(nw.x));
    double res = 0.0;
    for (int i = 0; i < d; ++i) res = std::max(res, std::abs(averify[i] - target(i)));
    if (res > std::max(cfg.tol, 1e-12) * 10) {
      ++result.nonconverged;
      continue;
    }
    ++result.converged;
    raw.emplace_back(p, nw.x);
    extra.emplace_back(res, nw.iters);
  }

  // deterministic order, then greedy dedup among hits with the same target
  std::vector<int> order(raw.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int u, int v) {
    if (raw[u].first != raw[v].first) return raw[u].first < raw[v].first;
    for (int i = 0; i < d; ++i)
      if (raw[u].second(i) != raw[v].second(i)) return raw[u].second(i) < raw[v].second(i);
    return false;
  });
  std::vector<int> kept;
  for (int idx : order) {
    bool dup = false;
    for (int k : kept) {
      if (raw[k].first != raw[idx].first) continue;
      if ((raw[k].second - raw[idx].second).norm() < cfg.dedup_radius) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(idx);
  }
  for (int idx : kept) {
    TorsionHit hit;
    hit.b = detail::complexify(raw[idx].second);
    hit.N = N;
    hit.p = raw[idx].first;
    hit.residual = extra[idx].first;
    hit.newton_iters = extra[idx].second;
    result.hits.push_back(std::move(hit));
  }
  return result;
}

struct DensityRow {
  long N = 0;
  double epsilon = 0.0;
  double coverage = 0.0;
  long hit_count = 0;
};

/// Coverage fractions for nested hit sets: hits accumulate over the sorted
/// order list, so coverage is monotone nondecreasing in N by construction.
inline std::vector<DensityRow> density_scan(const BettiSolver<Complex>& solver, const Box& box,
                                            std::vector<long> N_list, double epsilon,
                                            const std::vector<int>& grid, NewtonConfig cfg = {},
                                            int sample_count = 512, std::uint64_t seed = 0) {
  std::sort(N_list.begin(), N_list.end());
  Rng rng(seed);
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i) samples.push_back(box.sample(rng));

  std::vector<DensityRow> table;
  std::vector<Eigen::VectorXd> accumulated;
  for (long N : N_list) {
    TorsionSearchResult r = torsion_search(solver, box, N, grid, cfg);
    for (const auto& h : r.hits) {
      Eigen::VectorXd x(box.dim());
      for (int i = 0; i < solver.n(); ++i) {
        x(i) = h.b[i].real();
        x(solver.n() + i) = h.b[i].imag();
      }
      accumulated.push_back(std::move(x));
    }
    long covered = 0;
    for (const auto& s : samples) {
      for (const auto& h : accumulated) {
        if ((s - h).norm() <= epsilon) {
          ++covered;
          break;
        }
      }
    }
    DensityRow row;
    row.N = N;
    row.epsilon = epsilon;
    row.coverage = sample_count > 0 ? static_cast<double>(covered) / sample_count : 0.0;
    row.hit_count = static_cast<long>(accumulated.size());
    table.push_back(row);
  }
  return table;
}

struct AczReport {
  std::string verdict;  // "CONSISTENT" or "VIOLATION-WITNESS"
  int max_betti_rank = 0;
  int max_nabla_rank = 0;
  int samples = 0;
  int lambda_draws = 0;
};

/// Desk-scale consistency check of the transversality dichotomy: flags
/// CONSISTENT when the sampled Betti rank reaches 2n or every sampled
/// contraction of the cubic is degenerate, VIOLATION-WITNESS otherwise.
/// A falsification harness, not a proof procedure.
inline AczReport acz_consistency(const BettiSolver<Complex>& solver, const Box& box, int samples,
                                 int lambda_draws = 8, std::uint64_t seed = 0) {
  const int n = solver.n();
  if (box.dim() != 2 * n) throw std::invalid_argument("acz_consistency: box dimension mismatch");
  Rng rng(seed);
  AczReport rep;
  rep.samples = samples;
  rep.lambda_draws = lambda_draws;
  detail::Jet3<Complex> gjet(solver.potential().g, 3);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = box.sample(rng);
    std::vector<Complex> b = detail::complexify(x);
    BettiState<Complex> st = solver.state(b);
    rep.max_betti_rank = std::max(rep.max_betti_rank, st.rank);
    CubicForm<Complex> c = gjet.third_at(b);
    for (int t = 0; t < lambda_draws; ++t) {
      std::vector<Complex> lambda(n);
      for (int i = 0; i < n; ++i) lambda[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      rep.max_nabla_rank = std::max(rep.max_nabla_rank, form_rank(c.contract(lambda), solver.rank_tol()));
    }
  }
  bool consistent = rep.max_betti_rank == 2 * n || rep.max_nabla_rank < n;
  rep.verdict = consistent ? "CONSISTENT" : "VIOLATION-WITNESS";
  return rep;
}

/// Rank of the differential of the section-translated frame map at (b, lambda):
/// n + rank(Hess f(b) - contract(g3(b), lambda)).
template <class K>
int phi_nu_rank(const Potential<K>& pot, const Section<K>& sec, const std::vector<K>& b,
                const std::vector<K>& lambda, double tol = 1e-8) {
  if (static_cast<int>(lambda.size()) != pot.n) throw std::invalid_argument("phi_nu_rank: lambda dimension mismatch");
  QuadraticForm<K> f2 = hessian_at(sec.f, b);
  QuadraticForm<K> q = f2 - third_tensor_at(pot.g, b).contract(lambda);
  return pot.n + form_rank(q, tol);
}

}  // namespace lagfib
