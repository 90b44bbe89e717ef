#pragma once

#include <vector>

#include "lagfib/betti.hpp"
#include "lagfib/cubic.hpp"
#include "lagfib/forms.hpp"
#include "lagfib/mvpoly.hpp"
#include "lagfib/rng.hpp"

namespace tu {

using namespace lagfib;

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline GaussianRational gq(long nr, long dr = 1, long ni = 0, long di = 1) {
  return GaussianRational(q(nr, dr), q(ni, di));
}

template <class K>
MVPoly<K> mono(int nvars, std::vector<unsigned> e, K c) {
  return MVPoly<K>::monomial(nvars, std::move(e), c);
}

/// Random polynomial with float coefficients, total degree <= maxdeg.
inline MVPoly<Complex> random_poly(int nvars, int maxdeg, Rng& rng, double scale = 1.0) {
  MVPoly<Complex> p(nvars);
  int terms = 3 + static_cast<int>(rng.uniform_int(0, 5));
  for (int t = 0; t < terms; ++t) {
    std::vector<unsigned> e(nvars, 0);
    int deg = static_cast<int>(rng.uniform_int(0, maxdeg));
    for (int d = 0; d < deg; ++d) e[rng.uniform_int(0, nvars - 1)]++;
    p.add_term(e, Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale)));
  }
  return p;
}

/// Random polynomial with small rational coefficients.
inline MVPoly<GaussianRational> random_poly_exact(int nvars, int maxdeg, Rng& rng) {
  MVPoly<GaussianRational> p(nvars);
  int terms = 3 + static_cast<int>(rng.uniform_int(0, 5));
  for (int t = 0; t < terms; ++t) {
    std::vector<unsigned> e(nvars, 0);
    int deg = static_cast<int>(rng.uniform_int(0, maxdeg));
    for (int d = 0; d < deg; ++d) e[rng.uniform_int(0, nvars - 1)]++;
    p.add_term(e, gq(rng.uniform_int(-9, 9), 1 + rng.uniform_int(0, 3), rng.uniform_int(-9, 9),
                     1 + rng.uniform_int(0, 3)));
  }
  return p;
}

inline std::vector<Complex> random_point(int n, Rng& rng, double scale = 1.0) {
  std::vector<Complex> b(n);
  for (int i = 0; i < n; ++i) b[i] = Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return b;
}

// Finite-difference oracles built on eval() only; for polynomials of degree
// <= 4 the stencil truncation terms vanish, leaving roundoff ~ eps/h^3.

inline Complex fd_second(const MVPoly<Complex>& p, std::vector<Complex> b, int i, int j, double h = 3e-4) {
  auto at = [&](double di, double dj) {
    std::vector<Complex> x = b;
    x[i] += di;
    x[j] += dj;
    return p.eval(x);
  };
  if (i == j) {
    std::vector<Complex> x0 = b;
    return (at(h, 0) - 2.0 * p.eval(x0) + at(-h, 0)) / (h * h);
  }
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

inline Complex fd_third(const MVPoly<Complex>& p, const std::vector<Complex>& b, int i, int j, int k,
                        double h = 2e-3) {
  // first-derivative central stencil in variable k applied to the
  // second-derivative stencil in (i, j)
  std::vector<Complex> bp = b, bm = b;
  bp[k] += h;
  bm[k] -= h;
  if (i == j && j == k) {
    auto at = [&](double d) {
      std::vector<Complex> x = b;
      x[i] += d;
      return p.eval(x);
    };
    return (at(2 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2 * h)) / (2 * h * h * h);
  }
  return (fd_second(p, bp, i, j, h) - fd_second(p, bm, i, j, h)) / (2 * h);
}

}  // namespace tu
