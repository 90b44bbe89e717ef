#include <catch2/catch_amalgamated.hpp>

#include "lagfib/foliation.hpp"
#include "test_util.hpp"

using namespace lagfib;
using tu::gq;
using tu::q;

namespace {

/// (i/2) sum z_i^2 + z1^2 z3 + z2^2 z4 + z1 z2 z5: the third-derivative
/// tensor is the plane witness at every point, so the leaf plane is
/// span{e3, e4, e5} on the whole admissible chart.
template <class K>
Potential<K> leaf_potential() {
  MVPoly<K> g(5);
  for (int i = 0; i < 5; ++i) {
    std::vector<unsigned> e(5, 0);
    e[i] = 2;
    g.add_term(e, scalar_traits<K>::from_parts(typename scalar_traits<K>::real_type(0),
                                               typename scalar_traits<K>::real_type(1) /
                                                   typename scalar_traits<K>::real_type(2)));
  }
  g.add_term({2, 0, 1, 0, 0}, scalar_traits<K>::one());
  g.add_term({0, 2, 0, 1, 0}, scalar_traits<K>::one());
  g.add_term({1, 1, 0, 0, 1}, scalar_traits<K>::one());
  return Potential<K>(5, g);
}

std::vector<std::vector<GaussianRational>> expected_plane() {
  std::vector<std::vector<GaussianRational>> w;
  for (int i = 2; i < 5; ++i) {
    std::vector<GaussianRational> e(5, gq(0));
    e[i] = gq(1);
    w.push_back(e);
  }
  return w;
}

/// Cubic polynomial with the given third-partials tensor.
MVPoly<GaussianRational> poly_from_cubic_tensor(const CubicForm<GaussianRational>& c) {
  const int n = c.n();
  MVPoly<GaussianRational> p(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        if (c.at(i, j, k).is_zero()) continue;
        std::vector<unsigned> e(n, 0);
        e[i]++;
        e[j]++;
        e[k]++;
        long mult = (i == j && j == k) ? 6 : (i == j || j == k) ? 2 : 1;
        p.add_term(e, c.at(i, j, k) / gq(mult));
      }
  return p;
}

MVPoly<Complex> flat_quadratic_f(int n) {
  MVPoly<Complex> g(n);
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned> e(n, 0);
    e[i] = 2;
    g.add_term(e, Complex(0, 0.5));
  }
  return g;
}

}  // namespace

TEST_CASE("leaf_subspace recovers the constant plane at every sampled point") {
  auto pot = leaf_potential<GaussianRational>();
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    std::vector<GaussianRational> b(5);
    for (int i = 0; i < 5; ++i) b[i] = gq(rng.uniform_int(-4, 4), 4, rng.uniform_int(-1, 1), 8);
    auto w = leaf_subspace(pot, b);
    CHECK(w.size() == 3);
    CHECK(same_span(w, expected_plane()));
    // exact leaf dimension is 3
    CHECK(span_canonical_basis(w).size() == 3);
  }
}

TEST_CASE("leaf_subspace is equivariant under integer substitutions") {
  Rng rng(17);
  auto c0 = plane_singular_example();
  for (int t = 0; t < 4; ++t) {
    auto a = random_unimodular(5, rng);
    // potential with cubic part L(Az) and quadratic part (i/2)(Az)^T(Az)
    auto ct = c0.transformed(a);
    MVPoly<GaussianRational> g(5);
    for (int i = 0; i < 5; ++i)
      for (int j = i; j < 5; ++j) {
        GaussianRational acc = gq(0);
        for (int k = 0; k < 5; ++k) acc += a(k, i) * a(k, j);
        acc *= gq(0, 1, 1, 2) * (i == j ? gq(1) : gq(2));
        std::vector<unsigned> e(5, 0);
        e[i]++;
        e[j]++;
        if (!acc.is_zero()) g.add_term(e, acc);
      }
    g += poly_from_cubic_tensor(ct);
    Potential<GaussianRational> pot(5, g);
    std::vector<GaussianRational> b(5, gq(0));
    auto w = leaf_subspace(pot, b);
    auto ainv = inverse_exact(a);
    REQUIRE(ainv.has_value());
    std::vector<std::vector<GaussianRational>> mapped;
    for (const auto& v : expected_plane()) mapped.push_back(ainv->apply(v));
    CHECK(same_span(w, mapped));
  }
}

TEST_CASE("leaf_subspace refuses cones and non-degenerate cubics") {
  // cubic part z1^3: a cone everywhere
  MVPoly<GaussianRational> g(5);
  for (int i = 0; i < 5; ++i) {
    std::vector<unsigned> e(5, 0);
    e[i] = 2;
    g.add_term(e, gq(0, 1, 1, 2));
  }
  g.add_term({3, 0, 0, 0, 0}, gq(1));
  Potential<GaussianRational> pot(5, g);
  CHECK_THROWS_AS(leaf_subspace(pot, std::vector<GaussianRational>(5, gq(0))), precondition_error);
}

TEST_CASE("leaf_checks passes on the leaf potential and reports zero residuals") {
  auto pot = leaf_potential<GaussianRational>();
  std::vector<GaussianRational> b{gq(1, 8), gq(-1, 8), gq(1, 4), gq(0), gq(1, 16)};
  auto rep = leaf_checks(pot, b);
  CHECK(rep.pass);
  CHECK(rep.probes_used > 0);
  CHECK(rep.constancy_residual < 1e-8);
  CHECK(rep.quadraticity_residual < 1e-8);
  CHECK(rep.affine_partials_residual < 1e-8);

  // zero probes: vacuous pass with zero residuals
  auto rep0 = leaf_checks(pot, b, 0);
  CHECK(rep0.pass);
  CHECK(rep0.probes_used == 0);
  CHECK(rep0.quadraticity_residual == 0.0);
}

TEST_CASE("leaf_checks fails on a leaf-breaking perturbation") {
  auto pot = leaf_potential<GaussianRational>();
  MVPoly<GaussianRational> gbad = pot.g;
  gbad.add_term({0, 0, 3, 0, 0}, gq(1));  // z3^3 breaks quadraticity on the leaf
  Potential<GaussianRational> bad(5, gbad);

  std::vector<GaussianRational> b(5, gq(0));
  auto w = expected_plane();
  auto rep = leaf_checks(bad, b, 10, q(1, 100), 1e-6, &w);
  CHECK_FALSE(rep.pass);
  // d^3(z3^3)/dz3^3 = 6 shows up directly as the quadraticity residual
  CHECK(rep.quadraticity_residual == Catch::Approx(6.0).margin(1e-9));
}

TEST_CASE("section_leaf_compat distinguishes leaf-compatible sections") {
  auto pot = leaf_potential<GaussianRational>();
  std::vector<GaussianRational> b{gq(1, 8), gq(0), gq(0), gq(1, 8), gq(0)};

  // quadratic in z1, z2 only: Hessian vanishes on the plane
  MVPoly<GaussianRational> f(5);
  f.add_term({2, 0, 0, 0, 0}, gq(1, 2));
  f.add_term({1, 1, 0, 0, 0}, gq(1));
  f.add_term({0, 2, 0, 0, 0}, gq(1, 2));
  auto rep = section_leaf_compat(pot, Section<GaussianRational>{f}, b);
  CHECK(rep.compatible);
  REQUIRE(rep.pencil_degenerate.has_value());
  CHECK(*rep.pencil_degenerate);
  CHECK(rep.consistent);

  // cross-module: compatibility forces phi_nu rank below 2n for sampled lambda
  Rng rng(23);
  for (int t = 0; t < 32; ++t) {
    std::vector<GaussianRational> lambda(5);
    for (int i = 0; i < 5; ++i) lambda[i] = gq(rng.uniform_int(-9, 9), 1 + rng.uniform_int(0, 2));
    CHECK(phi_nu_rank(pot, Section<GaussianRational>{f}, b, lambda) < 10);
  }

  // f = z3^2/2 restricts nontrivially to the plane
  MVPoly<GaussianRational> f2(5);
  f2.add_term({0, 0, 2, 0, 0}, gq(1, 2));
  auto rep2 = section_leaf_compat(pot, Section<GaussianRational>{f2}, b);
  CHECK_FALSE(rep2.compatible);

  // linear sections have zero Hessian
  auto rep3 = section_leaf_compat(pot, Section<GaussianRational>{MVPoly<GaussianRational>::variable(5, 0)}, b);
  CHECK(rep3.compatible);
  CHECK(rep3.consistent);
}

TEST_CASE("fiber_trace follows flat-model fibers with tiny residuals") {
  Potential<Complex> pot(2, flat_quadratic_f(2));
  MVPoly<Complex> f(2);
  f.add_term({2, 0}, Complex(0.5, 0));
  Section<Complex> sec{f};

  auto tr = fiber_trace(pot, sec, {Complex(0.3, 0.4), Complex(0.1, 0.0)}, 200, 1e-2);
  CHECK(tr.rank == 2);
  CHECK(tr.kernel_dim == 2);
  CHECK(tr.steps_taken == 200);
  CHECK(tr.affine_residual < 1e-8);
  CHECK(tr.holo_residual < 1e-8);
  for (double r : tr.point_residuals) CHECK(r <= 1e-10);
  // the fiber is {z1 = const}
  for (const auto& pt : tr.points) {
    CHECK(std::abs(pt[0] - Complex(0.3, 0.4)) < 1e-8);
  }
}

TEST_CASE("fiber_trace handles curved block potentials") {
  MVPoly<Complex> g = flat_quadratic_f(2);
  g.add_term({3, 0}, Complex(1.0 / 6, 0));
  Potential<Complex> pot(2, g);
  MVPoly<Complex> f(2);
  f.add_term({2, 0}, Complex(0.5, 0));
  Section<Complex> sec{f};

  auto tr = fiber_trace(pot, sec, {Complex(0.2, 0.3), Complex(0.0, 0.1)}, 150, 1e-2);
  CHECK(tr.rank == 2);
  CHECK(tr.affine_residual < 1e-6);
  CHECK(tr.holo_residual < 1e-6);
  for (const auto& pt : tr.points) CHECK(std::abs(pt[0] - Complex(0.2, 0.3)) < 1e-7);
}

TEST_CASE("fiber_trace accepts rank-0 sections and refuses full rank") {
  Potential<Complex> pot(2, flat_quadratic_f(2));
  Section<Complex> sconst{MVPoly<Complex>::variable(2, 0) * Complex(3.0, 0)};
  auto tr = fiber_trace(pot, sconst, {Complex(0.1, 0.2), Complex(0.0, 0.0)}, 40, 1e-2);
  CHECK(tr.rank == 0);
  CHECK(tr.kernel_dim == 4);
  CHECK(tr.affine_residual < 1e-8);
  CHECK(tr.holo_residual < 1e-8);

  // full-rank section: refused
  MVPoly<Complex> g2 = flat_quadratic_f(2);
  g2.add_term({3, 0}, Complex(1.0 / 6, 0));
  g2.add_term({0, 3}, Complex(1.0 / 6, 0));
  Potential<Complex> pot2(2, g2);
  MVPoly<Complex> ffull(2);
  ffull.add_term({2, 0}, Complex(0.5, 0));
  ffull.add_term({0, 2}, Complex(0.5, 0));
  CHECK_THROWS_AS(fiber_trace(pot2, Section<Complex>{ffull}, {Complex(0.2, 0.1), Complex(0.1, 0.2)}, 50, 1e-2),
                  precondition_error);
}

TEST_CASE("float-mode leaf recovery approximates the plane") {
  auto pot = leaf_potential<Complex>();
  std::vector<Complex> b{Complex(0.1, 0), Complex(-0.2, 0), Complex(0.3, 0), Complex(0, 0), Complex(0.05, 0)};
  auto w = leaf_subspace(pot, b);
  CHECK(w.size() == 3);
  Eigen::MatrixXcd wm(5, 3), em(5, 3);
  em.setZero();
  for (int i = 0; i < 3; ++i) {
    em(2 + i, i) = 1.0;
    for (int r = 0; r < 5; ++r) wm(r, i) = w[i][r];
  }
  CHECK(subspace_distance(wm, em) < 1e-7);
}
