#include <catch2/catch_amalgamated.hpp>

#include "lagfib/period.hpp"
#include "test_util.hpp"

using namespace lagfib;
using tu::gq;
using tu::q;

namespace {

MVPoly<GaussianRational> flat_quadratic(int n) {
  // (i/2) sum z_i^2
  MVPoly<GaussianRational> g(n);
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned> e(n, 0);
    e[i] = 2;
    g.add_term(e, gq(0, 1, 1, 2));
  }
  return g;
}

}  // namespace

TEST_CASE("period_frame produces tau, flat differentials and the Hodge frame") {
  Potential<GaussianRational> pot(2, flat_quadratic(2));
  auto fr = period_frame(pot, {gq(3), gq(-5)});
  CHECK(fr.tau.at(0, 0) == gq(0, 1, 1));
  CHECK(fr.tau.at(1, 1) == gq(0, 1, 1));
  CHECK(fr.tau.at(0, 1) == gq(0));
  // df3 = i dz1, df4 = i dz2
  CHECK(fr.frame_differentials[2][0] == gq(0, 1, 1));
  CHECK(fr.frame_differentials[2][1] == gq(0));
  CHECK(fr.frame_differentials[3][1] == gq(0, 1, 1));
  // e'_1 = e_3 - i e_1
  CHECK(fr.hodge_frame[0][0] == gq(0, 1, -1));
  CHECK(fr.hodge_frame[0][1] == gq(0));
  CHECK(fr.hodge_frame[0][2] == gq(1));
  CHECK(fr.hodge_frame[0][3] == gq(0));

  // adding z1^3/6 shifts tau_11 by z1
  MVPoly<GaussianRational> g2 = flat_quadratic(2);
  g2.add_term({3, 0}, gq(1, 6));
  Potential<GaussianRational> pot2(2, g2);
  auto fr2 = period_frame(pot2, {gq(1), gq(0)});
  CHECK(fr2.tau.at(0, 0) == gq(1, 1, 1));
  CHECK(fr2.tau.at(0, 1) == gq(0));
  CHECK(fr2.tau.at(1, 1) == gq(0, 1, 1));

  CHECK_THROWS_AS(period_frame(pot, {gq(1)}), std::invalid_argument);
}

TEST_CASE("check_riemann decides positivity of Im tau") {
  Potential<GaussianRational> pot(2, flat_quadratic(2));
  auto fr = period_frame(pot, {gq(0), gq(0)});
  auto rep = check_riemann(fr);
  CHECK(rep.admissible);
  CHECK(rep.min_eig_im_tau == Catch::Approx(1.0));

  // tau = -i I is inadmissible
  MVPoly<GaussianRational> gneg(2);
  for (int i = 0; i < 2; ++i) {
    std::vector<unsigned> e(2, 0);
    e[i] = 2;
    gneg.add_term(e, gq(0, 1, -1, 2));
  }
  auto frneg = period_frame(Potential<GaussianRational>(2, gneg), {gq(0), gq(0)});
  auto repneg = check_riemann(frneg);
  CHECK_FALSE(repneg.admissible);
  CHECK(repneg.reason == "Im tau is not positive definite");

  // g = (i/2)(z1^2+z2^2) + z1^3: tau_11 = i + 6 z1; z1 = -i makes Im tau_11 = -5
  MVPoly<GaussianRational> gc = flat_quadratic(2);
  gc.add_term({3, 0}, gq(1));
  Potential<GaussianRational> potc(2, gc);
  auto frc = period_frame(potc, {gq(0, 1, -1), gq(0)});
  CHECK_FALSE(check_riemann(frc).admissible);
  // boundary: z1 = -i/6 gives Im tau_11 = 0, still inadmissible
  auto frb = period_frame(potc, {gq(0, 1, -1, 6), gq(0)});
  CHECK_FALSE(check_riemann(frb).admissible);
  // slightly inside: z1 = -i/12 is admissible
  auto fri = period_frame(potc, {gq(0, 1, -1, 12), gq(0)});
  CHECK(check_riemann(fri).admissible);
}

TEST_CASE("tau is exactly symmetric for random exact potentials") {
  Rng rng(5);
  for (int t = 0; t < 25; ++t) {
    int n = 2 + static_cast<int>(rng.uniform_int(0, 1));
    Potential<GaussianRational> pot(n, tu::random_poly_exact(n, 4, rng));
    std::vector<GaussianRational> b(n);
    for (int i = 0; i < n; ++i) b[i] = gq(rng.uniform_int(-3, 3), 2, rng.uniform_int(-3, 3), 2);
    auto fr = period_frame(pot, b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(fr.tau.at(i, j) == fr.tau.at(j, i));
  }
}

TEST_CASE("nabla_bar vanishes for quadratic potentials and matches slices") {
  Potential<GaussianRational> pot(2, flat_quadratic(2));
  CHECK(nabla_bar(pot, {gq(1), gq(2)}, {gq(3), gq(4)}).is_zero());

  MVPoly<GaussianRational> g(1);
  g.add_term({3}, gq(1, 6));
  Potential<GaussianRational> pc(1, g);
  auto nb = nabla_bar(pc, {gq(0)}, {gq(1)});
  CHECK(nb.at(0, 0) == gq(1));

  // quadratic additions never change nabla_bar
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    int n = 2;
    auto base = tu::random_poly_exact(n, 4, rng);
    auto quad = tu::random_poly_exact(n, 2, rng);
    Potential<GaussianRational> p1(n, base), p2(n, base + quad);
    std::vector<GaussianRational> b{gq(rng.uniform_int(-2, 2)), gq(rng.uniform_int(-2, 2))};
    std::vector<GaussianRational> v{gq(rng.uniform_int(-2, 2)), gq(rng.uniform_int(-2, 2))};
    CHECK(nabla_bar(p1, b, v) == nabla_bar(p2, b, v));
  }
}

TEST_CASE("nabla_bar agrees with finite differences of the Hodge frame") {
  // g = (i/2)(z1^2+z2^2) + z1^2 z2 / 2
  MVPoly<Complex> g(2);
  g.add_term({2, 0}, Complex(0, 0.5));
  g.add_term({0, 2}, Complex(0, 0.5));
  g.add_term({2, 1}, Complex(0.5, 0));
  Potential<Complex> pot(2, g);
  Rng rng(23);
  for (int t = 0; t < 10; ++t) {
    auto b = tu::random_point(2, rng, 0.3);
    auto v = tu::random_point(2, rng, 1.0);
    auto nb = nabla_bar(pot, b, v);
    const double h = 1e-5;
    std::vector<Complex> bp(2), bm(2);
    for (int i = 0; i < 2; ++i) {
      bp[i] = b[i] + h * v[i];
      bm[i] = b[i] - h * v[i];
    }
    auto ep = period_frame(pot, bp).hodge_frame;
    auto em = period_frame(pot, bm).hodge_frame;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Complex fd = (ep[i][j] - em[i][j]) / (2 * h);
        // de'_i/dv has e_j component -(nabla_bar)_ij
        CHECK(std::abs(fd + nb.at(i, j)) < 1e-6 * std::max(1.0, std::abs(nb.at(i, j))));
      }
  }
}

TEST_CASE("admissible frames have invertible realified frame matrices") {
  Rng rng(31);
  int found = 0;
  for (int t = 0; t < 200 && found < 25; ++t) {
    int n = 2;
    MVPoly<Complex> g(n);
    for (int i = 0; i < n; ++i) {
      std::vector<unsigned> e(n, 0);
      e[i] = 2;
      g.add_term(e, Complex(0, 0.5));
    }
    auto noise = tu::random_poly(n, 3, rng, 0.2);
    g += noise;
    Potential<Complex> pot(n, g);
    auto b = tu::random_point(n, rng, 0.3);
    auto fr = period_frame(pot, b);
    if (!check_riemann(fr).admissible) continue;
    ++found;
    Eigen::MatrixXd m(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < n; ++j) {
        m(j, i) = fr.frame_differentials[i][j].real();
        m(n + j, i) = fr.frame_differentials[i][j].imag();
      }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    double smin = svd.singularValues().minCoeff();
    CHECK(smin > 1e-10);
  }
  CHECK(found >= 25);
}
