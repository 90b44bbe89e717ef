#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "lagfib/elliptic.hpp"
#include "test_util.hpp"

using namespace lagfib;
using tu::gq;
using tu::q;

namespace {

MVPoly<Complex> const_poly(Complex c) {
  MVPoly<Complex> p(1);
  p.add_term({0}, c);
  return p;
}

MVPoly<Complex> identity_poly() { return MVPoly<Complex>::variable(1, 0); }

EllipticFamily modular_family() {
  // tau(b) = b on Re in [-1, 1], Im in [1/2, 3/2]; s == i
  return make_elliptic_family(identity_poly(), const_poly(Complex(0, 1)), Box{{-1, 0.5}, {1, 1.5}});
}

/// Closed-form enumeration for tau(b) = b, s == i: beta = (-x/y, 1/y), so
/// the order-N hits are b = (-p1/p2, N/p2) with p2 in [N/1.5, 2N] and
/// |p1| <= p2 (independent of the Newton implementation path).
std::set<std::pair<long, long>> modular_oracle(long N) {
  std::set<std::pair<long, long>> hits;
  for (long p2 = 1; p2 <= 2 * N; ++p2) {
    double y = double(N) / double(p2);
    if (y < 0.5 - 1e-12 || y > 1.5 + 1e-12) continue;
    for (long p1 = -p2; p1 <= p2; ++p1) hits.insert({p1, p2});
  }
  return hits;
}

}  // namespace

TEST_CASE("betti_elliptic closed form") {
  auto famc = make_elliptic_family(const_poly(Complex(0, 1)), const_poly(Complex(0.5, 0)),
                                   Box{{-1, -1}, {1, 1}});
  auto b1 = betti_elliptic(famc, Complex(0.3, -0.4));
  CHECK(b1.first == Catch::Approx(0.5).margin(1e-14));
  CHECK(b1.second == Catch::Approx(0.0).margin(1e-14));

  auto famc2 = make_elliptic_family(const_poly(Complex(0, 1)), const_poly(Complex(0, 0.5)),
                                    Box{{-1, -1}, {1, 1}});
  auto b2 = betti_elliptic(famc2, Complex(0.1, 0.9));
  CHECK(b2.first == Catch::Approx(0.0).margin(1e-14));
  CHECK(b2.second == Catch::Approx(0.5).margin(1e-14));

  auto fam = modular_family();
  double x = 0.25, y = 0.8;
  auto b3 = betti_elliptic(fam, Complex(x, y));
  CHECK(b3.first == Catch::Approx(-x / y).margin(1e-13));
  CHECK(b3.second == Catch::Approx(1.0 / y).margin(1e-13));

  CHECK_THROWS_AS(betti_elliptic(fam, Complex(0, -1)), precondition_error);
}

TEST_CASE("betti_elliptic inverts the section lift on random samples") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    MVPoly<Complex> tau(1);
    tau.add_term({0}, Complex(rng.uniform(-0.2, 0.2), 1.0 + rng.uniform(0, 1)));
    tau.add_term({1}, Complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)));
    MVPoly<Complex> s(1);
    s.add_term({0}, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    s.add_term({1}, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    s.add_term({2}, Complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
    Box dom{{-0.5, -0.5}, {0.5, 0.5}};
    std::optional<EllipticFamily> fam;
    try {
      fam = make_elliptic_family(tau, s, dom);
    } catch (const precondition_error&) {
      continue;
    }
    Complex b(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    auto [beta1, beta2] = betti_elliptic(*fam, b);
    Complex recon = Complex(beta1, 0) + Complex(beta2, 0) * fam->tau.eval({b});
    CHECK(std::abs(recon - fam->s.eval({b})) < 1e-12);
  }
}

TEST_CASE("rank_dichotomy returns 0 or 2 on the named families") {
  auto famc = make_elliptic_family(const_poly(Complex(0, 1)), const_poly(Complex(0.5, 0)),
                                   Box{{-1, -1}, {1, 1}});
  CHECK(rank_dichotomy(famc, Complex(0.2, 0.3)) == 0);

  auto fam = modular_family();
  CHECK(rank_dichotomy(fam, Complex(0.3, 1.0)) == 2);
  // determinant of the hand Jacobian is 1/y^3
  Eigen::Matrix2d j = elliptic_jacobian(fam, Complex(0.3, 1.0));
  CHECK(j.determinant() == Catch::Approx(1.0).margin(1e-12));

  auto famhalf = make_elliptic_family(identity_poly(), const_poly(Complex(0.5, 0)),
                                      Box{{-1, 0.5}, {1, 1.5}});
  CHECK(rank_dichotomy(famhalf, Complex(0.1, 1.2)) == 0);
}

TEST_CASE("rank_dichotomy never reports 1 on random admissible families") {
  Rng rng(19);
  int families = 0;
  for (int t = 0; t < 600 && families < 200; ++t) {
    MVPoly<Complex> tau(1);
    tau.add_term({0}, Complex(rng.uniform(-0.3, 0.3), 1.0 + rng.uniform(0, 1)));
    tau.add_term({1}, Complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)));
    tau.add_term({2}, Complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)));
    MVPoly<Complex> s(1);
    int deg = static_cast<int>(rng.uniform_int(0, 2));
    for (int d = 0; d <= deg; ++d) s.add_term({static_cast<unsigned>(d)}, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    std::optional<EllipticFamily> fam;
    try {
      fam = make_elliptic_family(tau, s, Box{{-0.5, -0.5}, {0.5, 0.5}});
    } catch (const precondition_error&) {
      continue;
    }
    ++families;
    for (int g = 0; g < 9; ++g) {
      Complex b(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      int r = rank_dichotomy(*fam, b);
      CHECK((r == 0 || r == 2));
    }
  }
  CHECK(families == 200);
}

TEST_CASE("torsion_enumerate matches the closed-form oracle as a set") {
  auto fam = modular_family();
  for (long N : {4L, 8L}) {
    auto hits = torsion_enumerate(fam, N, {257, 257});
    auto oracle = modular_oracle(N);
    CHECK(hits.size() == oracle.size());
    for (const auto& h : hits) {
      auto key = std::make_pair(h.p1, h.p2);
      REQUIRE(oracle.count(key) == 1);
      oracle.erase(key);
      // closed form location
      double y = double(N) / double(h.p2);
      double x = -double(h.p1) / double(h.p2);
      CHECK(std::abs(h.b - Complex(x, y)) < 1e-8);
    }
    CHECK(oracle.empty());
  }
}

TEST_CASE("constant irrational lifts produce no hits; lattice family is exact") {
  auto fam = make_elliptic_family(const_poly(Complex(0, 1)), const_poly(Complex(std::sqrt(2.0), 0)),
                                  Box{{-1, -1}, {1, 1}});
  for (long N : {4L, 16L, 64L}) CHECK(torsion_enumerate(fam, N, {33, 33}).empty());

  // tau == i, s(b) = b: hits are the (1/N)-lattice points of the domain
  auto fam2 = make_elliptic_family(const_poly(Complex(0, 1)), identity_poly(), Box{{0, 0}, {1, 1}});
  auto hits = torsion_enumerate(fam2, 4, {65, 65});
  CHECK(hits.size() == 25);
  std::set<std::pair<long, long>> seen;
  for (const auto& h : hits) {
    CHECK(std::abs(h.b.real() - h.p1 / 4.0) < 1e-9);
    CHECK(std::abs(h.b.imag() - h.p2 / 4.0) < 1e-9);
    seen.insert({h.p1, h.p2});
  }
  CHECK(seen.size() == 25);
}

TEST_CASE("hit counts grow quadratically in the order bound") {
  auto fam = modular_family();
  std::map<long, size_t> count;
  for (long N : {8L, 16L}) count[N] = torsion_enumerate(fam, N, {257, 257}).size();
  CHECK(count[8] == modular_oracle(8).size());
  CHECK(count[16] == modular_oracle(16).size());
  double ratio = double(count[16]) / double(count[8]);
  CHECK(std::abs(ratio - 4.0) <= 0.15 * 4.0);
}

TEST_CASE("invariant_subspace over the rationals") {
  auto mk = [](std::vector<std::vector<long>> rows) {
    DenseMatrix<Rational> m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = q(rows[i][j]);
    return m;
  };

  auto unipotent = make_monodromy_problem({mk({{1, 1}, {0, 1}})});
  auto inv = invariant_subspace(unipotent);
  REQUIRE(inv.size() == 1);
  CHECK(inv[0][0] == q(1));
  CHECK(inv[0][1] == q(0));

  auto sl2 = make_monodromy_problem({mk({{0, -1}, {1, 0}}), mk({{1, 1}, {0, 1}})});
  CHECK(invariant_subspace(sl2).empty());

  auto ident = make_monodromy_problem({mk({{1, 0}, {0, 1}})});
  CHECK(invariant_subspace(ident).size() == 2);
}

TEST_CASE("quasi_rational_check verdicts") {
  auto mk = [](std::vector<std::vector<long>> rows) {
    DenseMatrix<Rational> m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = q(rows[i][j]);
    return m;
  };
  auto sl2 = make_monodromy_problem({mk({{0, -1}, {1, 0}}), mk({{1, 1}, {0, 1}})});

  Eigen::VectorXd vrat(2);
  vrat << 0.25, -0.75;
  auto rep = quasi_rational_check(sl2, vrat, 1000);
  CHECK(rep.verdict == QuasiRationalVerdict::pass);

  Eigen::VectorXd virr(2);
  virr << std::sqrt(2.0), 0.0;
  auto rep2 = quasi_rational_check(sl2, virr, 1000);
  CHECK(rep2.verdict == QuasiRationalVerdict::consistent);

  auto ident = make_monodromy_problem({mk({{1, 0}, {0, 1}})});
  CHECK_THROWS_AS(quasi_rational_check(ident, vrat, 1000), precondition_error);
}

TEST_CASE("toy module agrees with the frame solver on one-dimensional blocks") {
  // potential with g'' = tau(z) = i + z/4
  MVPoly<Complex> g(1);
  g.add_term({2}, Complex(0, 0.5));
  g.add_term({3}, Complex(1.0 / 24, 0));
  Potential<Complex> pot(1, g);
  MVPoly<Complex> f(1);
  f.add_term({2}, Complex(0.5, 0));  // f' = z
  Section<Complex> sec{f};

  MVPoly<Complex> tau(1);
  tau.add_term({0}, Complex(0, 1));
  tau.add_term({1}, Complex(0.25, 0));
  auto fam = make_elliptic_family(tau, identity_poly(), Box{{-0.5, -0.5}, {0.5, 0.5}});

  Rng rng(101);
  for (int t = 0; t < 25; ++t) {
    Complex b(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    auto a = betti_coords(pot, sec, {b});
    auto [b1, b2] = betti_elliptic(fam, b);
    CHECK(a[0] == Catch::Approx(b1).margin(1e-10));
    CHECK(a[1] == Catch::Approx(b2).margin(1e-10));
  }
}
