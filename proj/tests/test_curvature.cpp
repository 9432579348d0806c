#include <catch2/catch_amalgamated.hpp>

#include "curvlab/curvature.hpp"
#include "curvlab/lie_algebra.hpp"
#include "helpers.hpp"

using namespace curvlab;
using curvlab::testing::vec3;

namespace {

const LieAlgebra& so3() {
  static const LieAlgebra l = build_so3();
  return l;
}
const LieAlgebra& so4() {
  static const LieAlgebra l = build_so4();
  return l;
}

Mat diag3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v.asDiagonal();
}

// commuting so4 pair (a u, b v), (-b u, a v)
std::pair<Vec, Vec> commuting_pair(Rng& rng) {
  const Vec u = rng.unit_vec(3), v = rng.unit_vec(3);
  const double th = rng.uniform(0.0, 2.0 * M_PI);
  return {so4_vec(std::cos(th) * u, std::sin(th) * v),
          so4_vec(-std::sin(th) * u, std::cos(th) * v)};
}

// 20 t-values spanning the middle 90% of the path domain (clamped at +-5)
std::vector<double> domain_sample(const Direction& psi, int n = 20) {
  PathDomain d = domain_of(psi);
  const double lo = std::max(d.lower, -5.0), hi = std::min(d.upper, 5.0);
  const double w = hi - lo;
  std::vector<double> ts;
  for (int k = 0; k < n; ++k)
    ts.push_back(lo + 0.05 * w + 0.9 * w * k / (n - 1.0));
  return ts;
}

}  // namespace

TEST_CASE("Puttmann formula on so3") {
  const Vec e1 = so3().basis(0), e2 = so3().basis(1);
  CHECK(puttmann_curvature(so3(), MetricForm(Mat::Identity(3, 3)), e1, e2) ==
        Catch::Approx(0.25));
  // hand-expanded value for the stretched metric: 1 - 1.5 + 0 - 0
  CHECK(puttmann_curvature(so3(), MetricForm(diag3(1, 1, 2)), e1, e2) ==
        Catch::Approx(-0.5));
  // degenerate plane
  Rng rng(2);
  const MetricForm phi(rng.spd(3));
  const Vec z = rng.gaussian_vec(3);
  CHECK(puttmann_curvature(so3(), phi, z, 3.0 * z) == Catch::Approx(0.0).margin(1e-12));
  // symmetry in (Z1, Z2)
  const Vec z2 = rng.gaussian_vec(3);
  CHECK(puttmann_curvature(so3(), phi, z, z2) ==
        Catch::Approx(puttmann_curvature(so3(), phi, z2, z)).margin(1e-12));
}

TEST_CASE("Koszul oracle agrees with Puttmann") {
  CHECK(koszul_oracle(so3(), MetricForm(Mat::Identity(3, 3)), so3().basis(0),
                      so3().basis(1)) == Catch::Approx(0.25));
  CHECK(koszul_oracle(so3(), MetricForm(diag3(1, 1, 2)), so3().basis(0),
                      so3().basis(1)) == Catch::Approx(-0.5));
  for (const LieAlgebra* l : {&so3(), &so4()}) {
    Rng rng(101);
    for (int i = 0; i < 250; ++i) {
      const MetricForm phi(rng.spd(l->dim()));
      const KoszulOracle oracle(*l, l->h0(), phi.phi());
      const Vec z1 = rng.gaussian_vec(l->dim()), z2 = rng.gaussian_vec(l->dim());
      const double k = oracle.sectional(z1, z2);
      const double p = puttmann_curvature(*l, phi, z1, z2);
      CHECK(std::abs(k - p) <= 1e-9 * (1.0 + std::abs(k)));
    }
  }
}

TEST_CASE("kappa along paths") {
  SECTION("Psi = 0 keeps kappa constant") {
    const Direction zero(Mat::Zero(6, 6));
    Rng rng(7);
    const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
    const Vec b = so4().bracket(x, y);
    const double expect = 0.25 * so4().inner(b, b);
    for (double t : {-3.0, 0.0, 0.9, 7.5})
      CHECK(kappa(so4(), zero, x, y, t) == Catch::Approx(expect));
  }
  SECTION("abelian expansion closed form on so3") {
    Mat proj = Mat::Zero(3, 3);
    proj(2, 2) = 1.0;
    const Direction psi(proj);
    const Vec e1 = so3().basis(0), e2 = so3().basis(1);
    CHECK(kappa(so3(), psi, e1, e2, 0.25) == Catch::Approx(0.0).margin(1e-12));
    const double expect = 0.25 - 0.75 * (0.3 / 0.7);
    CHECK(kappa(so3(), psi, e1, e2, 0.3) == Catch::Approx(expect));
    CHECK(expect == Catch::Approx(-0.071428571428).epsilon(1e-9));
  }
  SECTION("outside the domain throws") {
    CHECK_THROWS_AS(kappa(so3(), Direction(Mat::Identity(3, 3)), so3().basis(0),
                          so3().basis(1), 1.5),
                    PathDomainError);
  }
}

TEST_CASE("kappa coefficients") {
  SECTION("Psi = 0") {
    Rng rng(13);
    const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
    const auto co = kappa_coefficients(so4(), Direction(Mat::Zero(6, 6)), x, y);
    const Vec b = so4().bracket(x, y);
    CHECK(co.alpha == Catch::Approx(0.25 * so4().inner(b, b)));
    CHECK(co.beta == 0.0);
    CHECK(co.gamma == 0.0);
    CHECK(co.delta == 0.0);
    CHECK(co.D.norm() == 0.0);
  }

  SECTION("diagonal shrink on so4: commuting pair has delta = 1/8") {
    Mat half = Mat::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
      half(i, i) = half(3 + i, 3 + i) = 0.5;
      half(i, 3 + i) = half(3 + i, i) = 0.5;
    }
    const Direction shrink_diag(Mat(-half));  // -proj onto the diagonal subalgebra
    const Vec x = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
    const Vec y = so4_vec(vec3(0, 0, 0), vec3(0, 1, 0));
    const auto co = kappa_coefficients(so4(), shrink_diag, x, y);
    CHECK(std::abs(co.alpha) <= 1e-12);
    CHECK(std::abs(co.beta) <= 1e-12);
    CHECK(std::abs(co.gamma) <= 1e-12);
    CHECK(co.delta == Catch::Approx(0.125));
    CHECK(co.delta ==
          Catch::Approx(third_derivative_commuting(so4(), shrink_diag, x, y)));
  }

  SECTION("closed form equals direct kappa across the domain") {
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
      const Direction psi(rng.symmetric(6, 0.6));
      const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
      const auto co = kappa_coefficients(so4(), psi, x, y);
      for (double t : domain_sample(psi)) {
        const double direct = kappa(so4(), psi, x, y, t);
        const double closed = co.closed_form(so4().h0(), psi, t);
        CHECK(std::abs(direct - closed) <= 1e-8);
      }
    }
  }

  SECTION("tail is nonpositive for t >= 0") {
    Rng rng(19);
    for (int i = 0; i < 30; ++i) {
      const Direction psi(rng.symmetric(6, 0.6));
      const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
      const auto co = kappa_coefficients(so4(), psi, x, y);
      for (double t : domain_sample(psi)) {
        if (t < 0.0) continue;
        const double cubic = co.alpha + co.beta * t + co.gamma * t * t +
                             co.delta * t * t * t;
        CHECK(kappa(so4(), psi, x, y, t) - cubic <= 1e-12);
      }
    }
  }

  SECTION("power series truncations converge for |t| < 1/||Psi||") {
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
      const Direction psi(rng.symmetric(6, 0.4));
      const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
      const auto co = kappa_coefficients(so4(), psi, x, y);
      const double t = 0.8 / psi.operator_norm();
      const MetricForm phi_t = path_at(psi, t);
      const double exact = -0.75 * std::pow(t, 4) *
                           co.D.dot(so4().h0() * (phi_t.phi() * co.D));
      double partial = 0.0;
      Vec pk_d = co.D;  // Psi^k D
      double prev_err = std::abs(exact), last_err = prev_err;
      for (int n = 4; n < 200; ++n) {
        partial += -0.75 * std::pow(t, n) * pk_d.dot(so4().h0() * co.D);
        pk_d = psi.psi() * pk_d;
        last_err = std::abs(partial - exact);
      }
      CHECK(last_err <= 1e-9 * (1.0 + std::abs(exact)));
      CHECK(last_err <= prev_err + 1e-15);
    }
  }
}

TEST_CASE("commuting pairs: low-order coefficients vanish") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    const Direction psi(rng.symmetric(6));
    auto [x, y] = commuting_pair(rng);
    const auto co = kappa_coefficients(so4(), psi, x, y);
    CHECK(std::abs(co.alpha) <= 1e-10);
    CHECK(std::abs(co.beta) <= 1e-10);
    CHECK(std::abs(co.gamma) <= 1e-10);
    // delta agrees with the five-term formula
    CHECK(third_derivative_commuting(so4(), psi, x, y) ==
          Catch::Approx(co.delta).margin(1e-10));
  }
}

TEST_CASE("third derivative special cases") {
  Mat half = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    half(i, i) = half(3 + i, 3 + i) = 0.5;
    half(i, 3 + i) = half(3 + i, i) = 0.5;
  }
  const Vec x = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
  const Vec y = so4_vec(vec3(0, 0, 0), vec3(0, 1, 0));

  SECTION("shrinking a subalgebra: |[X^h, Y^h]|^2") {
    CHECK(third_derivative_commuting(so4(), Direction(Mat(-half)), x, y) ==
          Catch::Approx(0.125));
  }
  SECTION("expanding it flips the sign") {
    CHECK(third_derivative_commuting(so4(), Direction(half), x, y) ==
          Catch::Approx(-0.125));
  }
  SECTION("multiples of the identity are flat to third order") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      auto [u, v] = commuting_pair(rng);
      const double a = rng.normal();
      CHECK(third_derivative_commuting(
                so4(), Direction(Mat(a * Mat::Identity(6, 6))), u, v) ==
            Catch::Approx(0.0).margin(1e-12));
    }
  }
  SECTION("non-commuting input is rejected") {
    CHECK_THROWS_AS(third_derivative_commuting(so3(), Direction(Mat::Identity(3, 3)),
                                               so3().basis(0), so3().basis(1)),
                    Error);
  }
}

TEST_CASE("untwisted second derivative") {
  const Vec x = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
  const Vec y = so4_vec(vec3(0, 0, 0), vec3(0, 1, 0));
  Mat half = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    half(i, i) = half(3 + i, 3 + i) = 0.5;
    half(i, 3 + i) = half(3 + i, i) = 0.5;
  }
  CHECK(untwisted_second_derivative(so4(), Direction(Mat::Zero(6, 6)), x, y) == 0.0);
  CHECK(untwisted_second_derivative(so4(), Direction(half), x, y) ==
        Catch::Approx(0.5));
  CHECK(untwisted_second_derivative(so4(), Direction(Mat(2.0 * Mat::Identity(6, 6))),
                                    x, y) == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(untwisted_second_derivative(so3(), Direction(Mat::Identity(3, 3)),
                                              so3().basis(0), so3().basis(1)),
                  Error);

  SECTION("matches finite differences of the untwisted curvature, always >= 0") {
    // the analytic second derivative of t -> k_{h_t}(X,Y) is half the
    // bracket-norm value (the quadratic Taylor coefficient), for any path
    // with the same first-order term
    Rng rng(37);
    for (int i = 0; i < 40; ++i) {
      const Direction psi(rng.symmetric(6, 0.7));
      auto [u, v] = commuting_pair(rng);
      const double expect = untwisted_second_derivative(so4(), psi, u, v);
      CHECK(expect >= 0.0);
      auto untwisted = [&](double t) {
        const MetricForm phi_t = path_at(psi, t);
        return puttmann_curvature(so4(), phi_t, u, v);
      };
      const double fd = fd_derivative(untwisted, 2, 1e-3);
      CHECK(std::abs(fd - 0.5 * expect) <= 1e-5 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("finite differences confirm the series coefficients") {
  Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    const Direction psi(rng.symmetric(3, 0.7));
    const Vec x = rng.gaussian_vec(3), y = rng.gaussian_vec(3);
    const auto co = kappa_coefficients(so3(), psi, x, y);
    auto f = [&](double t) { return kappa(so3(), psi, x, y, t); };
    const double d1 = fd_derivative(f, 1, 1e-3);
    const double d2 = fd_derivative(f, 2, 1e-3);
    const double d3 = fd_derivative(f, 3, 1e-3);
    CHECK(std::abs(d1 - co.beta) <= 1e-5 * std::max(1.0, std::abs(co.beta)));
    CHECK(std::abs(d2 - 2.0 * co.gamma) <=
          1e-5 * std::max(1.0, std::abs(2.0 * co.gamma)));
    CHECK(std::abs(d3 - 6.0 * co.delta) <=
          1e-5 * std::max(1.0, std::abs(6.0 * co.delta)));
  }
}
