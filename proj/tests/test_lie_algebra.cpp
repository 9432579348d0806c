#include <catch2/catch_amalgamated.hpp>

#include "curvlab/lie_algebra.hpp"
#include "helpers.hpp"

using namespace curvlab;
using curvlab::testing::max_abs_diff;
using curvlab::testing::vec3;

TEST_CASE("so3 bracket convention and structure") {
  const LieAlgebra so3 = build_so3();
  REQUIRE(so3.dim() == 3);
  CHECK(max_abs_diff(so3.bracket(so3.basis(0), so3.basis(1)), so3.basis(2)) == 0.0);
  CHECK(so3.jacobi_residual() <= 1e-12);
  // ad-invariance at the sign level: <[e1,e2],e3> = 1, <e2,[e1,e3]> = -1
  CHECK(so3.inner(so3.bracket(so3.basis(0), so3.basis(1)), so3.basis(2)) ==
        Catch::Approx(1.0));
  CHECK(so3.inner(so3.basis(1), so3.bracket(so3.basis(0), so3.basis(2))) ==
        Catch::Approx(-1.0));
  // bilinearity: [e1, 2e1 + 3e2] = 3e3
  CHECK(max_abs_diff(so3.bracket(so3.basis(0), 2.0 * so3.basis(0) + 3.0 * so3.basis(1)),
                     3.0 * so3.basis(2)) <= 1e-15);
}

TEST_CASE("direct sum is a product of ideals") {
  const LieAlgebra so3 = build_so3();
  const LieAlgebra so4 = direct_sum(so3, so3);
  REQUIRE(so4.dim() == 6);
  CHECK(so4.jacobi_residual() <= 1e-12);
  // cross-factor brackets vanish
  CHECK(so4.norm(so4.bracket(so4.basis(0), so4.basis(4))) == 0.0);
  // componentwise bracket: [(e1,e1),(e2,e2)] = (e3,e3)
  const Vec x = so4_vec(vec3(1, 0, 0), vec3(1, 0, 0));
  const Vec y = so4_vec(vec3(0, 1, 0), vec3(0, 1, 0));
  CHECK(max_abs_diff(so4.bracket(x, y), so4_vec(vec3(0, 0, 1), vec3(0, 0, 1))) == 0.0);
  // mixed: [(e1,0),(e2,e3)] = (e3,0)
  CHECK(max_abs_diff(so4.bracket(so4_vec(vec3(1, 0, 0), vec3(0, 0, 0)),
                                 so4_vec(vec3(0, 1, 0), vec3(0, 0, 1))),
                     so4_vec(vec3(0, 0, 1), vec3(0, 0, 0))) == 0.0);
}

TEST_CASE("bracket rejects dimension mismatch") {
  const LieAlgebra so3 = build_so3();
  CHECK_THROWS_AS(so3.bracket(Vec::Zero(4), Vec::Zero(3)), Error);
}

TEST_CASE("random bracket identities") {
  const LieAlgebra so4 = build_so4();
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6), z = rng.gaussian_vec(6);
    const double a = rng.normal(), b = rng.normal();
    // bilinearity and antisymmetry
    CHECK(so4.norm(so4.bracket(a * x + b * y, z) - a * so4.bracket(x, z) -
                   b * so4.bracket(y, z)) <= 1e-12 * (1 + so4.norm(z)));
    CHECK(so4.norm(so4.bracket(x, y) + so4.bracket(y, x)) <= 1e-12);
    // Jacobi
    CHECK(so4.norm(so4.bracket(so4.bracket(x, y), z) + so4.bracket(so4.bracket(y, z), x) +
                   so4.bracket(so4.bracket(z, x), y)) <= 1e-10);
    // ad-invariance of h0: <[X,Y],Z> = <X,[Y,Z]>
    CHECK(so4.inner(so4.bracket(x, y), z) ==
          Catch::Approx(so4.inner(x, so4.bracket(y, z))).margin(1e-10));
  }
}

TEST_CASE("centralizers") {
  const LieAlgebra so3 = build_so3();
  const LieAlgebra so4 = build_so4();

  SECTION("so3 centralizers are lines") {
    const Subspace c = centralizer_basis(so3, so3.basis(0));
    REQUIRE(c.k() == 1);
    CHECK(std::abs(std::abs(so3.inner(c.basis.col(0), so3.basis(0))) - 1.0) <= 1e-12);
    Rng rng(5);
    for (int i = 0; i < 20; ++i)
      CHECK(centralizer_basis(so3, rng.unit_vec(3)).k() == 1);
  }

  SECTION("regular so4 vector: dim 2, independent nullspace oracle agrees") {
    const Vec x = so4_vec(vec3(1, 0, 0), 2.0 * vec3(0, 1, 0));
    const Subspace c = centralizer_basis(so4, x);
    REQUIRE(c.k() == 2);
    // oracle: kernel of the explicit ad matrix via full-pivot LU
    Eigen::FullPivLU<Mat> lu(so4.ad(x));
    lu.setThreshold(1e-9);
    const Mat ker = lu.kernel();
    REQUIRE(ker.cols() == 2);
    // spans agree: projecting the oracle kernel onto the centralizer basis is lossless
    for (int j = 0; j < ker.cols(); ++j) {
      const Vec v = ker.col(j);
      const Vec proj = c.basis * (c.basis.transpose() * v);
      CHECK(so4.norm(v - proj) <= 1e-9 * so4.norm(v));
    }
    // expected span{(e1,0),(0,e2)}
    CHECK(so4.norm(so4.bracket(x, so4_vec(vec3(1, 0, 0), vec3(0, 0, 0)))) <= 1e-12);
    CHECK(so4.norm(so4.bracket(x, so4_vec(vec3(0, 0, 0), vec3(0, 1, 0)))) <= 1e-12);
  }

  SECTION("singular so4 vector: dim 4") {
    const Subspace c = centralizer_basis(so4, so4_vec(vec3(1, 0, 0), vec3(0, 0, 0)));
    CHECK(c.k() == 4);
  }

  SECTION("centralizer members commute with X") {
    Rng rng(17);
    for (int i = 0; i < 30; ++i) {
      const Vec x = rng.unit_vec(6);
      const Subspace c = centralizer_basis(so4, x);
      for (int j = 0; j < c.k(); ++j)
        CHECK(so4.norm(so4.bracket(x, c.basis.col(j))) <= 1e-10);
    }
  }

  SECTION("zero vector rejected") {
    CHECK_THROWS_AS(centralizer_basis(so3, Vec::Zero(3)), Error);
  }
}

TEST_CASE("projection") {
  const LieAlgebra so3 = build_so3();
  const LieAlgebra so4 = build_so4();

  const Subspace s3 = make_subspace(so3, so3.basis(2));
  CHECK(max_abs_diff(project(so3, s3, so3.basis(0) + so3.basis(2)), so3.basis(2)) <=
        1e-14);

  const Subspace diag = so4_diagonal(so4);
  const Vec e10 = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
  CHECK(max_abs_diff(project(so4, diag, e10),
                     so4_vec(0.5 * vec3(1, 0, 0), 0.5 * vec3(1, 0, 0))) <= 1e-14);

  const Subspace g1 = so4_factor(so4, 0);
  Rng rng(3);
  const Vec v = rng.gaussian_vec(6);
  Vec expect = v;
  expect.tail(3).setZero();
  CHECK(max_abs_diff(project(so4, g1, v), expect) <= 1e-14);

  // complement identity: P_S x + P_{S-perp} x = x
  const Subspace perp = make_subspace(
      so4, Mat(Mat::Identity(6, 6) - g1.basis * g1.basis.transpose()));
  CHECK(max_abs_diff(project(so4, g1, v) + project(so4, perp, v), v) <= 1e-12);
}

TEST_CASE("subspace flags") {
  const LieAlgebra so4 = build_so4();
  CHECK(so4_factor(so4, 0).is_ideal);
  CHECK(so4_factor(so4, 0).is_subalgebra);
  CHECK_FALSE(so4_factor(so4, 0).is_abelian);
  const Subspace diag = so4_diagonal(so4);
  CHECK(diag.is_subalgebra);
  CHECK_FALSE(diag.is_abelian);
  CHECK_FALSE(diag.is_ideal);
  // tau = span{A3, B1} is abelian
  Mat tau(6, 2);
  tau.setZero();
  tau(2, 0) = 1.0;
  tau(3, 1) = 1.0;
  const Subspace t = make_subspace(so4, tau);
  CHECK(t.is_abelian);
  CHECK(t.is_subalgebra);
  // derived subalgebra of a semisimple algebra is everything
  CHECK(derived_subalgebra(so4).k() == 6);
  CHECK(derived_subalgebra(build_so3()).k() == 3);
}
