#include <catch2/catch_amalgamated.hpp>

#include "curvlab/so4.hpp"
#include "curvlab/variations.hpp"
#include "helpers.hpp"

using namespace curvlab;
using curvlab::testing::max_abs_diff;
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

Subspace span_e3(const LieAlgebra& l) { return make_subspace(l, l.basis(2)); }

Mat diag6(std::initializer_list<double> v) {
  Vec d(6);
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST_CASE("cheeger evolution") {
  Mat a0(2, 2);
  a0.setZero();
  a0(0, 0) = 1.0;
  a0(1, 1) = 0.5;
  Mat expect(2, 2);
  expect.setZero();
  expect(0, 0) = 0.5;
  expect(1, 1) = 1.0 / 3.0;
  CHECK(max_abs_diff(cheeger_evolve(a0, 1.0), expect) <= 1e-14);
  CHECK(max_abs_diff(cheeger_evolve(a0, 0.0), a0) == 0.0);
  // diag(1/lambda) evolves to diag(1/(lambda+t))
  CHECK(cheeger_evolve(Mat::Constant(1, 1, 0.5), 3.0)(0, 0) == Catch::Approx(0.2));

  SECTION("inverse-linearity") {
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
      const Mat a = rng.spd(5);
      const double t = rng.uniform(0.0, 4.0);
      CHECK(max_abs_diff(cheeger_evolve(a, t).inverse(),
                         a.inverse() + t * Mat::Identity(5, 5)) <= 1e-9);
    }
  }
  SECTION("singular I + tA0 rejected") {
    CHECK_THROWS_AS(cheeger_evolve(Mat(-Mat::Identity(2, 2)), 1.0), Error);
  }
}

TEST_CASE("shrink direction") {
  CHECK(max_abs_diff(shrink_direction(so4(), so4_factor(so4(), 0)).psi(),
                     diag6({-1, -1, -1, 0, 0, 0})) <= 1e-14);
  Mat d3 = Mat::Zero(3, 3);
  d3(2, 2) = -1.0;
  CHECK(max_abs_diff(shrink_direction(so3(), span_e3(so3())).psi(), d3) <= 1e-14);

  const PathDomain dom = domain_of(shrink_direction(so4(), so4_diagonal(so4())));
  CHECK(dom.lower == Catch::Approx(-1.0));
  CHECK(std::isinf(dom.upper));

  // not a subalgebra: span{e1, e2} in so3
  Mat two(3, 2);
  two.setZero();
  two(0, 0) = two(1, 1) = 1.0;
  CHECK_THROWS_AS(shrink_direction(so3(), make_subspace(so3(), two)), Error);
}

TEST_CASE("abelian enlargement closed form") {
  const Subspace s = span_e3(so3());
  const Vec e1 = so3().basis(0), e2 = so3().basis(1);
  CHECK(abelian_enlarge_kappa(so3(), s, e1, e2, 0.25) == Catch::Approx(0.0).margin(1e-15));
  CHECK(abelian_enlarge_kappa(so3(), s, e1, e2, 0.3) ==
        Catch::Approx(0.25 - 0.75 * 0.3 / 0.7));
  Rng rng(5);
  const Vec x0 = rng.gaussian_vec(3), y0 = rng.gaussian_vec(3);
  CHECK(abelian_enlarge_kappa(so3(), s, x0, y0, 0.0) ==
        Catch::Approx(0.25 * so3().inner(so3().bracket(x0, y0), so3().bracket(x0, y0))));

  SECTION("agrees with direct kappa for all pairs") {
    const Direction psi(projector(so3(), s));
    for (int i = 0; i < 50; ++i) {
      const Vec x = rng.gaussian_vec(3), y = rng.gaussian_vec(3);
      const double t = rng.uniform(-2.0, 0.95);
      CHECK(abelian_enlarge_kappa(so3(), s, x, y, t) ==
            Catch::Approx(kappa(so3(), psi, x, y, t)).margin(1e-9));
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(abelian_enlarge_kappa(so3(), s, e1, e2, 1.0), Error);
    CHECK_THROWS_AS(
        abelian_enlarge_kappa(so4(), so4_factor(so4(), 0), Vec::Zero(6), Vec::Zero(6), 0.5),
        Error);
  }
}

TEST_CASE("4/3 expansion bound") {
  const Subspace s = span_e3(so3());
  CHECK(max_abelian_expansion_check(so3(), s, 0.25, 200, 9).passed());

  const AnalysisReport fail = max_abelian_expansion_check(so3(), s, 0.3, 200, 9);
  REQUIRE(fail.failed());
  REQUIRE_FALSE(fail.witnesses.empty());
  // worst witness is e3 itself: expansion 1/(1-0.3)
  CHECK(fail.witnesses[0].value == Catch::Approx(1.0 / 0.7));
  CHECK(std::abs(fail.witnesses[0].X(2)) == Catch::Approx(1.0).margin(1e-9));

  SECTION("central subalgebras expand arbitrarily") {
    const LieAlgebra r1("r1", {Mat::Zero(1, 1)}, Mat::Identity(1, 1));
    const LieAlgebra g = direct_sum(so3(), r1);
    Mat center(4, 1);
    center.setZero();
    center(3, 0) = 1.0;
    const Subspace z = make_subspace(g, center);
    for (double t : {0.5, 0.9, 0.99})
      CHECK(max_abelian_expansion_check(g, z, t, 100, 5).passed());
  }
}

TEST_CASE("nonabelian enlargement series") {
  SECTION("reduces to the abelian form on abelian S") {
    const Subspace s = span_e3(so3());
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
      const Vec x = rng.gaussian_vec(3), y = rng.gaussian_vec(3);
      const double t = rng.uniform(-1.0, 0.9);
      CHECK(nonabelian_enlarge_kappa(so3(), s, x, y, t) ==
            Catch::Approx(abelian_enlarge_kappa(so3(), s, x, y, t)).margin(1e-12));
    }
  }
  SECTION("matches direct kappa for subalgebras of so4") {
    Rng rng(13);
    for (const Subspace& s : {so4_factor(so4(), 0), so4_diagonal(so4())}) {
      const Direction psi(projector(so4(), s));
      for (int i = 0; i < 40; ++i) {
        const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
        const double t = rng.uniform(-0.5, 0.9);
        const double series = nonabelian_enlarge_kappa(so4(), s, x, y, t);
        CHECK(series == Catch::Approx(kappa(so4(), psi, x, y, t)).margin(1e-9));
      }
    }
    // spec'd instance
    const Vec x = so4_vec(vec3(1, 0, 0), vec3(1, 0, 0));
    const Vec y = so4_vec(vec3(0, 1, 0), vec3(0, 1, 0));
    const Subspace g1 = so4_factor(so4(), 0);
    CHECK(nonabelian_enlarge_kappa(so4(), g1, x, y, 0.1) ==
          Catch::Approx(kappa(so4(), Direction(projector(so4(), g1)), x, y, 0.1))
              .margin(1e-9));
  }
  SECTION("t = 0 recovers the bi-invariant value") {
    Rng rng(17);
    const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
    const Vec b = so4().bracket(x, y);
    CHECK(nonabelian_enlarge_kappa(so4(), so4_diagonal(so4()), x, y, 0.0) ==
          Catch::Approx(0.25 * so4().inner(b, b)));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(nonabelian_enlarge_kappa(so4(), so4_factor(so4(), 0), Vec::Zero(6),
                                             Vec::Zero(6), 1.2),
                    Error);
  }
}

TEST_CASE("bracket ratio supremum") {
  CHECK(bracket_ratio_sup(so3(), span_e3(so3()), 400, 21) == 0.0);
  CHECK(bracket_ratio_sup(so4(), so4_factor(so4(), 0), 400, 21) <= 1.0 + 1e-12);
  CHECK(std::isinf(bracket_ratio_sup(so4(), so4_diagonal(so4()), 400, 21)));
  // the diagonal witness in closed form: X=(e1,0), Y=(0,e2) commute but
  // [X^D, Y^D] does not vanish
  const Vec x = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
  const Vec y = so4_vec(vec3(0, 0, 0), vec3(0, 1, 0));
  CHECK(so4().norm(so4().bracket(x, y)) == 0.0);
  const Subspace d = so4_diagonal(so4());
  CHECK(so4().norm(so4().bracket(project(so4(), d, x), project(so4(), d, y))) > 0.1);
}

TEST_CASE("commuting pair sampler") {
  CHECK(sample_commuting_pairs(so3(), 50, 33).empty());

  const auto pairs = sample_commuting_pairs(so4(), 100, 33);
  REQUIRE(pairs.size() == 100);
  for (const auto& p : pairs) {
    CHECK(p.commutator_norm <= 1e-10);
    CHECK(so4().norm(p.X) == Catch::Approx(1.0));
    CHECK(so4().norm(p.Y) == Catch::Approx(1.0));
    CHECK(std::abs(so4().inner(p.X, p.Y)) <= 1e-12);
    CHECK(so4().norm(so4().bracket(p.X, p.Y)) <= 1e-10);
  }
  // determinism
  const auto again = sample_commuting_pairs(so4(), 100, 33);
  for (size_t i = 0; i < pairs.size(); ++i) {
    CHECK(max_abs_diff(pairs[i].X, again[i].X) == 0.0);
    CHECK(max_abs_diff(pairs[i].Y, again[i].Y) == 0.0);
  }
}

TEST_CASE("infinitesimal nonnegativity reports") {
  const Subspace diag = so4_diagonal(so4());

  SECTION("shrinking the diagonal passes") {
    const auto rep = infinitesimal_nonnegativity_report(
        so4(), shrink_direction(so4(), diag), 400, 1e-9, 1);
    CHECK(rep.passed());
    CHECK(rep.samples_used == 400);
  }
  SECTION("expanding the diagonal fails with a negative witness") {
    const Direction expand(projector(so4(), diag));
    const auto rep = infinitesimal_nonnegativity_report(so4(), expand, 400, 1e-9, 1);
    REQUIRE(rep.failed());
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses[0].value < -1e-9);
    // the canonical witness pair has delta = -1/8
    const Vec x = so4_vec(vec3(1, 0, 0), vec3(0, 0, 0));
    const Vec y = so4_vec(vec3(0, 0, 0), vec3(0, 1, 0));
    CHECK(third_derivative_commuting(so4(), expand, x, y) == Catch::Approx(-0.125));
  }
  SECTION("multiples of the identity pass") {
    const auto rep = infinitesimal_nonnegativity_report(
        so4(), Direction(Mat(1.7 * Mat::Identity(6, 6))), 200, 1e-9, 1);
    CHECK(rep.passed());
  }
  SECTION("so3 has no commuting pairs: inconclusive") {
    const auto rep = infinitesimal_nonnegativity_report(
        so3(), Direction(Mat::Zero(3, 3)), 50, 1e-9, 1);
    CHECK(rep.verdict == Verdict::INCONCLUSIVE);
  }
  SECTION("reports are reproducible") {
    const Direction expand(projector(so4(), diag));
    const auto a = infinitesimal_nonnegativity_report(so4(), expand, 300, 1e-9, 7);
    const auto b = infinitesimal_nonnegativity_report(so4(), expand, 300, 1e-9, 7);
    CHECK(to_json(a).dump() == to_json(b).dump());
  }
}

TEST_CASE("lemma k closure check") {
  SECTION("shrinking a factor passes") {
    const auto rep =
        lemma_k_check(so4(), shrink_direction(so4(), so4_factor(so4(), 0)), 200, 1e-9, 2);
    CHECK(rep.passed());
  }
  SECTION("zero direction passes vacuously") {
    CHECK(lemma_k_check(so4(), Direction(Mat::Zero(6, 6)), 100, 1e-9, 2).passed());
  }
  SECTION("a cross-factor mixing term is caught, consistently with Def 3.4") {
    Mat m = diag6({0, 1, 1, 1, 1, 1});
    m(1, 4) = m(4, 1) = 0.3;  // couple A2 and B2
    const Direction psi(m);
    const auto lemma = lemma_k_check(so4(), psi, 200, 1e-9, 2);
    REQUIRE(lemma.failed());
    // every lemma failure must show up in the Def 3.4 report as well
    const auto inf = infinitesimal_nonnegativity_report(so4(), psi, 2000, 1e-9, 2);
    CHECK(inf.failed());
  }
}

TEST_CASE("global rigidity check") {
  SECTION("bi-invariant metric passes vacuously") {
    CHECK(global_rigidity_check(so4(), MetricForm(Mat::Identity(6, 6)), 100, 1e-9, 3)
              .passed());
  }
  SECTION("catalog torus metric passes") {
    TorusParams p;
    p.a1 = p.a2 = 1.2;
    CHECK(global_rigidity_check(so4(), torus_metric(p), 200, 1e-9, 3).passed());
  }
  SECTION("crafted mixing metric fails with a witness") {
    Mat m = diag6({1, 2, 2, 2, 2, 2});
    m(1, 4) = m(4, 1) = 0.3;
    const auto rep = global_rigidity_check(so4(), MetricForm(m), 200, 1e-9, 3);
    REQUIRE(rep.failed());
    REQUIRE_FALSE(rep.witnesses.empty());
    // witness bracket leaves the smallest eigenspace span{A1}
    CHECK(rep.witnesses[0].value > 1e-3);
  }
}

TEST_CASE("minimum curvature estimates") {
  SECTION("bi-invariant so4 attains zero on commuting planes") {
    const auto est = min_curvature_estimate(so4(), MetricForm(Mat::Identity(6, 6)),
                                            300, 40, 4);
    CHECK(std::abs(est.value) <= 1e-10);
  }
  SECTION("stretched so3 metric has a negative plane near (e1,e2)") {
    Mat d = Mat::Identity(3, 3);
    d(2, 2) = 2.0;
    const auto est = min_curvature_estimate(so3(), MetricForm(d), 300, 60, 4);
    CHECK(est.value <= -0.5 + 1e-9);
    CHECK(est.value >= -0.52);
  }
  SECTION("the 4/3 boundary metric on so3 has minimum zero") {
    const MetricForm boundary =
        path_at(Direction(projector(so3(), span_e3(so3()))), 0.25);
    const auto est = min_curvature_estimate(so3(), boundary, 300, 60, 4);
    CHECK(est.value >= -1e-9);
    CHECK(est.value <= 1e-6);
  }
}

TEST_CASE("zero-curvature planes of a shrink deformation (Eschenburg)") {
  const Subspace diag = so4_diagonal(so4());
  const Direction psi = shrink_direction(so4(), diag);
  const double t = 0.5;
  int nonzero_planes = 0;
  for (const auto& p : sample_commuting_pairs(so4(), 300, 5)) {
    const double k = kappa(so4(), psi, p.X, p.Y, t);
    const double proj_bracket = so4().norm(
        so4().bracket(project(so4(), diag, p.X), project(so4(), diag, p.Y)));
    if (std::abs(k) <= 1e-9) {
      CHECK(proj_bracket <= 1e-9);
    } else {
      CHECK(proj_bracket > 1e-9);
      ++nonzero_planes;
    }
  }
  CHECK(nonzero_planes > 0);
  // zero side: commuting pairs sharing one axis have [X^D, Y^D] = 0, so the
  // twisted plane stays flat
  Rng rng0(55);
  for (int i = 0; i < 50; ++i) {
    const Vec u = rng0.unit_vec(3);
    const double th = rng0.uniform(0.0, 2.0 * M_PI);
    const Vec x = so4_vec(std::cos(th) * u, std::sin(th) * u);
    const Vec y = so4_vec(-std::sin(th) * u, std::cos(th) * u);
    CHECK(so4().norm(so4().bracket(x, y)) <= 1e-12);
    CHECK(std::abs(kappa(so4(), psi, x, y, t)) <= 1e-9);
  }
  // non-commuting planes have kappa(t) > 0 when kappa(0) > 0 (monotonicity)
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    Vec x = rng.unit_vec(6);
    Vec y = rng.gaussian_vec(6);
    y -= so4().inner(x, y) * x;
    y /= so4().norm(y);
    if (kappa(so4(), psi, x, y, 0.0) > 1e-6)
      for (double tt : {0.3, 1.0, 4.0}) CHECK(kappa(so4(), psi, x, y, tt) > 0.0);
  }
}

TEST_CASE("weak form of the path theorem") {
  // directions whose paths stay nonnegatively curved for some t > 0 must not
  // fail the infinitesimal test
  std::vector<Direction> dirs;
  dirs.push_back(shrink_direction(so4(), so4_diagonal(so4())));
  dirs.push_back(shrink_direction(so4(), so4_factor(so4(), 1)));
  TorusParams tp;
  tp.c = 0.4;
  tp.d = -0.2;
  tp.a1 = 0.1;
  tp.a2 = 0.3;
  tp.a3 = 0.2;
  dirs.push_back(torus_direction(tp));
  for (const auto& psi : dirs) {
    const double t = 0.05;
    const auto est = min_curvature_estimate(so4(), path_at(psi, t), 200, 40, 8);
    if (est.value >= -1e-9)
      CHECK_FALSE(infinitesimal_nonnegativity_report(so4(), psi, 300, 1e-9, 8).failed());
  }
}

TEST_CASE("bi-invariant shift identities") {
  Rng rng(9);
  const auto pairs = sample_commuting_pairs(so4(), 40, 10);
  REQUIRE_FALSE(pairs.empty());

  SECTION("M = I is trivially exact") {
    for (int i = 0; i < 10; ++i) {
      const Direction psi(rng.symmetric(6, 0.3));
      if (!domain_of(psi).contains(1.0)) continue;
      CHECK(biinvariant_shift_check(so4(), Mat::Identity(6, 6), psi, pairs[0]).passed());
    }
  }
  SECTION("factor rescaling M = diag(2,2,2,1,1,1)") {
    Mat m = diag6({2, 2, 2, 1, 1, 1});
    for (int i = 0; i < 20; ++i) {
      const Direction psi(rng.symmetric(6, 0.3));
      if (!domain_of(psi).contains(1.0)) continue;
      CHECK(biinvariant_shift_check(so4(), m, psi, pairs[i % pairs.size()]).passed());
    }
  }
  SECTION("scalar M checks the kappa identity, non-commuting pairs included") {
    for (int i = 0; i < 15; ++i) {
      const double lambda = rng.uniform(0.4, 2.5);
      const Direction psi(rng.symmetric(6, 0.3));
      if (!domain_of(psi).contains(1.0)) continue;
      const Vec x = rng.gaussian_vec(6), y = rng.gaussian_vec(6);
      for (double t : {0.0, 0.2, 0.5})
        CHECK(std::abs(biinvariant_kappa_identity_residual(so4(), lambda, psi, x, y,
                                                           t)) <= 1e-8);
    }
  }
  SECTION("non-bi-invariant M is rejected") {
    CHECK_THROWS_AS(biinvariant_shift_check(so4(), Mat(diag6({1, 2, 3, 1, 1, 1})),
                                            Direction(Mat::Zero(6, 6)), pairs[0]),
                    Error);
  }
}
