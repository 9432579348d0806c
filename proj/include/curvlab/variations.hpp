#ifndef CURVLAB_VARIATIONS_HPP
#define CURVLAB_VARIATIONS_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/metrics.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Cheeger evolution and subalgebra shrink/enlarge families
// ---------------------------------------------------------------------------

/// A^t = A^0 (I + t A^0)^-1. For A^0 = diag(1/lambda_i) this is
/// diag(1/(lambda_i + t)).
inline Mat cheeger_evolve(const Mat& a0, double t) {
  const int n = static_cast<int>(a0.rows());
  const Mat m = Mat::Identity(n, n) + t * a0;
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw Error("cheeger_evolve: I + t*A0 is singular");
  Mat at = a0 * lu.inverse();
  return 0.5 * (at + at.transpose());
}

/// Psi = -proj_S for a subalgebra S: the direction that gradually shrinks S.
/// Full path domain is (-1, infinity).
inline Direction shrink_direction(const LieAlgebra& l, const Subspace& s) {
  if (!s.is_subalgebra)
    throw Error("shrink_direction: S is not a subalgebra (bracket closure fails)");
  Mat p = projector(l, s);
  return Direction(-0.5 * (p + p.transpose()));
}

/// Closed form for kappa along the expansion of an abelian subalgebra:
/// (1/4)|[X,Y]|^2 - (3/4)|[X,Y]^S|^2 * t/(1-t), valid for t < 1.
inline double abelian_enlarge_kappa(const LieAlgebra& l, const Subspace& s, const Vec& x,
                                    const Vec& y, double t) {
  if (!s.is_abelian) throw Error("abelian_enlarge_kappa: S is not abelian");
  if (t >= 1.0) throw Error("abelian_enlarge_kappa: t must be < 1");
  const Vec xy = l.bracket(x, y);
  const Vec xyh = project(l, s, xy);
  return 0.25 * l.inner(xy, xy) - 0.75 * l.inner(xyh, xyh) * t / (1.0 - t);
}

/// Series for expanding a (possibly non-abelian) subalgebra S, with
/// B = [X^S, Y^S]:
///   (1/4)|[X,Y]|^2 - (3/4)|[X,Y]^S|^2 t + (3/4)|B|^2 t^2 - (1/4)|B|^2 t^3
///   - (3/4)|[X^perp, Y^perp]^S|^2 * t^2/(1-t).
inline double nonabelian_enlarge_kappa(const LieAlgebra& l, const Subspace& s,
                                       const Vec& x, const Vec& y, double t) {
  if (!s.is_subalgebra) throw Error("nonabelian_enlarge_kappa: S is not a subalgebra");
  if (t >= 1.0) throw Error("nonabelian_enlarge_kappa: t must be < 1");
  const Vec xy = l.bracket(x, y);
  const Vec xyh = project(l, s, xy);
  const Vec b = l.bracket(project(l, s, x), project(l, s, y));
  const Vec perp = project(l, s, l.bracket(x - project(l, s, x), y - project(l, s, y)));
  const double b2 = l.inner(b, b);
  return 0.25 * l.inner(xy, xy) - 0.75 * l.inner(xyh, xyh) * t + 0.75 * b2 * t * t -
         0.25 * b2 * t * t * t - 0.75 * l.inner(perp, perp) * t * t / (1.0 - t);
}

/// Checks |Z|^2_{h_t} <= (4/3)|Z|^2 + tol over unit Z in the derived
/// subalgebra [g,g], for the abelian expansion Phi_t = (I - t proj_S)^-1.
/// Sample 0 is the exact extremal direction (top eigenvector of the
/// restricted quadratic form); the rest are random unit draws.
inline AnalysisReport max_abelian_expansion_check(const LieAlgebra& l, const Subspace& s,
                                                  double t, int samples,
                                                  std::uint64_t seed,
                                                  double tolerance = tol::verdict) {
  if (!s.is_abelian) throw Error("max_abelian_expansion_check: S is not abelian");
  if (t >= 1.0) throw Error("max_abelian_expansion_check: t must be < 1");
  AnalysisReport rep;
  rep.check = "max_abelian_expansion";
  rep.tolerance = tolerance;
  rep.seed = seed;
  const Subspace derived = derived_subalgebra(l);
  if (derived.k() == 0) {
    rep.verdict = Verdict::PASS;
    return rep;
  }
  Mat proj = projector(l, s);
  const MetricForm phi_t = path_at(Direction(0.5 * (proj + proj.transpose())), t);
  const Mat form = derived.basis.transpose() * l.h0() * phi_t.phi() * derived.basis;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (form + form.transpose()));
  double worst = -std::numeric_limits<double>::infinity();
  Vec worst_z;
  auto consider = [&](const Vec& z) {
    const double expansion = z.dot(l.h0() * (phi_t.phi() * z));
    if (expansion > worst) {
      worst = expansion;
      worst_z = z;
    }
    ++rep.samples_used;
  };
  consider(derived.basis * es.eigenvectors().col(derived.k() - 1));
  for (int i = 1; i < samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    consider(derived.basis * rng.unit_vec(derived.k()));
  }
  if (worst > 4.0 / 3.0 + tolerance) {
    rep.verdict = Verdict::FAIL;
    rep.witnesses.push_back({"expansion_exceeds_4_3", worst_z, Vec(), t, worst});
  } else {
    rep.verdict = Verdict::PASS;
  }
  return rep;
}

/// Estimated sup of |[X^S, Y^S]| / |[X,Y]| over pairs; +infinity as soon as a
/// commuting pair with nonvanishing projected bracket shows up.
inline double bracket_ratio_sup(const LieAlgebra& l, const Subspace& s, int samples,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Commuting-pair sampling
// ---------------------------------------------------------------------------

/// Unit, h0-orthogonal commuting pair.
struct CommutingPair {
  Vec X, Y;
  double commutator_norm = 0.0;
};

inline std::optional<CommutingPair> make_commuting_pair(const LieAlgebra& l, Vec x,
                                                        Vec y) {
  const double nx = l.norm(x);
  if (nx < tol::rank) return std::nullopt;
  x /= nx;
  y -= l.inner(x, y) * x;
  const double ny = l.norm(y);
  if (ny < tol::rank) return std::nullopt;
  y /= ny;
  const double cn = l.norm(l.bracket(x, y));
  if (cn > tol::commuting) return std::nullopt;
  return CommutingPair{std::move(x), std::move(y), cn};
}

/// Deterministic contains-commuting-pairs sampler. On so(4) the pairs
/// X = (a u, b v), Y = (-b u, a v) enumerate all commuting planes; elsewhere
/// pairs come from centralizers, with bounded resampling (so(3) yields none).
inline std::vector<CommutingPair> sample_commuting_pairs(const LieAlgebra& l, int n,
                                                         std::uint64_t seed) {
  std::vector<CommutingPair> out;
  out.reserve(n);
  const bool so4_fast = l.name() == "so4" && l.dim() == 6;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, i);
    if (so4_fast) {
      const Vec u = rng.unit_vec(3), v = rng.unit_vec(3);
      const double th = rng.uniform(0.0, 2.0 * M_PI);
      const double a = std::cos(th), b = std::sin(th);
      auto p = make_commuting_pair(l, so4_vec(a * u, b * v), so4_vec(-b * u, a * v));
      if (p) out.push_back(std::move(*p));
      continue;
    }
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Vec x = rng.unit_vec(l.dim());
      const Subspace cz = centralizer_basis(l, x);
      if (cz.k() < 2) continue;  // centralizer is a line
      auto p = make_commuting_pair(l, x, cz.basis * rng.gaussian_vec(cz.k()));
      if (p) {
        out.push_back(std::move(*p));
        break;
      }
    }
  }
  return out;
}

inline double bracket_ratio_sup(const LieAlgebra& l, const Subspace& s, int samples,
                                std::uint64_t seed) {
  double sup = 0.0;
  auto num = [&](const Vec& x, const Vec& y) {
    const Vec b = l.bracket(project(l, s, x), project(l, s, y));
    return l.norm(b);
  };
  // generic pairs estimate the sup; commuting pairs probe the failure mode
  for (int i = 0; i < samples / 2; ++i) {
    Rng rng = Rng::stream(seed, i);
    const Vec x = rng.unit_vec(l.dim()), y = rng.unit_vec(l.dim());
    const double den = l.norm(l.bracket(x, y));
    const double nu = num(x, y);
    if (den <= tol::commuting) {
      if (nu > tol::verdict) return std::numeric_limits<double>::infinity();
      continue;
    }
    sup = std::max(sup, nu / den);
  }
  for (const auto& p : sample_commuting_pairs(l, samples - samples / 2, seed + 1))
    if (num(p.X, p.Y) > tol::verdict) return std::numeric_limits<double>::infinity();
  return sup;
}

// ---------------------------------------------------------------------------
// Infinitesimal nonnegativity and the rigidity checks
// ---------------------------------------------------------------------------

/// Per-pair record for CSV export: (delta, |D|).
struct PairSample {
  double delta = 0.0;
  double d_norm = 0.0;
};

/// Definition 3.4 test over sampled commuting pairs: FAIL on delta < -tol, or
/// on |delta| <= tol with |D| above the gate; INCONCLUSIVE when the sampler
/// produced no pairs.
inline AnalysisReport infinitesimal_nonnegativity_report(
    const LieAlgebra& l, const Direction& psi, int samples, double tolerance,
    std::uint64_t seed, std::vector<PairSample>* table = nullptr,
    double d_gate = tol::d_gate) {
  AnalysisReport rep;
  rep.check = "infinitesimal_nonnegativity";
  rep.tolerance = tolerance;
  rep.seed = seed;
  const auto pairs = sample_commuting_pairs(l, samples, seed);
  rep.samples_used = static_cast<int>(pairs.size());
  if (pairs.empty()) {
    rep.verdict = Verdict::INCONCLUSIVE;
    return rep;
  }
  rep.verdict = Verdict::PASS;
  for (const auto& p : pairs) {
    const double delta = third_derivative_commuting(l, psi, p.X, p.Y);
    const auto co = kappa_coefficients(l, psi, p.X, p.Y);
    const double dn = l.norm(co.D);
    if (table) table->push_back({delta, dn});
    if (delta < -tolerance) {
      rep.verdict = Verdict::FAIL;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back({"negative_third_derivative", p.X, p.Y, 0.0, delta});
    } else if (delta <= tolerance && dn > d_gate) {
      rep.verdict = Verdict::FAIL;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back({"zero_delta_nonzero_D", p.X, p.Y, 0.0, dn});
    }
  }
  return rep;
}

/// Lemma 5.1 necessity test: for X in the smallest eigenspace p0 of Psi and
/// [X,Y] = 0, the bracket [X, Psi Y] must stay in p0.
inline AnalysisReport lemma_k_check(const LieAlgebra& l, const Direction& psi,
                                    int samples, double tolerance, std::uint64_t seed) {
  AnalysisReport rep;
  rep.check = "lemma_k";
  rep.tolerance = tolerance;
  rep.seed = seed;
  rep.verdict = Verdict::PASS;
  const Mat p0 = psi.smallest_eigenspace();
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const Vec x = p0 * rng.unit_vec(static_cast<int>(p0.cols()));
    const Subspace cz = centralizer_basis(l, x);
    const Vec y = cz.basis * rng.unit_vec(cz.k());
    const Vec v = l.bracket(x, psi.psi() * y);
    const Vec off = v - p0 * (p0.transpose() * (l.h0() * v));
    const double residual = l.norm(off);
    ++rep.samples_used;
    if (residual > tolerance) {
      rep.verdict = Verdict::FAIL;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back({"bracket_leaves_p0", x, y, 0.0, residual});
    }
  }
  return rep;
}

/// Proposition 5.2: the same closure with Phi's smallest eigenspace and
/// [X, Phi^-1 Y]. A FAIL certifies Phi is not nonnegatively curved.
inline AnalysisReport global_rigidity_check(const LieAlgebra& l, const MetricForm& phi,
                                            int samples, double tolerance,
                                            std::uint64_t seed) {
  AnalysisReport rep;
  rep.check = "global_rigidity";
  rep.tolerance = tolerance;
  rep.seed = seed;
  rep.verdict = Verdict::PASS;
  const Vec& ev = phi.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  int k = 1;
  while (k < phi.dim() && ev(k) - ev(0) <= tol::classifier * scale) ++k;
  const Mat p0 = phi.eigenvectors().leftCols(k);
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const Vec x = p0 * rng.unit_vec(k);
    const Subspace cz = centralizer_basis(l, x);
    const Vec y = cz.basis * rng.unit_vec(cz.k());
    const Vec v = l.bracket(x, phi.inverse() * y);
    const Vec off = v - p0 * (p0.transpose() * (l.h0() * v));
    const double residual = l.norm(off);
    ++rep.samples_used;
    if (residual > tolerance) {
      rep.verdict = Verdict::FAIL;
      if (rep.witnesses.size() < 8)
        rep.witnesses.push_back({"bracket_leaves_p0", x, y, 0.0, residual});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical curvature minimum over planes
// ---------------------------------------------------------------------------

struct MinCurvature {
  double value = std::numeric_limits<double>::infinity();
  Vec Z1, Z2;
};

namespace detail {

// coordinate descent on the orthonormal-pair manifold; returns refined value
inline double refine_plane(const LieAlgebra& l, const Mat& g, const Mat& phi,
                           const Mat& phi_inv, Vec& z1, Vec& z2, int steps) {
  auto value = [&](const Vec& a, const Vec& b) {
    return puttmann_curvature(l, g, phi, phi_inv, a, b);
  };
  auto renorm = [&](Vec a, Vec b) {
    a /= l.norm(a);
    b -= l.inner(a, b) * a;
    b /= l.norm(b);
    return std::pair<Vec, Vec>(std::move(a), std::move(b));
  };
  double best = value(z1, z2);
  double step = 0.25;
  for (int it = 0; it < steps && step > 1e-14; ++it) {
    bool improved = false;
    for (int k = 0; k < l.dim(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vec dir = sgn * step * l.basis(k);
        auto [a, b] = renorm(z1 + dir, z2);
        if (double v = value(a, b); v < best - 1e-16) {
          best = v;
          z1 = a;
          z2 = b;
          improved = true;
        }
        auto [b2, a2] = renorm(z2 + dir, z1);
        if (double v = value(a2, b2); v < best - 1e-16) {
          best = v;
          z1 = a2;
          z2 = b2;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace detail

/// Minimum of puttmann_curvature over sampled h0-orthonormal pairs, each
/// refined by projected coordinate descent. Commuting planes, when the
/// algebra has them, are used as additional seeds.
inline MinCurvature min_curvature_estimate(const LieAlgebra& l, const MetricForm& phi,
                                           int samples, int refine_steps,
                                           std::uint64_t seed) {
  MinCurvature best;
  const Mat& g = l.h0();
  auto consider = [&](Vec z1, Vec z2) {
    const double v = detail::refine_plane(l, g, phi.phi(), phi.inverse(), z1, z2,
                                          refine_steps);
    if (v < best.value) {
      best.value = v;
      best.Z1 = z1;
      best.Z2 = z2;
    }
  };
  const int n_comm = std::min(samples / 8 + 1, 64);
  for (const auto& p : sample_commuting_pairs(l, n_comm, seed ^ 0x5eedULL))
    consider(p.X, p.Y);
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const Vec z1 = rng.unit_vec(l.dim());
    Vec z2 = rng.gaussian_vec(l.dim());
    z2 -= l.inner(z1, z2) * z1;
    const double nz = l.norm(z2);
    if (nz < tol::rank) continue;
    consider(z1, z2 / nz);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Section-10 bi-invariant shift identities
// ---------------------------------------------------------------------------

/// True when <M . , . > is an ad-invariant (bi-invariant) inner product.
inline bool is_biinvariant_change(const LieAlgebra& l, const Mat& m,
                                  double eps = tol::verdict) {
  if (!is_symmetric(m, 1e-10)) return false;
  if (Eigen::SelfAdjointEigenSolver<Mat>(m).eigenvalues().minCoeff() <= 0.0) return false;
  return l.ad_invariance_residual(l.h0() * m) <= eps;
}

/// Residual of the scalar-M kappa identity at a single t:
///   (lambda/s)^3 kappa^{Ups,h1}_{X,Y}(t) - kappa^{Psi,h0}_{MX,MY}(lambda t / s),
/// s = 1 - (1-lambda) t. Valid for commuting and non-commuting pairs.
inline double biinvariant_kappa_identity_residual(const LieAlgebra& l, double lambda,
                                                  const Direction& psi, const Vec& x,
                                                  const Vec& y, double t) {
  const int n = l.dim();
  const MetricForm phi = path_at(psi, 1.0);
  const Mat g1 = lambda * l.h0();
  const Mat ups = Mat::Identity(n, n) - phi.inverse() * lambda;
  const double s = 1.0 - (1.0 - lambda) * t;
  const double lhs = std::pow(lambda / s, 3) * kappa(l, g1, ups, x, y, t);
  const double rhs = kappa(l, psi, lambda * x, lambda * y, lambda * t / s);
  return lhs - rhs;
}

/// Verifies D^{Ups}_{X,Y} = D^{Psi}_{MX,MY} and the matching delta identity
/// for a bi-invariant change M; for scalar M also checks the kappa identity
/// at t in {0, 0.2, 0.5}.
inline AnalysisReport biinvariant_shift_check(const LieAlgebra& l, const Mat& m,
                                              const Direction& psi,
                                              const CommutingPair& pair,
                                              double tolerance = tol::verdict) {
  if (!is_biinvariant_change(l, m))
    throw Error("biinvariant_shift_check: M is not a bi-invariant change for " + l.name());
  if (!domain_of(psi).contains(1.0))
    throw Error("biinvariant_shift_check: Psi does not reach a metric at t=1");
  AnalysisReport rep;
  rep.check = "biinvariant_shift";
  rep.tolerance = tolerance;
  rep.verdict = Verdict::PASS;
  const int n = l.dim();
  const MetricForm phi = path_at(psi, 1.0);
  const Mat g1 = l.h0() * m;
  const Mat ups = Mat::Identity(n, n) - phi.inverse() * m;
  require_g_selfadjoint(g1, ups);

  const auto co_u = kappa_coefficients(l, g1, ups, pair.X, pair.Y);
  const Vec mx = m * pair.X, my = m * pair.Y;
  const auto co_p = kappa_coefficients(l, l.h0(), psi, mx, my);
  const double d_res = (co_u.D - co_p.D).norm();
  const double delta_res = std::abs(co_u.delta - co_p.delta);
  rep.samples_used = 1;
  if (d_res > tolerance * (1.0 + co_p.D.norm())) {
    rep.verdict = Verdict::FAIL;
    rep.witnesses.push_back({"D_identity", pair.X, pair.Y, 0.0, d_res});
  }
  if (delta_res > tolerance * (1.0 + std::abs(co_p.delta))) {
    rep.verdict = Verdict::FAIL;
    rep.witnesses.push_back({"delta_identity", pair.X, pair.Y, 0.0, delta_res});
  }
  const double lambda = m(0, 0);
  if ((m - lambda * Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12) {
    for (double t : {0.0, 0.2, 0.5}) {
      const double r =
          std::abs(biinvariant_kappa_identity_residual(l, lambda, psi, pair.X, pair.Y, t));
      if (r > 1e-8) {
        rep.verdict = Verdict::FAIL;
        rep.witnesses.push_back({"kappa_identity", pair.X, pair.Y, t, r});
      }
    }
  }
  return rep;
}

}  // namespace curvlab

#endif  // CURVLAB_VARIATIONS_HPP
