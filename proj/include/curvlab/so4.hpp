#ifndef CURVLAB_SO4_HPP
#define CURVLAB_SO4_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/metrics.hpp"
#include "curvlab/variations.hpp"

// The SO(4) catalog (products, torus actions, S^3 actions), the classifier of
// the singular-eigenvector dichotomy, the invariant-block basis algorithm,
// and the six-tuple identity suite. Canonical basis order throughout:
// {A1, A2, A3, B1, B2, B3} with A_i spanning the first so(3) factor.

namespace curvlab {

inline void require_so4(const LieAlgebra& l) {
  if (l.dim() != 6) throw Error("operation requires so(4), got dim " +
                                std::to_string(l.dim()));
}

// ---------------------------------------------------------------------------
// Torus-action family
// ---------------------------------------------------------------------------

/// Factor scales c, d and the 2x2 block [[a1,a3],[a3,a2]] on the abelian
/// plane tau = span{A3, B1}.
struct TorusParams {
  double c = 1.0, d = 1.0;
  double a1 = 1.0, a2 = 1.0, a3 = 0.0;

  Mat block() const {
    Mat b(2, 2);
    b << a1, a3, a3, a2;
    return b;
  }

  /// diag(4c/3, 4d/3) - block; metrics need this positive semidefinite
  /// (closure of the known examples makes the bound non-strict).
  Mat constraint_matrix() const {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 4.0 * c / 3.0;
    m(1, 1) = 4.0 * d / 3.0;
    return m - block();
  }

  double constraint_margin() const {
    return Eigen::SelfAdjointEigenSolver<Mat>(constraint_matrix()).eigenvalues().minCoeff();
  }
};

inline Mat torus_pattern_matrix(const TorusParams& p) {
  Mat m = Mat::Zero(6, 6);
  m(0, 0) = m(1, 1) = p.c;
  m(4, 4) = m(5, 5) = p.d;
  m(2, 2) = p.a1;
  m(3, 3) = p.a2;
  m(2, 3) = m(3, 2) = p.a3;
  return m;
}

/// The section-7 torus-action metric. Enforces the 4/3 bound; the error
/// message names the offending eigen-direction of diag(4c/3,4d/3) - block.
inline MetricForm torus_metric(const TorusParams& p) {
  if (p.c <= 0.0 || p.d <= 0.0) throw Error("torus_metric: factor scales must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es(p.constraint_matrix());
  if (es.eigenvalues().minCoeff() < -1e-12) {
    const Vec v = es.eigenvectors().col(0);
    throw Error("torus_metric: 4/3 bound violated along tau-direction (" +
                std::to_string(v(0)) + ", " + std::to_string(v(1)) + "), margin " +
                std::to_string(es.eigenvalues().minCoeff()));
  }
  return MetricForm(torus_pattern_matrix(p));
}

/// Same matrix shape as a direction; parameters unrestricted.
inline Direction torus_direction(const TorusParams& p) {
  return Direction(torus_pattern_matrix(p));
}

// ---------------------------------------------------------------------------
// S^3-action family
// ---------------------------------------------------------------------------

/// Empirical gate for "lambda is an eigenvalue triple of a nonnegatively
/// curved metric on SO(3)": min sampled sectional curvature of diag(lambda).
inline bool so3_triple_is_nonneg(const std::array<double, 3>& lambda,
                                 double tolerance = tol::verdict) {
  for (double v : lambda)
    if (v <= 0.0) return false;
  static const LieAlgebra so3 = build_so3();
  Vec d(3);
  d << lambda[0], lambda[1], lambda[2];
  const MetricForm phi(Mat(d.asDiagonal()));
  return min_curvature_estimate(so3, phi, 80, 30, 2024).value >= -tolerance;
}

struct S3Params {
  double a = 1.0, b = 1.0;
  std::array<double, 3> lambda = {1.0, 1.0, 1.0};

  double t(int i) const { return lambda[i] / (1.0 + lambda[i]); }
};

/// Block of the S^3-action metric on V_i = span{A_i, B_i}.
inline Mat s3_block(double a, double b, double t) {
  Mat m(2, 2);
  m << a * (b + a * t), a * b * (t - 1.0), a * b * (t - 1.0), b * (a + b * t);
  return m / (a + b);
}

inline MetricForm s3_metric(const S3Params& p) {
  if (p.a <= 0.0 || p.b <= 0.0) throw Error("s3_metric: factor scales must be positive");
  if (!so3_triple_is_nonneg(p.lambda))
    throw Error("s3_metric: lambda triple is not the spectrum of a nonnegatively "
                "curved SO(3) metric");
  Mat m = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    const Mat blk = s3_block(p.a, p.b, p.t(i));
    m(i, i) = blk(0, 0);
    m(i, 3 + i) = m(3 + i, i) = blk(0, 1);
    m(3 + i, 3 + i) = blk(1, 1);
  }
  return MetricForm(m);
}

/// Psi = diag(Psi_1, Psi_2, Psi_3) over the V_i, with
/// Psi_i = [[alpha,0],[0,beta]] - (1/(2 lambda_i)) * ones.
inline Direction s3_direction(double alpha, double beta,
                              const std::array<double, 3>& lambda) {
  Mat m = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    if (lambda[i] == 0.0) throw Error("s3_direction: lambda must be nonzero");
    const double k = 0.5 / lambda[i];
    m(i, i) = alpha - k;
    m(3 + i, 3 + i) = beta - k;
    m(i, 3 + i) = m(3 + i, i) = -k;
  }
  return Direction(m);
}

/// Least-squares fit of a direction to the s3 pattern
/// (alpha - k_i on A_i, beta - k_i on B_i, -k_i coupling within each V_i).
struct GGFit {
  double alpha = 0.0, beta = 0.0;
  std::array<double, 3> lambda = {0.0, 0.0, 0.0};
  double residual = 0.0;
};

inline GGFit fit_gg_pattern(const Direction& psi) {
  const Mat& m = psi.psi();
  GGFit fit;
  std::array<double, 3> k{};
  for (int i = 0; i < 3; ++i) k[i] = -0.5 * (m(i, 3 + i) + m(3 + i, i));
  fit.alpha = ((m(0, 0) + k[0]) + (m(1, 1) + k[1]) + (m(2, 2) + k[2])) / 3.0;
  fit.beta = ((m(3, 3) + k[0]) + (m(4, 4) + k[1]) + (m(5, 5) + k[2])) / 3.0;
  Mat rebuilt = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    rebuilt(i, i) = fit.alpha - k[i];
    rebuilt(3 + i, 3 + i) = fit.beta - k[i];
    rebuilt(i, 3 + i) = rebuilt(3 + i, i) = -k[i];
    fit.lambda[i] = k[i] != 0.0 ? 0.5 / k[i] : std::numeric_limits<double>::infinity();
  }
  fit.residual = (m - rebuilt).norm();
  return fit;
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

enum class MetricKind { PRODUCT, TORUS_FORM, NO_SINGULAR_EIGENVECTOR };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::PRODUCT: return "PRODUCT";
    case MetricKind::TORUS_FORM: return "TORUS_FORM";
    default: return "NO_SINGULAR_EIGENVECTOR";
  }
}

struct ClassifierVerdict {
  MetricKind kind = MetricKind::NO_SINGULAR_EIGENVECTOR;
  Mat basis_a, basis_b;     // recovered adapted bases (3x3 each), when meaningful
  double residual = 0.0;    // deviation from the claimed canonical form
  bool has_singular_eigenvector = false;
  // TORUS_FORM metrics only: the 4/3 bound
  bool constraint_checked = false;
  bool constraint_ok = false;
  double constraint_margin = 0.0;
  TorusParams torus;  // recovered parameters for TORUS_FORM
};

namespace detail {

// deterministic orthonormal completion of a unit vector in R^3, oriented so
// that {u1, u2, w} brackets cyclically ([u1,u2] = w in so(3) = cross product)
inline std::pair<Vec, Vec> complete_frame(const Vec& w) {
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(w(i)) < std::abs(w(least))) least = i;
  Vec e = Vec::Zero(3);
  e(least) = 1.0;
  Vec u1 = e - e.dot(w) * w;
  u1 /= u1.norm();
  Vec u2(3);  // u2 = w x u1
  u2 << w(1) * u1(2) - w(2) * u1(1), w(2) * u1(0) - w(0) * u1(2),
      w(0) * u1(1) - w(1) * u1(0);
  return {u1, u2};
}

// true when some eigenspace of Psi contains a vector supported in one factor
inline bool eigenspace_has_singular_vector(const Direction& psi, double eps) {
  const Vec& ev = psi.eigenvalues();
  const double scale = std::max(1.0, psi.operator_norm());
  int i = 0;
  while (i < 6) {
    int j = i + 1;
    while (j < 6 && ev(j) - ev(i) <= eps * scale) ++j;
    const Mat v = psi.eigenvectors().middleCols(i, j - i);
    for (int half = 0; half < 2; ++half) {
      const Mat part = half == 0 ? v.topRows(3) : v.bottomRows(3);
      Eigen::JacobiSVD<Mat> svd(part);
      const double smin =
          v.cols() > 3 ? 0.0 : svd.singularValues().minCoeff();
      if (smin <= eps) return true;
    }
    i = j;
  }
  return false;
}

}  // namespace detail

/// Theorem 8.1 dichotomy, operationally: PRODUCT when Psi maps g1 into g1;
/// TORUS_FORM when the cross-factor part has rank one and the adapted basis
/// puts Psi into the torus pattern; NO_SINGULAR_EIGENVECTOR otherwise.
inline ClassifierVerdict classify_direction(const LieAlgebra& l, const Direction& psi,
                                            double tolerance = tol::classifier) {
  require_so4(l);
  ClassifierVerdict out;
  out.has_singular_eigenvector = detail::eigenspace_has_singular_vector(psi, tolerance);
  const Mat t = psi.psi().bottomLeftCorner(3, 3);  // g1 -> g2 mixing
  const double scale = std::max(1.0, psi.operator_norm());
  Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  if (sv(0) <= tolerance * scale) {
    out.kind = MetricKind::PRODUCT;
    out.residual = sv(0);
    out.basis_a = out.basis_b = Mat::Identity(3, 3);
    return out;
  }
  if (sv(1) <= tolerance * scale) {
    // candidate torus form: tau axes from the rank-one mixing
    const Vec a3 = svd.matrixV().col(0);
    const Vec b1 = svd.matrixU().col(0);
    auto [a1, a2] = detail::complete_frame(a3);
    auto [b2, b3] = detail::complete_frame(b1);
    Mat r = Mat::Zero(6, 6);
    r.block(0, 0, 3, 1) = a1;
    r.block(0, 1, 3, 1) = a2;
    r.block(0, 2, 3, 1) = a3;
    r.block(3, 3, 3, 1) = b1;
    r.block(3, 4, 3, 1) = b2;
    r.block(3, 5, 3, 1) = b3;
    const Mat adapted = r.transpose() * psi.psi() * r;
    TorusParams p;
    p.c = 0.5 * (adapted(0, 0) + adapted(1, 1));
    p.d = 0.5 * (adapted(4, 4) + adapted(5, 5));
    p.a1 = adapted(2, 2);
    p.a2 = adapted(3, 3);
    p.a3 = 0.5 * (adapted(2, 3) + adapted(3, 2));
    const double res = (adapted - torus_pattern_matrix(p)).norm();
    if (res <= tolerance * scale) {
      out.kind = MetricKind::TORUS_FORM;
      out.residual = res;
      out.basis_a = r.topLeftCorner(3, 3);
      out.basis_b = r.bottomRightCorner(3, 3);
      out.torus = p;
      return out;
    }
    out.residual = res;
  }
  out.kind = MetricKind::NO_SINGULAR_EIGENVECTOR;
  return out;
}

/// classify_direction applied to I - Phi^-1; for TORUS_FORM also evaluates
/// the 4/3 constraint with c, d read off Phi itself in the recovered basis.
inline ClassifierVerdict classify_metric(const LieAlgebra& l, const MetricForm& phi,
                                         double tolerance = tol::classifier) {
  ClassifierVerdict out = classify_direction(l, direction_from_metric(phi), tolerance);
  if (out.kind == MetricKind::TORUS_FORM) {
    Mat r = Mat::Zero(6, 6);
    r.topLeftCorner(3, 3) = out.basis_a;
    r.bottomRightCorner(3, 3) = out.basis_b;
    const Mat adapted = r.transpose() * phi.phi() * r;
    TorusParams p;
    p.c = 0.5 * (adapted(0, 0) + adapted(1, 1));
    p.d = 0.5 * (adapted(4, 4) + adapted(5, 5));
    p.a1 = adapted(2, 2);
    p.a2 = adapted(3, 3);
    p.a3 = 0.5 * (adapted(2, 3) + adapted(3, 2));
    out.torus = p;
    out.constraint_checked = true;
    out.constraint_margin = p.constraint_margin();
    out.constraint_ok = out.constraint_margin >= -tolerance;
  }
  return out;
}

/// The section-9 proof plane family for a torus-form metric: the exact
/// minimizer of k_h(alpha A1 + beta B2, A2 + B3) over (alpha, beta), with the
/// vectors mapped back through the adapted basis and normalized.
struct ProofPlaneWitness {
  Vec Z1, Z2;
  double value = 0.0;
};

inline ProofPlaneWitness torus_proof_plane_witness(const LieAlgebra& l,
                                                   const MetricForm& phi,
                                                   const ClassifierVerdict& v) {
  require_so4(l);
  if (v.kind != MetricKind::TORUS_FORM)
    throw Error("torus_proof_plane_witness: metric is not in torus form");
  Eigen::SelfAdjointEigenSolver<Mat> es(v.torus.constraint_matrix());
  const Vec z = es.eigenvectors().col(0);  // most negative direction
  const double alpha = z(0), beta = z(1);
  Mat r = Mat::Zero(6, 6);
  r.topLeftCorner(3, 3) = v.basis_a;
  r.bottomRightCorner(3, 3) = v.basis_b;
  Vec z1 = Vec::Zero(6), z2 = Vec::Zero(6);
  z1(0) = alpha;
  z1(4) = beta;
  z2(1) = 1.0;
  z2(5) = 1.0;
  ProofPlaneWitness w;
  w.Z1 = r * z1;
  w.Z2 = r * z2;
  w.Z1 /= l.norm(w.Z1);
  w.Z2 -= l.inner(w.Z1, w.Z2) * w.Z1;
  w.Z2 /= l.norm(w.Z2);
  w.value = puttmann_curvature(l, phi, w.Z1, w.Z2);
  return w;
}

// ---------------------------------------------------------------------------
// Invariant abelian planes and the Theorem 8.2 basis algorithm
// ---------------------------------------------------------------------------

/// Every 2-dimensional abelian subalgebra of so(4) is span{(u,0),(0,v)};
/// grid search + coordinate refinement over the two unit spheres for a plane
/// with Psi-invariance residual below tol.
inline std::optional<Subspace> find_invariant_abelian_plane(const LieAlgebra& l,
                                                            const Direction& psi,
                                                            int grid = 24,
                                                            double tolerance = tol::classifier) {
  require_so4(l);
  auto residual = [&](const Vec& u, const Vec& v) {
    // ||(I - P) Psi P||_F over the plane span{(u,0),(0,v)}
    const Vec c1 = so4_vec(u, Vec::Zero(3));
    const Vec c2 = so4_vec(Vec::Zero(3), v);
    auto off = [&](const Vec& w) {
      const Vec pw = psi.psi() * w;
      const Vec proj = c1.dot(pw) * c1 + c2.dot(pw) * c2;
      return (pw - proj).squaredNorm();
    };
    return std::sqrt(off(c1) + off(c2));
  };
  // Fibonacci sphere points
  auto sphere_point = [](int i, int n) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double y = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double th = golden * i;
    Vec v(3);
    v << r * std::cos(th), y, r * std::sin(th);
    return v;
  };
  struct Candidate {
    double res;
    Vec u, v;
  };
  std::vector<Candidate> top;
  auto push = [&](Candidate c) {
    top.push_back(std::move(c));
    std::sort(top.begin(), top.end(),
              [](const Candidate& a, const Candidate& b) { return a.res < b.res; });
    if (top.size() > 6) top.pop_back();
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      Candidate c{0.0, sphere_point(i, grid), sphere_point(j, grid)};
      c.res = residual(c.u, c.v);
      push(std::move(c));
    }
  // refine the best few by projected coordinate descent
  for (auto& c : top) {
    double step = 0.5;
    while (step > 1e-12 && c.res > 1e-14) {
      bool improved = false;
      for (int k = 0; k < 3; ++k)
        for (double sgn : {1.0, -1.0}) {
          Vec u2 = c.u + sgn * step * Vec::Unit(3, k);
          u2 /= u2.norm();
          if (double r2 = residual(u2, c.v); r2 < c.res) {
            c.res = r2;
            c.u = u2;
            improved = true;
          }
          Vec v2 = c.v + sgn * step * Vec::Unit(3, k);
          v2 /= v2.norm();
          if (double r2 = residual(c.u, v2); r2 < c.res) {
            c.res = r2;
            c.v = v2;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    if (c.res <= tolerance) {
      Mat b(6, 2);
      b.col(0) = so4_vec(c.u, Vec::Zero(3));
      b.col(1) = so4_vec(Vec::Zero(3), c.v);
      return make_subspace(l, b);
    }
  }
  return std::nullopt;
}

/// Output of the Theorem 8.2 algorithm: adapted factor bases and Psi in the
/// ordering {A1,B1,A2,B2,A3,B3}, with the off-pattern residual.
struct BlockBasis {
  Mat basis_a, basis_b;  // 3x3, columns A1..A3 / B1..B3
  Mat psi_in_basis;      // 6x6, ordering {A1,B1,A2,B2,A3,B3}
  double residual = 0.0;
  bool kernel_branch = false;
};

inline double th2_off_pattern_residual(const Mat& m) {
  // allowed: 2x2 blocks on {0,1},{2,3},{4,5}, plus (2,4) and (3,5) couplings
  double s = 0.0;
  auto add = [&](int i, int j) { s += m(i, j) * m(i, j) + m(j, i) * m(j, i); };
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 6; ++j) add(i, j);
  add(2, 5);  // A2-B3
  add(3, 4);  // B2-A3
  return std::sqrt(s);
}

/// Builds the Theorem 8.2 adapted basis from a Psi-invariant abelian plane
/// span{A1, B1}: bisection for the F-zero A2 on the circle of V1, images
/// under T1 for B2, B3 (or the kernel branch when T1 is singular).
inline BlockBasis canonical_block_basis(const LieAlgebra& l, const Direction& psi,
                                        double tolerance = tol::classifier,
                                        std::optional<Subspace> plane = std::nullopt,
                                        int grid = 32) {
  require_so4(l);
  if (!plane) plane = find_invariant_abelian_plane(l, psi, grid, tolerance);
  if (!plane) throw Error("canonical_block_basis: no Psi-invariant abelian plane found");
  // extract the factor axes: the plane must be span{(u,0),(0,v)}
  Eigen::JacobiSVD<Mat> axis_a(Mat(plane->basis.topRows(3)), Eigen::ComputeFullU);
  Eigen::JacobiSVD<Mat> axis_b(Mat(plane->basis.bottomRows(3)), Eigen::ComputeFullU);
  const Vec a1 = axis_a.matrixU().col(0);
  const Vec b1 = axis_b.matrixU().col(0);
  {
    Mat canon(6, 2);
    canon.col(0) = so4_vec(a1, Vec::Zero(3));
    canon.col(1) = so4_vec(Vec::Zero(3), b1);
    const Mat diff = plane->basis * plane->basis.transpose() - canon * canon.transpose();
    if (diff.cwiseAbs().maxCoeff() > 1e-8)
      throw Error("canonical_block_basis: plane is not of the form span{(u,0),(0,v)}");
  }
  auto [e1, e2] = detail::complete_frame(a1);  // basis of V1 = a1-perp in g1
  auto [f1, f2] = detail::complete_frame(b1);  // basis of V2

  // T1 = pi_2 . Psi|V1 as a 2x2 matrix {e1,e2} -> {f1,f2}
  Mat t1(2, 2);
  {
    const Mat& p = psi.psi();
    const Vec pe1 = p * so4_vec(e1, Vec::Zero(3));
    const Vec pe2 = p * so4_vec(e2, Vec::Zero(3));
    t1 << f1.dot(pe1.tail(3)), f1.dot(pe2.tail(3)), f2.dot(pe1.tail(3)),
        f2.dot(pe2.tail(3));
  }
  auto circle = [&](double th) { return Vec(std::cos(th) * e1 + std::sin(th) * e2); };
  auto f_of = [&](double th) {
    const Eigen::Vector2d ca(std::cos(th), std::sin(th));
    const Eigen::Vector2d cb(-std::sin(th), std::cos(th));  // coords of R(A)
    return (t1 * ca).dot(t1 * cb);
  };

  BlockBasis out;
  Eigen::JacobiSVD<Mat> svd(t1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec a2(3), a3(3), b2(3), b3(3);
  if (svd.singularValues()(0) < tol::rank) {
    // T1 vanishes (product direction): any orthonormal bases work, so take
    // eigenbases of the factor blocks, which also kills the lambda, mu couplings
    out.kernel_branch = true;
    const Mat& p = psi.psi();
    Mat m1(2, 2), m2(2, 2);
    const Vec pe1 = p * so4_vec(e1, Vec::Zero(3)), pe2 = p * so4_vec(e2, Vec::Zero(3));
    m1 << e1.dot(pe1.head(3)), e1.dot(pe2.head(3)), e2.dot(pe1.head(3)),
        e2.dot(pe2.head(3));
    const Vec pf1 = p * so4_vec(Vec::Zero(3), f1), pf2 = p * so4_vec(Vec::Zero(3), f2);
    m2 << f1.dot(pf1.tail(3)), f1.dot(pf2.tail(3)), f2.dot(pf1.tail(3)),
        f2.dot(pf2.tail(3));
    Eigen::SelfAdjointEigenSolver<Mat> e_a(Mat(0.5 * (m1 + m1.transpose())));
    Eigen::SelfAdjointEigenSolver<Mat> e_b(Mat(0.5 * (m2 + m2.transpose())));
    const Mat va = e_a.eigenvectors(), vb = e_b.eigenvectors();
    a2 = va(0, 0) * e1 + va(1, 0) * e2;
    a3 = va(0, 1) * e1 + va(1, 1) * e2;
    b2 = vb(0, 0) * f1 + vb(1, 0) * f2;
    b3 = vb(0, 1) * f1 + vb(1, 1) * f2;
  } else if (svd.singularValues()(1) <
             tol::rank * std::max(1.0, svd.singularValues()(0))) {
    // rank-one T1: A2 spans ker T1, B2 spans ker T2 = ker T1^T
    out.kernel_branch = true;
    const Vec ka = svd.matrixV().col(1);
    const Vec kb = svd.matrixU().col(1);
    a2 = ka(0) * e1 + ka(1) * e2;
    a3 = -ka(1) * e1 + ka(0) * e2;
    b2 = kb(0) * f1 + kb(1) * f2;
    b3 = -kb(1) * f1 + kb(0) * f2;
  } else {
    // F flips sign under a 90-degree rotation, so a zero exists in [0, pi/2]
    double lo = 0.0, hi = M_PI / 2.0;
    double flo = f_of(lo);
    if (std::abs(flo) < 1e-300) {
      hi = lo;
    } else {
      if (flo * f_of(hi) > 0.0)
        throw Error("canonical_block_basis: no sign change for F (unexpected)");
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (flo * f_of(mid) <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = f_of(lo);
        }
      }
    }
    const double th = 0.5 * (lo + hi);
    a2 = circle(th);
    a3 = circle(th + M_PI / 2.0);
    const Eigen::Vector2d ca(std::cos(th), std::sin(th));
    const Eigen::Vector2d cb(-std::sin(th), std::cos(th));
    Eigen::Vector2d ia = t1 * ca, ib = t1 * cb;
    ia /= ia.norm();
    ib /= ib.norm();
    b2 = ia(0) * f1 + ia(1) * f2;
    b3 = ib(0) * f1 + ib(1) * f2;
  }
  out.basis_a = Mat(3, 3);
  out.basis_a << a1, a2, a3;
  out.basis_b = Mat(3, 3);
  out.basis_b << b1, b2, b3;
  // assemble in the ordering {A1,B1,A2,B2,A3,B3}
  Mat r = Mat::Zero(6, 6);
  r.block(0, 0, 3, 1) = a1;
  r.block(3, 1, 3, 1) = b1;
  r.block(0, 2, 3, 1) = a2;
  r.block(3, 3, 3, 1) = b2;
  r.block(0, 4, 3, 1) = a3;
  r.block(3, 5, 3, 1) = b3;
  out.psi_in_basis = r.transpose() * psi.psi() * r;
  out.residual = th2_off_pattern_residual(out.psi_in_basis);
  return out;
}

// ---------------------------------------------------------------------------
// Six-tuple identity suite (proof of Theorem 8.1)
// ---------------------------------------------------------------------------

/// The 11 parameters of the Theorem 8.2 pattern.
struct Th2Params {
  double a1 = 0, a2 = 0, a3 = 0;
  double b1 = 0, b2 = 0, b3 = 0;
  double c1 = 0, c2 = 0, c3 = 0;
  double lam = 0, mu = 0;
};

inline Direction th2_direction(const Th2Params& p) {
  Mat m = Mat::Zero(6, 6);
  m(0, 0) = p.a1;
  m(0, 3) = m(3, 0) = p.a3;
  m(3, 3) = p.a2;
  m(1, 1) = p.b1;
  m(1, 4) = m(4, 1) = p.b3;
  m(4, 4) = p.b2;
  m(2, 2) = p.c1;
  m(2, 5) = m(5, 2) = p.c3;
  m(5, 5) = p.c2;
  m(1, 2) = m(2, 1) = p.lam;
  m(4, 5) = m(5, 4) = p.mu;
  return Direction(m);
}

/// (1/6) kappa'''(0) for the commuting pair X = sum alpha_i A_i,
/// Y = sum beta_i B_i under the Theorem 8.2 pattern.
inline double six_tuple(const LieAlgebra& l, const Th2Params& p,
                        const std::array<double, 3>& alphas,
                        const std::array<double, 3>& betas) {
  require_so4(l);
  Vec x = Vec::Zero(6), y = Vec::Zero(6);
  for (int i = 0; i < 3; ++i) {
    x(i) = alphas[i];
    y(3 + i) = betas[i];
  }
  return third_derivative_commuting(l, th2_direction(p), x, y);
}

/// Relabeling (A1,A2,A3) -> (-A1,A3,A2) on both factors: swaps the b- and
/// c-blocks while preserving the bracket convention, mapping the c3 = 0
/// branch onto the b3 = 0 branch.
inline Th2Params swap23(const Th2Params& p) {
  Th2Params q = p;
  q.b1 = p.c1;
  q.b2 = p.c2;
  q.b3 = p.c3;
  q.c1 = p.b1;
  q.c2 = p.b2;
  q.c3 = p.b3;
  return q;
}

inline Mat swap23_conjugation() {
  Mat r3 = Mat::Zero(3, 3);
  r3(0, 0) = -1.0;
  r3(2, 1) = 1.0;
  r3(1, 2) = 1.0;
  Mat r = Mat::Zero(6, 6);
  r.topLeftCorner(3, 3) = r3;
  r.bottomRightCorner(3, 3) = r3;
  return r;
}

/// Verifies every identity used in the proof of the singular-eigenvector
/// dichotomy against numeric (1/6) kappa'''(0), on both the b3 = 0 and the
/// (relabeled) c3 = 0 branch, over random parameter draws. The rhs_offset is
/// a sensitivity control: any nonzero value must break the suite.
inline AnalysisReport verify_th1_identities(const LieAlgebra& l, int draws,
                                            std::uint64_t seed,
                                            double rhs_offset = 0.0) {
  require_so4(l);
  AnalysisReport rep;
  rep.check = "th1_identities";
  rep.tolerance = 1e-8;
  rep.seed = seed;
  rep.verdict = Verdict::PASS;
  auto record_fail = [&](const std::string& name, double diff) {
    rep.verdict = Verdict::FAIL;
    if (rep.witnesses.size() < 16)
      rep.witnesses.push_back({name, Vec(), Vec(), 0.0, diff});
  };
  auto check = [&](const std::string& name, double lhs, double rhs) {
    const double diff = std::abs(lhs - (rhs + rhs_offset));
    if (diff > rep.tolerance * (1.0 + std::abs(rhs))) record_fail(name, diff);
  };
  auto run_branch = [&](const Th2Params& p, const std::string& tag) {
    auto s = [&](std::array<double, 3> a, std::array<double, 3> b) {
      return six_tuple(l, p, a, b);
    };
    const double a3s = p.a3 * p.a3, c3s = p.c3 * p.c3;
    check(tag + "[0,+1,1|1,0,0]", s({0, 1, 1}, {1, 0, 0}),
          c3s * (p.a2 - p.b2) + 4.0 * a3s * p.lam);
    check(tag + "[0,-1,1|1,0,0]", s({0, -1, 1}, {1, 0, 0}),
          c3s * (p.a2 - p.b2) - 4.0 * a3s * p.lam);
    check(tag + "[0,0,1|0,1,0]+[0,0,1|0,0,1]",
          s({0, 0, 1}, {0, 1, 0}) + s({0, 0, 1}, {0, 0, 1}), c3s * (p.b2 - p.a2));
    check(tag + "[1,0,0|0,+1,1]", s({1, 0, 0}, {0, 1, 1}),
          c3s * (p.a1 - p.b1) + 4.0 * a3s * p.mu);
    check(tag + "[1,0,0|0,-1,1]", s({1, 0, 0}, {0, -1, 1}),
          c3s * (p.a1 - p.b1) - 4.0 * a3s * p.mu);
    // the printed companion sum has its sign flipped in the paper; both the
    // corrected sum and the mirror tuple that the argument needs are checked
    check(tag + "[1,0,0|0,1,0]+[1,0,0|0,0,1]",
          s({1, 0, 0}, {0, 1, 0}) + s({1, 0, 0}, {0, 0, 1}), c3s * (p.a1 - p.b1));
    check(tag + "[0,1,0|0,0,1]+[0,0,1|0,0,1]",
          s({0, 1, 0}, {0, 0, 1}) + s({0, 0, 1}, {0, 0, 1}), c3s * (p.b1 - p.a1));
    check(tag + "[0,1,0|1,0,0]", s({0, 1, 0}, {1, 0, 0}), a3s * (p.b1 - p.c1));
    check(tag + "[0,0,1|1,0,0]", s({0, 0, 1}, {1, 0, 0}),
          a3s * (p.c1 - p.b1) + c3s * (p.a2 - p.b2));
    check(tag + "[1,0,0|0,1,0]", s({1, 0, 0}, {0, 1, 0}), a3s * (p.b2 - p.c2));
    check(tag + "[1,0,0|0,0,1]", s({1, 0, 0}, {0, 0, 1}),
          c3s * (p.a1 - p.b1) + a3s * (p.c2 - p.b2));
  };
  for (int i = 0; i < draws; ++i) {
    Rng rng = Rng::stream(seed, i);
    Th2Params p;
    p.a1 = rng.normal();
    p.a2 = rng.normal();
    p.a3 = rng.normal();
    p.b1 = rng.normal();
    p.b2 = rng.normal();
    p.c1 = rng.normal();
    p.c2 = rng.normal();
    p.c3 = rng.normal();
    p.lam = rng.normal();
    p.mu = rng.normal();
    p.b3 = 0.0;
    run_branch(p, "b3=0:");

    // c3 = 0 branch: relabel and re-run; also verify the relabeling itself
    Th2Params q = p;
    q.b3 = rng.normal();
    q.c3 = 0.0;
    const Mat r = swap23_conjugation();
    const double conj_res =
        (r.transpose() * th2_direction(q).psi() * r - th2_direction(swap23(q)).psi())
            .cwiseAbs()
            .maxCoeff();
    if (conj_res > 1e-12) record_fail("c3=0:branch_relabel", conj_res);
    run_branch(swap23(q), "c3=0:");

    // final stage: b3 = lam = mu = 0, a-, b-, c-diagonals equal
    Th2Params f;
    f.a1 = f.b1 = f.c1 = rng.normal();
    f.a2 = f.b2 = f.c2 = rng.normal();
    f.a3 = rng.normal();
    f.c3 = rng.normal();
    auto sf = [&](std::array<double, 3> a, std::array<double, 3> b) {
      return six_tuple(l, f, a, b);
    };
    const double ac = f.a3 * f.c3;
    check("final:[1,1,1|1,1,1]", sf({1, 1, 1}, {1, 1, 1}), ac * (f.a3 + f.c3));
    check("final:[1,1,1|-1,1,1]", sf({1, 1, 1}, {-1, 1, 1}), -ac * (f.a3 - f.c3));
    check("final:[1,1,1|1,-1,1]", sf({1, 1, 1}, {1, -1, 1}), -ac * (f.a3 + f.c3));
    check("final:[1,1,1|1,1,-1]", sf({1, 1, 1}, {1, 1, -1}), ac * (f.a3 - f.c3));
    ++rep.samples_used;
  }
  return rep;
}

}  // namespace curvlab

#endif  // CURVLAB_SO4_HPP
