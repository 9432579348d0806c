#ifndef CURVLAB_METRICS_HPP
#define CURVLAB_METRICS_HPP

#include <cmath>
#include <limits>
#include <string>

#include "curvlab/common.hpp"

namespace curvlab {

/// Left-invariant metric h(X,Y) = h0(Phi X, Y), stored as the symmetric
/// positive-definite endomorphism Phi.
class MetricForm {
 public:
  explicit MetricForm(Mat phi) : phi_(std::move(phi)) {
    if (!is_symmetric(phi_)) throw Error("MetricForm: Phi must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(phi_);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error("MetricForm: Phi must be positive definite (min eigenvalue " +
                  std::to_string(es.eigenvalues().minCoeff()) + ")");
    eigvals_ = es.eigenvalues();
    eigvecs_ = es.eigenvectors();
    inverse_ = es.operatorInverseSqrt() * es.operatorInverseSqrt();
  }

  const Mat& phi() const { return phi_; }
  const Mat& inverse() const { return inverse_; }
  const Vec& eigenvalues() const { return eigvals_; }
  const Mat& eigenvectors() const { return eigvecs_; }
  int dim() const { return static_cast<int>(phi_.rows()); }

 private:
  Mat phi_;
  Mat inverse_;
  Vec eigvals_;
  Mat eigvecs_;
};

/// Direction Psi of an inverse-linear path Phi_t = (I - t Psi)^-1, with its
/// spectral decomposition cached.
class Direction {
 public:
  explicit Direction(Mat psi) : psi_(std::move(psi)) {
    if (!is_symmetric(psi_)) throw Error("Direction: Psi must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(psi_);
    eigvals_ = es.eigenvalues();
    eigvecs_ = es.eigenvectors();
  }

  const Mat& psi() const { return psi_; }
  const Vec& eigenvalues() const { return eigvals_; }  // ascending
  const Mat& eigenvectors() const { return eigvecs_; }
  int dim() const { return static_cast<int>(psi_.rows()); }

  double smallest_eigenvalue() const { return eigvals_(0); }

  /// h0-orthonormal basis of the smallest eigenspace p0 (eigenvalues within
  /// cluster_tol of the minimum).
  Mat smallest_eigenspace(double cluster_tol = tol::classifier) const {
    const double a0 = eigvals_(0);
    const double scale = std::max(1.0, eigvals_.cwiseAbs().maxCoeff());
    int k = 1;
    while (k < dim() && eigvals_(k) - a0 <= cluster_tol * scale) ++k;
    return eigvecs_.leftCols(k);
  }

  double operator_norm() const { return eigvals_.cwiseAbs().maxCoeff(); }

 private:
  Mat psi_;
  Vec eigvals_;
  Mat eigvecs_;
};

/// Open interval of t for which Phi_t = (I - t Psi)^-1 is a metric.
struct PathDomain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t > lower && t < upper; }
  bool finite() const { return std::isfinite(lower) && std::isfinite(upper); }
};

inline PathDomain domain_of(const Direction& psi) {
  PathDomain d;
  const double amin = psi.eigenvalues()(0);
  const double amax = psi.eigenvalues()(psi.dim() - 1);
  if (amax > 0.0) d.upper = 1.0 / amax;
  if (amin < 0.0) d.lower = 1.0 / amin;
  return d;
}

/// Phi_t = (I - t Psi)^-1. Rejects t outside the domain or within
/// tol::pole_margin of a pole, reporting the offending eigenvalue.
inline MetricForm path_at(const Direction& psi, double t) {
  const Vec& a = psi.eigenvalues();
  for (int i = 0; i < psi.dim(); ++i) {
    if (a(i) == 0.0) continue;
    const double pole = 1.0 / a(i);
    if (1.0 - t * a(i) <= 0.0 || std::abs(t - pole) <= tol::pole_margin)
      throw PathDomainError("path_at: t=" + std::to_string(t) +
                                " at or beyond pole 1/" + std::to_string(a(i)),
                            a(i));
  }
  Vec inv_evals = (1.0 - t * a.array()).inverse();
  Mat phi = psi.eigenvectors() * inv_evals.asDiagonal() * psi.eigenvectors().transpose();
  return MetricForm(0.5 * (phi + phi.transpose()));
}

/// Psi = I - Phi^-1, so that path_at(Psi, 1) reproduces Phi.
inline Direction direction_from_metric(const MetricForm& phi) {
  Mat psi = Mat::Identity(phi.dim(), phi.dim()) - phi.inverse();
  return Direction(0.5 * (psi + psi.transpose()));
}

/// Psi + a*I together with the reparametrization under which
/// c * PhiTilde(s) = Phi(t), t = s/(1 - s*a), c = 1 - s*a.
struct ShiftedDirection {
  Direction direction;
  double a;

  double t_of(double s) const { return s / (1.0 - s * a); }
  double scale_of(double s) const { return 1.0 - s * a; }
};

inline ShiftedDirection shift_direction(const Direction& psi, double a) {
  return ShiftedDirection{
      Direction(psi.psi() + a * Mat::Identity(psi.dim(), psi.dim())), a};
}

/// Canonical representative of the equivalence class {b*Psi + a*I : b > 0}:
/// smallest eigenvalue shifted to 0, then scaled to unit operator norm.
/// Multiples of the identity canonicalize to the zero map.
inline Direction canonical_direction(const Direction& psi) {
  const int n = psi.dim();
  Mat shifted = psi.psi() - psi.smallest_eigenvalue() * Mat::Identity(n, n);
  const double norm = psi.eigenvalues()(n - 1) - psi.smallest_eigenvalue();
  if (norm <= tol::structure * std::max(1.0, psi.operator_norm()))
    return Direction(Mat::Zero(n, n));
  return Direction(shifted / norm);
}

}  // namespace curvlab

#endif  // CURVLAB_METRICS_HPP
