#ifndef CURVLAB_CURVATURE_HPP
#define CURVLAB_CURVATURE_HPP

#include <vector>

#include "curvlab/common.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/metrics.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Unnormalized sectional curvature of a left-invariant metric, two routes:
// the four-term closed formula and an independent Levi-Civita/Koszul oracle.
// Both take the base bi-invariant inner product G explicitly; the common case
// G = h0 has convenience overloads. The metric itself is h(X,Y) = G(Phi X, Y).
// ---------------------------------------------------------------------------

inline double puttmann_curvature(const LieAlgebra& l, const Mat& g, const Mat& phi,
                                 const Mat& phi_inv, const Vec& z1, const Vec& z2) {
  auto ip = [&](const Vec& x, const Vec& y) { return x.dot(g * y); };
  const Vec b12 = l.bracket(z1, z2);
  const Vec pz1 = phi * z1, pz2 = phi * z2;
  const double t1 = 0.5 * ip(l.bracket(pz1, z2) + l.bracket(z1, pz2), b12);
  const double t2 = -0.75 * ip(phi * b12, b12);
  const Vec w = l.bracket(z1, pz2) + l.bracket(z2, pz1);
  const double t3 = 0.25 * ip(w, phi_inv * w);
  const double t4 = -ip(l.bracket(z1, pz1), phi_inv * l.bracket(z2, pz2));
  return t1 + t2 + t3 + t4;
}

inline double puttmann_curvature(const LieAlgebra& l, const MetricForm& h,
                                 const Vec& z1, const Vec& z2) {
  return puttmann_curvature(l, l.h0(), h.phi(), h.inverse(), z1, z2);
}

/// Independent oracle: Levi-Civita connection of h via the Koszul formula on
/// left-invariant fields, then <R(Z1,Z2)Z2, Z1>_h with
/// R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].
class KoszulOracle {
 public:
  KoszulOracle(const LieAlgebra& l, const Mat& g, const Mat& phi) : l_(l), h_(g * phi) {
    if (!is_symmetric(h_, 1e-10)) throw Error("KoszulOracle: G*Phi not symmetric");
    const int n = l.dim();
    Eigen::LLT<Mat> llt(0.5 * (h_ + h_.transpose()));
    if (llt.info() != Eigen::Success) throw Error("KoszulOracle: metric not SPD");
    nabla_.assign(n, std::vector<Vec>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec rhs(n);
        const Vec bij = l.bracket(l.basis(i), l.basis(j));
        for (int k = 0; k < n; ++k) {
          const Vec ek = l.basis(k);
          rhs(k) = 0.5 * (bij.dot(h_ * ek) - l.bracket(l.basis(j), ek).dot(h_ * l.basis(i)) +
                          l.bracket(ek, l.basis(i)).dot(h_ * l.basis(j)));
        }
        nabla_[i][j] = llt.solve(rhs);
      }
  }

  Vec nabla(const Vec& x, const Vec& y) const {
    Vec out = Vec::Zero(l_.dim());
    for (int i = 0; i < l_.dim(); ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < l_.dim(); ++j)
        if (y(j) != 0.0) out += x(i) * y(j) * nabla_[i][j];
    }
    return out;
  }

  Vec riemann(const Vec& x, const Vec& y, const Vec& z) const {
    return nabla(x, nabla(y, z)) - nabla(y, nabla(x, z)) - nabla(l_.bracket(x, y), z);
  }

  double sectional(const Vec& z1, const Vec& z2) const {
    return riemann(z1, z2, z2).dot(h_ * z1);
  }

 private:
  const LieAlgebra& l_;
  Mat h_;                                // matrix of h: G * Phi
  std::vector<std::vector<Vec>> nabla_;  // nabla_{e_i} e_j
};

inline double koszul_oracle(const LieAlgebra& l, const Mat& g, const Mat& phi,
                            const Vec& z1, const Vec& z2) {
  return KoszulOracle(l, g, phi).sectional(z1, z2);
}

inline double koszul_oracle(const LieAlgebra& l, const MetricForm& h, const Vec& z1,
                            const Vec& z2) {
  return koszul_oracle(l, l.h0(), h.phi(), z1, z2);
}

// ---------------------------------------------------------------------------
// kappa(t): curvature of the twisted plane {Phi_t^-1 X, Phi_t^-1 Y} with
// respect to h_t along the inverse-linear path Phi_t = (I - t Psi)^-1.
// The raw-matrix overloads accept any G-self-adjoint endomorphism (the
// bi-invariant-shift machinery needs Upsilon, which is h1- but not
// h0-self-adjoint); the Direction overloads are the common h0 case.
// ---------------------------------------------------------------------------

inline void require_g_selfadjoint(const Mat& g, const Mat& psi) {
  if (!is_symmetric(Mat(g * psi), 1e-10))
    throw Error("endomorphism is not self-adjoint for the given inner product");
}

/// Eigenvalues of a G-self-adjoint endomorphism (real by the generalized
/// symmetric eigenproblem G*Psi x = lambda G x).
inline Vec g_selfadjoint_eigenvalues(const Mat& g, const Mat& psi) {
  const Mat gp = g * psi;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(0.5 * (gp + gp.transpose())), g);
  return es.eigenvalues();
}

/// Phi_t = (I - t Psi)^-1 for a G-self-adjoint Psi, with the same domain
/// handling as path_at.
inline Mat inverse_linear_metric(const Mat& g, const Mat& psi, double t) {
  const int n = static_cast<int>(psi.rows());
  const Vec a = g_selfadjoint_eigenvalues(g, psi);
  for (int i = 0; i < n; ++i) {
    if (a(i) == 0.0) continue;
    if (1.0 - t * a(i) <= 0.0 || std::abs(t - 1.0 / a(i)) <= tol::pole_margin)
      throw PathDomainError("inverse_linear_metric: t at or beyond pole", a(i));
  }
  return Mat(Mat::Identity(n, n) - t * psi).inverse();
}

inline double kappa(const LieAlgebra& l, const Mat& g, const Mat& psi, const Vec& x,
                    const Vec& y, double t) {
  const int n = l.dim();
  const Mat phi_t = inverse_linear_metric(g, psi, t);
  const Mat phi_t_inv = Mat::Identity(n, n) - t * psi;
  return puttmann_curvature(l, g, phi_t, phi_t_inv, phi_t_inv * x, phi_t_inv * y);
}

inline double kappa(const LieAlgebra& l, const Mat& g, const Direction& psi,
                    const Vec& x, const Vec& y, double t) {
  const MetricForm phi_t = path_at(psi, t);
  return puttmann_curvature(l, g, phi_t.phi(), phi_t.inverse(), phi_t.inverse() * x,
                            phi_t.inverse() * y);
}

inline double kappa(const LieAlgebra& l, const Direction& psi, const Vec& x,
                    const Vec& y, double t) {
  return kappa(l, l.h0(), psi, x, y, t);
}

/// Coefficients of kappa(t) = alpha + beta t + gamma t^2 + delta t^3
///                            - (3/4) t^4 |D|^2_{h_t},
/// with the intermediate brackets A, B, C kept for reference.
struct CurvatureCoefficients {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
  Vec A, B, C, D;

  /// Evaluate the theorem's closed form given Phi_t (|D|^2_{h_t} = <G Phi_t D, D>).
  double closed_form_at(const Mat& g, const Mat& phi_t, double t) const {
    const double d_ht = D.dot(g * (phi_t * D));
    return alpha + beta * t + gamma * t * t + delta * t * t * t - 0.75 * t * t * t * t * d_ht;
  }

  double closed_form(const Mat& g, const Direction& psi, double t) const {
    return closed_form_at(g, path_at(psi, t).phi(), t);
  }
};

inline CurvatureCoefficients kappa_coefficients(const LieAlgebra& l, const Mat& g,
                                                const Mat& p, const Vec& x,
                                                const Vec& y) {
  auto ip = [&](const Vec& u, const Vec& v) { return u.dot(g * v); };
  const Vec px = p * x, py = p * y;
  const Vec xy = l.bracket(x, y);
  CurvatureCoefficients co;
  co.A = l.bracket(px, y) + l.bracket(x, py);
  co.B = l.bracket(px, py);
  co.C = l.bracket(px, y) + l.bracket(py, x);
  co.D = p * (p * xy) - p * co.A + co.B;
  const Vec pxy = p * xy;
  const Vec bxx = l.bracket(px, x), byy = l.bracket(py, y);
  co.alpha = 0.25 * ip(xy, xy);
  co.beta = -0.75 * ip(pxy, xy);
  co.gamma = -0.75 * ip(pxy, pxy) + 1.5 * ip(pxy, co.A) - 0.5 * ip(xy, co.B) -
             0.25 * ip(co.A, co.A) + 0.25 * ip(co.C, co.C) - ip(bxx, byy);
  co.delta = -0.75 * ip(p * (p * pxy), xy) + 1.5 * ip(p * pxy, co.A) -
             1.5 * ip(pxy, co.B) - 0.75 * ip(p * co.A, co.A) -
             0.25 * ip(p * co.C, co.C) + ip(p * bxx, byy) + ip(co.A, co.B);
  return co;
}

inline CurvatureCoefficients kappa_coefficients(const LieAlgebra& l, const Mat& g,
                                                const Direction& psi, const Vec& x,
                                                const Vec& y) {
  return kappa_coefficients(l, g, psi.psi(), x, y);
}

inline CurvatureCoefficients kappa_coefficients(const LieAlgebra& l, const Direction& psi,
                                                const Vec& x, const Vec& y) {
  return kappa_coefficients(l, l.h0(), psi.psi(), x, y);
}

/// (1/6) kappa'''(0) for a commuting pair, by the five-term formula.
inline double third_derivative_commuting(const LieAlgebra& l, const Mat& g,
                                         const Mat& p, const Vec& x, const Vec& y) {
  if (!l.commute(x, y))
    throw Error("third_derivative_commuting: X and Y do not commute");
  auto ip = [&](const Vec& u, const Vec& v) { return u.dot(g * v); };
  const Vec px = p * x, py = p * y;
  const Vec u = l.bracket(px, y);   // [Psi X, Y]
  const Vec v = l.bracket(x, py);   // [X, Psi Y]
  const Vec b = l.bracket(px, py);  // [Psi X, Psi Y]
  return ip(u + v, b) + ip(l.bracket(px, x), p * l.bracket(py, y)) - ip(v, p * v) -
         ip(v, p * u) - ip(u, p * u);
}

inline double third_derivative_commuting(const LieAlgebra& l, const Mat& g,
                                         const Direction& psi, const Vec& x,
                                         const Vec& y) {
  return third_derivative_commuting(l, g, psi.psi(), x, y);
}

inline double third_derivative_commuting(const LieAlgebra& l, const Direction& psi,
                                         const Vec& x, const Vec& y) {
  return third_derivative_commuting(l, l.h0(), psi.psi(), x, y);
}

/// kappa''(0) = |[X, Psi Y] + [Psi X, Y]|^2 for the untwisted plane {X, Y},
/// commuting X, Y. Always nonnegative.
inline double untwisted_second_derivative(const LieAlgebra& l, const Direction& psi,
                                          const Vec& x, const Vec& y) {
  if (!l.commute(x, y))
    throw Error("untwisted_second_derivative: X and Y do not commute");
  const Vec a = l.bracket(x, psi.psi() * y) + l.bracket(psi.psi() * x, y);
  return l.inner(a, a);
}

// ---------------------------------------------------------------------------
// Finite differences (Richardson-extrapolated central stencils), used as an
// independent oracle for the series coefficients.
// ---------------------------------------------------------------------------

template <typename F>
double fd_derivative(F&& f, int order, double h) {
  auto stencil = [&](double hh) {
    switch (order) {
      case 1:
        return (f(hh) - f(-hh)) / (2.0 * hh);
      case 2:
        return (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh);
      case 3:
        return (f(2.0 * hh) - 2.0 * f(hh) + 2.0 * f(-hh) - f(-2.0 * hh)) /
               (2.0 * hh * hh * hh);
      default:
        throw Error("fd_derivative: order must be 1..3");
    }
  };
  // one Richardson level, anchored at h and 2h: kills the O(h^2) error term
  return (4.0 * stencil(h) - stencil(2.0 * h)) / 3.0;
}

}  // namespace curvlab

#endif  // CURVLAB_CURVATURE_HPP
