#ifndef CURVLAB_LIE_ALGEBRA_HPP
#define CURVLAB_LIE_ALGEBRA_HPP

#include <string>
#include <utility>
#include <vector>

#include "curvlab/common.hpp"

namespace curvlab {

/// Finite-dimensional real Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c(i,j,k) e_k, together with a fixed ad-invariant inner
/// product h0 (the identity matrix in the canonical basis for the built-ins).
class LieAlgebra {
 public:
  LieAlgebra(std::string name, std::vector<Mat> ad_basis, Mat h0)
      : name_(std::move(name)), ad_basis_(std::move(ad_basis)), h0_(std::move(h0)) {
    dim_ = static_cast<int>(ad_basis_.size());
    validate();
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Mat& h0() const { return h0_; }

  /// Structure constant c(i,j,k): the e_k coefficient of [e_i, e_j].
  double c(int i, int j, int k) const { return ad_basis_[i](k, j); }

  /// Matrix of ad_X, i.e. ad(X) * Y = [X, Y].
  Mat ad(const Vec& x) const {
    Mat m = Mat::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) m += x(i) * ad_basis_[i];
    return m;
  }

  Vec bracket(const Vec& x, const Vec& y) const {
    if (x.size() != dim_ || y.size() != dim_)
      throw Error("bracket: vector dimension does not match algebra " + name_);
    Vec out = Vec::Zero(dim_);
    for (int i = 0; i < dim_; ++i)
      if (x(i) != 0.0) out += x(i) * (ad_basis_[i] * y);
    return out;
  }

  double inner(const Vec& x, const Vec& y) const { return x.dot(h0_ * y); }
  double norm(const Vec& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

  bool commute(const Vec& x, const Vec& y) const {
    return norm(bracket(x, y)) <= tol::commuting * norm(x) * norm(y);
  }

  /// Max |c(i,j,k) + c(j,i,k)| over all triples.
  double antisymmetry_residual() const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i)
      r = std::max(r, (ad_basis_[i] + transposed_slot(i)).cwiseAbs().maxCoeff());
    return r;
  }

  /// Max componentwise Jacobi residual over basis triples.
  double jacobi_residual() const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          const Vec v = bracket(bracket(basis(i), basis(j)), basis(k)) +
                        bracket(bracket(basis(j), basis(k)), basis(i)) +
                        bracket(bracket(basis(k), basis(i)), basis(j));
          r = std::max(r, v.cwiseAbs().maxCoeff());
        }
    return r;
  }

  /// Max |<[X,Y],Z> + <Y,[X,Z]>| over basis triples, for a candidate inner
  /// product G (defaults to h0). Zero means G is bi-invariant.
  double ad_invariance_residual() const { return ad_invariance_residual(h0_); }
  double ad_invariance_residual(const Mat& g) const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const Mat adi = ad_basis_[i];
      r = std::max(r, (adi.transpose() * g + g * adi).cwiseAbs().maxCoeff());
    }
    return r;
  }

  Vec basis(int i) const {
    Vec v = Vec::Zero(dim_);
    v(i) = 1.0;
    return v;
  }

 private:
  void validate() const {
    if (dim_ <= 0) throw Error("LieAlgebra: empty structure");
    for (const Mat& m : ad_basis_)
      if (m.rows() != dim_ || m.cols() != dim_)
        throw Error("LieAlgebra: ragged structure constants");
    if (h0_.rows() != dim_ || h0_.cols() != dim_ || !is_symmetric(h0_))
      throw Error("LieAlgebra: h0 must be symmetric dim x dim");
    if (Eigen::SelfAdjointEigenSolver<Mat>(h0_).eigenvalues().minCoeff() <= 0.0)
      throw Error("LieAlgebra: h0 must be positive definite");
    if (antisymmetry_residual() > tol::structure)
      throw Error("LieAlgebra " + name_ + ": bracket not antisymmetric");
    if (jacobi_residual() > tol::structure)
      throw Error("LieAlgebra " + name_ + ": Jacobi identity fails");
    if (ad_invariance_residual() > tol::structure)
      throw Error("LieAlgebra " + name_ + ": h0 not ad-invariant");
  }

  // matrix with (k,j) entry c(j,i,k); used for the antisymmetry check
  Mat transposed_slot(int i) const {
    Mat m = Mat::Zero(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) m(k, j) = ad_basis_[j](k, i);
    return m;
  }

  std::string name_;
  int dim_ = 0;
  std::vector<Mat> ad_basis_;
  Mat h0_;
};

/// so(3) with the cyclic convention [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
/// and h0 = identity.
inline LieAlgebra build_so3() {
  std::vector<Mat> ad(3, Mat::Zero(3, 3));
  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& t : cyc) {
    ad[t[0]](t[2], t[1]) = 1.0;
    ad[t[1]](t[2], t[0]) = -1.0;
  }
  return LieAlgebra("so3", std::move(ad), Mat::Identity(3, 3));
}

/// Direct sum: block structure constants, cross-factor brackets zero,
/// h0 block-diagonal.
inline LieAlgebra direct_sum(const LieAlgebra& l1, const LieAlgebra& l2,
                             const std::string& name = "") {
  const int n1 = l1.dim(), n2 = l2.dim(), n = n1 + n2;
  std::vector<Mat> ad(n, Mat::Zero(n, n));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n1; ++k) ad[i](k, j) = l1.c(i, j, k);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n2; ++k) ad[n1 + i](n1 + k, n1 + j) = l2.c(i, j, k);
  Mat h0 = Mat::Zero(n, n);
  h0.topLeftCorner(n1, n1) = l1.h0();
  h0.bottomRightCorner(n2, n2) = l2.h0();
  std::string nm = name.empty() ? l1.name() + "+" + l2.name() : name;
  return LieAlgebra(std::move(nm), std::move(ad), std::move(h0));
}

/// so(4) = so(3) + so(3) with equal scale on both factors.
inline LieAlgebra build_so4() {
  const LieAlgebra f = build_so3();
  return direct_sum(f, f, "so4");
}

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

/// Subspace with an h0-orthonormal basis (columns) and cached structural flags.
struct Subspace {
  Mat basis;  // dim x k, h0-orthonormal columns
  bool is_subalgebra = false;
  bool is_abelian = false;
  bool is_ideal = false;

  int k() const { return static_cast<int>(basis.cols()); }
};

/// h0-Gram-Schmidt; near-dependent columns are dropped (relative rank threshold).
inline Mat orthonormalize(const LieAlgebra& l, const Mat& vectors) {
  const int n = l.dim();
  Mat out(n, vectors.cols());
  int k = 0;
  double scale = std::max(1.0, vectors.cwiseAbs().maxCoeff());
  for (int j = 0; j < vectors.cols(); ++j) {
    Vec v = vectors.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < k; ++i) v -= l.inner(out.col(i), v) * out.col(i);
    const double nv = l.norm(v);
    if (nv > tol::rank * scale) out.col(k++) = v / nv;
  }
  return out.leftCols(k);
}

inline Subspace make_subspace(const LieAlgebra& l, const Mat& vectors) {
  Subspace s;
  s.basis = orthonormalize(l, vectors);
  const int k = s.k();
  // flags from structure constants
  auto in_span_residual = [&](const Vec& v) {
    Vec r = v;
    for (int i = 0; i < k; ++i) r -= l.inner(s.basis.col(i), v) * s.basis.col(i);
    return l.norm(r);
  };
  s.is_subalgebra = true;
  s.is_abelian = true;
  for (int i = 0; i < k && (s.is_subalgebra || s.is_abelian); ++i)
    for (int j = i + 1; j < k; ++j) {
      const Vec b = l.bracket(s.basis.col(i), s.basis.col(j));
      if (l.norm(b) > tol::commuting) s.is_abelian = false;
      if (in_span_residual(b) > tol::commuting) s.is_subalgebra = false;
    }
  if (s.is_abelian) s.is_subalgebra = true;
  s.is_ideal = s.is_subalgebra;
  for (int e = 0; e < l.dim() && s.is_ideal; ++e)
    for (int j = 0; j < k; ++j)
      if (in_span_residual(l.bracket(l.basis(e), s.basis.col(j))) > tol::commuting) {
        s.is_ideal = false;
        break;
      }
  return s;
}

/// h0-orthogonal projection onto S.
inline Vec project(const LieAlgebra& l, const Subspace& s, const Vec& x) {
  Vec out = Vec::Zero(l.dim());
  for (int i = 0; i < s.k(); ++i) out += l.inner(s.basis.col(i), x) * s.basis.col(i);
  return out;
}

/// Matrix of the h0-orthogonal projection onto S.
inline Mat projector(const LieAlgebra& l, const Subspace& s) {
  return s.basis * s.basis.transpose() * l.h0();
}

/// h0-orthonormal basis of the centralizer {Y : [X,Y] = 0}, via SVD of ad_X.
/// Always contains X/|X|.
inline Subspace centralizer_basis(const LieAlgebra& l, const Vec& x) {
  if (l.norm(x) <= 0.0) throw Error("centralizer_basis: zero vector");
  const Mat adx = l.ad(x);
  Eigen::JacobiSVD<Mat> svd(adx, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const double cut = tol::rank * sv(0);
  int first = 0;
  while (first < l.dim() && sv(first) > cut) ++first;
  return make_subspace(l, svd.matrixV().rightCols(l.dim() - first));
}

/// Derived subalgebra [g,g]: span of all basis brackets.
inline Subspace derived_subalgebra(const LieAlgebra& l) {
  const int n = l.dim();
  Mat cols(n, n * (n - 1) / 2);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cols.col(c++) = l.bracket(l.basis(i), l.basis(j));
  if (cols.cols() == 0 || cols.cwiseAbs().maxCoeff() == 0.0)
    return Subspace{Mat::Zero(n, 0), true, true, true};
  return make_subspace(l, cols);
}

// so(4) factor conveniences (first/second so(3) summand, diagonal subalgebra)
inline Subspace so4_factor(const LieAlgebra& l, int which) {
  Mat b = Mat::Zero(6, 3);
  for (int i = 0; i < 3; ++i) b(which * 3 + i, i) = 1.0;
  return make_subspace(l, b);
}

inline Subspace so4_diagonal(const LieAlgebra& l) {
  Mat b = Mat::Zero(6, 3);
  for (int i = 0; i < 3; ++i) b(i, i) = b(3 + i, i) = 1.0;
  return make_subspace(l, b);
}

inline Vec so4_vec(const Vec& a, const Vec& b) {
  Vec v(6);
  v << a, b;
  return v;
}

}  // namespace curvlab

#endif  // CURVLAB_LIE_ALGEBRA_HPP
