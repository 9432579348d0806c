#ifndef CURVLAB_COMMON_HPP
#define CURVLAB_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace curvlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Shared tolerances. The commutation gate is used by every module that
// quantifies over commuting pairs, so it lives here.
namespace tol {
inline constexpr double structure = 1e-12;    // Jacobi / ad-invariance / symmetry
inline constexpr double commuting = 1e-10;    // |[X,Y]| <= commuting*|X||Y|
inline constexpr double rank = 1e-9;          // relative SVD threshold for nullspaces/spans
inline constexpr double pole_margin = 1e-12;  // reject t this close to a path pole
inline constexpr double verdict = 1e-9;       // default nonnegativity verdict tolerance
inline constexpr double d_gate = 1e-6;        // |D| gate when |delta| is below verdict tol
inline constexpr double classifier = 1e-8;    // default classifier residual tolerance
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a path parameter t leaves the open interval on which
/// (I - t*Psi) stays positive definite. Carries the offending eigenvalue.
struct PathDomainError : Error {
  PathDomainError(const std::string& msg, double eigenvalue)
      : Error(msg), offending_eigenvalue(eigenvalue) {}
  double offending_eigenvalue;
};

inline bool is_symmetric(const Mat& m, double eps = tol::structure) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= eps * std::max(1.0, m.cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------
// Deterministic RNG. All sampling in the toolkit goes through this: a
// splitmix64-seeded xoshiro256++ with explicit Box-Muller normals, so streams
// are reproducible bit-for-bit across platforms and independent of libstdc++'s
// distribution implementations. Sample k of a run draws from stream(seed, k).
// ---------------------------------------------------------------------------
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  /// Substream derived from (seed, index); used for order-independent sampling.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    return Rng(splitmix64(x));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Vec unit_vec(int n) {
    Vec v = gaussian_vec(n);
    double s = v.norm();
    while (s < 1e-12) {
      v = gaussian_vec(n);
      s = v.norm();
    }
    return v / s;
  }

  Mat symmetric(int n, double scale = 1.0) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = scale * normal();
    return m;
  }

  /// Random SPD matrix with eigenvalues in [lo, hi].
  Mat spd(int n, double lo = 0.2, double hi = 3.0) {
    const Mat s = symmetric(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    Vec evals(n);
    for (int i = 0; i < n; ++i) evals(i) = uniform(lo, hi);
    return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace curvlab

#endif  // CURVLAB_COMMON_HPP
