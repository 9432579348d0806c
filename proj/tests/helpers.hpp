#ifndef CURVLAB_TESTS_HELPERS_HPP
#define CURVLAB_TESTS_HELPERS_HPP

#include "curvlab/common.hpp"

namespace curvlab::testing {

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline Vec unit3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v / v.norm();
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

}  // namespace curvlab::testing

#endif
