#pragma once

// Minimal fixed-size vector over double or ad::Scalar. Geometry that must
// carry gradients uses these instead of Eigen types.

#include <cmath>

#include "mvc/autodiff.hpp"

namespace mvc {

template <typename T>
struct V3 {
  T x{}, y{}, z{};

  friend V3 operator+(const V3& a, const V3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend V3 operator-(const V3& a, const V3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend V3 operator*(const T& s, const V3& v) {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend V3 operator*(const V3& v, double s) {
    return {v.x * s, v.y * s, v.z * s};
  }
  friend T dot(const V3& a, const V3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
  }
  friend T norm(const V3& v) {
    using std::sqrt;
    using mvc::ad::sqrt;
    return sqrt(dot(v, v));
  }
  friend V3 normalized(const V3& v) {
    T inv = 1.0 / norm(v);
    return {v.x * inv, v.y * inv, v.z * inv};
  }
};

using V3d = V3<double>;
using V3s = V3<ad::Scalar>;

inline V3d values_of(const V3s& v) {
  return {v.x.value(), v.y.value(), v.z.value()};
}

inline V3s to_scalar(const V3d& v) {
  return {ad::Scalar(v.x), ad::Scalar(v.y), ad::Scalar(v.z)};
}

}  // namespace mvc
