#pragma once

// Calibrated projective cameras: 3x4 projection matrices with cached
// decomposition, pixel/ray conversions, and rig file I/O.
//
// Pixel convention: u in [0, W), v in [0, H), origin at the top-left
// corner, v grows downward. World units are meters.

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mvc/autodiff.hpp"
#include "mvc/errors.hpp"
#include "mvc/vec.hpp"

namespace mvc {

using Mat34 = Eigen::Matrix<double, 3, 4>;

// A 3D line with unit direction.
struct Line3 {
  V3d origin;
  V3d dir;
};

struct CameraModel {
  Mat34 P;                  // world (homogeneous) -> pixel (homogeneous)
  Eigen::Matrix3d M;        // leading 3x3 block of P
  Eigen::Matrix3d M_inv;
  V3d center;               // optical center, M*center + P.col(3) = 0
  int width = 0;
  int height = 0;
};

struct CameraRig {
  std::vector<CameraModel> cameras;
  int count() const { return static_cast<int>(cameras.size()); }
};

// Builds the cached decomposition. Throws SingularCamera when
// |det M| <= 1e-12.
CameraModel decompose(const Mat34& P, int width, int height);

// Dehomogenized projection. Throws BehindCamera when the projective depth
// w <= 1e-9. No clamping to the image rectangle.
std::pair<double, double> project(const CameraModel& cam, const V3d& X);

// Differentiable projection with the full P on homogeneous [X;1].
std::pair<ad::Scalar, ad::Scalar> project(const CameraModel& cam,
                                          const V3s& X);

// Line of sight through pixel (u, v): origin at the optical center,
// direction M_inv * (u, v, 1) normalized. Points at positive parameter
// project with positive depth.
Line3 ray_through_pixel(const CameraModel& cam, double u, double v);

// Differentiable unit ray direction for the same line of sight.
V3s ray_dir(const CameraModel& cam, const ad::Scalar& u, const ad::Scalar& v);

// Rig file: JSON {"cameras":[{"P":[[..4]..3],"width":W,"height":H},..]}.
// Throws ParseError / SingularCamera / TooFewCameras.
CameraRig load_rig(const std::string& path);
void save_rig(const std::string& path, const CameraRig& rig);

CameraRig rig_from_json_text(const std::string& text);
std::string rig_to_json_text(const CameraRig& rig);

}  // namespace mvc
