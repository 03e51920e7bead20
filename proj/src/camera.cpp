#include "mvc/camera.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mvc {

CameraModel decompose(const Mat34& P, int width, int height) {
  CameraModel cam;
  cam.P = P;
  cam.M = P.leftCols<3>();
  const double det = cam.M.determinant();
  if (std::fabs(det) <= 1e-12)
    throw SingularCamera("decompose: leading 3x3 block is singular (|det| = " +
                         std::to_string(std::fabs(det)) + ")");
  cam.M_inv = cam.M.inverse();
  const Eigen::Vector3d c = -cam.M_inv * P.col(3);
  cam.center = {c.x(), c.y(), c.z()};
  cam.width = width;
  cam.height = height;
  return cam;
}

std::pair<double, double> project(const CameraModel& cam, const V3d& X) {
  const Eigen::Vector4d Xh(X.x, X.y, X.z, 1.0);
  const Eigen::Vector3d x = cam.P * Xh;
  if (x.z() <= 1e-9)
    throw BehindCamera("project: point has non-positive projective depth w = " +
                       std::to_string(x.z()));
  return {x.x() / x.z(), x.y() / x.z()};
}

std::pair<ad::Scalar, ad::Scalar> project(const CameraModel& cam,
                                          const V3s& X) {
  const Mat34& P = cam.P;
  auto row = [&](int r) {
    return P(r, 0) * X.x + P(r, 1) * X.y + P(r, 2) * X.z + P(r, 3);
  };
  ad::Scalar xh = row(0), yh = row(1), wh = row(2);
  if (wh.value() <= 1e-9)
    throw BehindCamera("project: point has non-positive projective depth w = " +
                       std::to_string(wh.value()));
  return {xh / wh, yh / wh};
}

Line3 ray_through_pixel(const CameraModel& cam, double u, double v) {
  const Eigen::Vector3d d = cam.M_inv * Eigen::Vector3d(u, v, 1.0);
  // M*d = (u,v,1), so the depth of center + lambda*d is lambda > 0 already;
  // normalization preserves the sign.
  const Eigen::Vector3d n = d.normalized();
  return {cam.center, {n.x(), n.y(), n.z()}};
}

V3s ray_dir(const CameraModel& cam, const ad::Scalar& u, const ad::Scalar& v) {
  const Eigen::Matrix3d& Mi = cam.M_inv;
  V3s d{Mi(0, 0) * u + Mi(0, 1) * v + Mi(0, 2),
        Mi(1, 0) * u + Mi(1, 1) * v + Mi(1, 2),
        Mi(2, 0) * u + Mi(2, 1) * v + Mi(2, 2)};
  return normalized(d);
}

namespace {

CameraModel camera_from_json(const nlohmann::json& jc) {
  if (!jc.contains("P") || !jc.contains("width") || !jc.contains("height"))
    throw ParseError("rig: camera entry missing P/width/height");
  const auto& jp = jc.at("P");
  if (!jp.is_array() || jp.size() != 3)
    throw ParseError("rig: P must have 3 rows");
  Mat34 P;
  for (int r = 0; r < 3; ++r) {
    const auto& row = jp.at(r);
    if (!row.is_array() || row.size() != 4)
      throw ParseError("rig: P rows must have 4 columns");
    for (int c = 0; c < 4; ++c) P(r, c) = row.at(c).get<double>();
  }
  const int w = jc.at("width").get<int>();
  const int h = jc.at("height").get<int>();
  if (w <= 0 || h <= 0) throw ParseError("rig: non-positive image size");
  return decompose(P, w, h);
}

}  // namespace

CameraRig rig_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rig: invalid JSON: ") + e.what());
  }
  if (!j.contains("cameras") || !j.at("cameras").is_array())
    throw ParseError("rig: missing \"cameras\" array");
  CameraRig rig;
  try {
    for (const auto& jc : j.at("cameras"))
      rig.cameras.push_back(camera_from_json(jc));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rig: malformed camera entry: ") + e.what());
  }
  if (rig.count() < 2)
    throw TooFewCameras("rig: need at least 2 cameras, got " +
                        std::to_string(rig.count()));
  return rig;
}

std::string rig_to_json_text(const CameraRig& rig) {
  nlohmann::json j;
  j["cameras"] = nlohmann::json::array();
  for (const auto& cam : rig.cameras) {
    nlohmann::json jc;
    auto rows = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < 4; ++c) row.push_back(cam.P(r, c));
      rows.push_back(row);
    }
    jc["P"] = rows;
    jc["width"] = cam.width;
    jc["height"] = cam.height;
    j["cameras"].push_back(jc);
  }
  return j.dump(2);
}

CameraRig load_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("rig: cannot open file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return rig_from_json_text(ss.str());
}

void save_rig(const std::string& path, const CameraRig& rig) {
  std::ofstream out(path);
  if (!out) throw IoError("rig: cannot write file " + path);
  out << rig_to_json_text(rig) << "\n";
}

}  // namespace mvc
