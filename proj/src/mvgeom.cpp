#include "mvc/mvgeom.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace mvc {

namespace {

constexpr double kDamping = 1e-9;
constexpr double kMaxCondition = 1e9;

// Condition number of the undamped normal matrix; throws on degeneracy.
void check_conditioning(std::span<const V3d> dirs) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  for (const V3d& nd : dirs) {
    const Eigen::Vector3d n = Eigen::Vector3d(nd.x, nd.y, nd.z).normalized();
    A += Eigen::Matrix3d::Identity() - n * n.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(2);
  if (!(lmin > 0.0) || lmax / lmin > kMaxCondition)
    throw DegenerateConfiguration(
        "nearest_point_to_lines: normal matrix condition " +
        std::to_string(lmin > 0.0 ? lmax / lmin
                                  : std::numeric_limits<double>::infinity()) +
        " exceeds 1e9");
}

double condition_of(std::span<const Line3> lines) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  for (const Line3& l : lines) {
    const Eigen::Vector3d n(l.dir.x, l.dir.y, l.dir.z);
    A += Eigen::Matrix3d::Identity() - n * n.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(2);
  return lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
}

}  // namespace

V3s nearest_point_to_lines(std::span<const V3s> origins,
                           std::span<const V3s> dirs) {
  if (origins.size() != dirs.size() || origins.size() < 2)
    throw DegenerateConfiguration(
        "nearest_point_to_lines: need >= 2 lines with matching origins");
  {
    std::vector<V3d> dv;
    dv.reserve(dirs.size());
    for (const V3s& d : dirs) dv.push_back(values_of(d));
    check_conditioning(dv);
  }

  using S = ad::Scalar;
  // Symmetric A (Tikhonov-damped) and right-hand side m.
  S a00(kDamping), a11(kDamping), a22(kDamping);
  S a01(0.0), a02(0.0), a12(0.0);
  V3s m{S(0.0), S(0.0), S(0.0)};
  for (std::size_t c = 0; c < origins.size(); ++c) {
    const V3s n = normalized(dirs[c]);
    const V3s& o = origins[c];
    a00 += 1.0 - n.x * n.x;
    a11 += 1.0 - n.y * n.y;
    a22 += 1.0 - n.z * n.z;
    a01 -= n.x * n.y;
    a02 -= n.x * n.z;
    a12 -= n.y * n.z;
    const S no = dot(n, o);
    m = m + V3s{o.x - n.x * no, o.y - n.y * no, o.z - n.z * no};
  }

  // Closed-form 3x3 symmetric solve via the adjugate.
  const S c00 = a11 * a22 - a12 * a12;
  const S c01 = a02 * a12 - a01 * a22;
  const S c02 = a01 * a12 - a02 * a11;
  const S c11 = a00 * a22 - a02 * a02;
  const S c12 = a01 * a02 - a00 * a12;
  const S c22 = a00 * a11 - a01 * a01;
  const S det = a00 * c00 + a01 * c01 + a02 * c02;
  const S inv_det = 1.0 / det;
  return {(c00 * m.x + c01 * m.y + c02 * m.z) * inv_det,
          (c01 * m.x + c11 * m.y + c12 * m.z) * inv_det,
          (c02 * m.x + c12 * m.y + c22 * m.z) * inv_det};
}

double sum_squared_distances(std::span<const Line3> lines, const V3d& p) {
  double s = 0.0;
  for (const Line3& l : lines) {
    const V3d d = {p.x - l.origin.x, p.y - l.origin.y, p.z - l.origin.z};
    const double along = dot(l.dir, d);
    s += dot(d, d) - along * along;
  }
  return s;
}

LsqResult nearest_point_to_lines(std::span<const Line3> lines) {
  if (lines.size() < 2)
    throw DegenerateConfiguration("nearest_point_to_lines: need >= 2 lines");
  const double cond = condition_of(lines);
  if (!(cond <= kMaxCondition))
    throw DegenerateConfiguration(
        "nearest_point_to_lines: normal matrix condition " +
        std::to_string(cond) + " exceeds 1e9");

  std::vector<V3s> origins, dirs;
  origins.reserve(lines.size());
  dirs.reserve(lines.size());
  for (const Line3& l : lines) {
    origins.push_back(to_scalar(l.origin));
    dirs.push_back(to_scalar(l.dir));
  }
  const V3d p = values_of(nearest_point_to_lines(origins, dirs));
  return {p, cond, sum_squared_distances(lines, p)};
}

V3d nearest_point_bruteforce(std::span<const Line3> lines,
                             const Bounds3& bounds, double step) {
  if (step <= 0.0) throw Error("nearest_point_bruteforce: step must be > 0");
  auto obj = [&](const V3d& p) { return sum_squared_distances(lines, p); };

  V3d best{bounds.lo.x, bounds.lo.y, bounds.lo.z};
  double best_val = std::numeric_limits<double>::infinity();
  for (double x = bounds.lo.x; x <= bounds.hi.x + 1e-12; x += step)
    for (double y = bounds.lo.y; y <= bounds.hi.y + 1e-12; y += step)
      for (double z = bounds.lo.z; z <= bounds.hi.z + 1e-12; z += step) {
        const double v = obj({x, y, z});
        if (v < best_val) {
          best_val = v;
          best = {x, y, z};
        }
      }

  // Refine by bisecting the step on each axis: descend over the +-h
  // neighborhood (diagonal moves included, so coupled valleys do not stall)
  // until no improvement, then halve h, down to step/1024.
  for (double h = step; h >= step / 1024.0; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const V3d cand{best.x + dx * h, best.y + dy * h, best.z + dz * h};
            const double v = obj(cand);
            if (v < best_val) {
              best_val = v;
              best = cand;
              improved = true;
            }
          }
    }
  }
  return best;
}

V3d rig_focus_point(const CameraRig& rig) {
  std::vector<Line3> axes;
  axes.reserve(rig.cameras.size());
  for (const CameraModel& cam : rig.cameras) {
    // Third row of M is the optical-axis direction with positive projective
    // depth under the stored P.
    const Eigen::Vector3d r3 = cam.M.row(2).transpose().normalized();
    axes.push_back({cam.center, {r3.x(), r3.y(), r3.z()}});
  }
  return nearest_point_to_lines(axes).point;
}

}  // namespace mvc
