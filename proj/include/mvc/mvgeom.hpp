#pragma once

// Closest point to a set of 3D lines in the least-squares sense, solved
// through the damped 3x3 normal system  A u = m  with
//   A = sum_c (I - n_c n_c^T),  m = sum_c (I - n_c n_c^T) o_c.
// Also a solver-independent brute-force version used as a test oracle,
// and the rig focus point (nearest point to all optical axes).

#include <span>
#include <vector>

#include "mvc/camera.hpp"
#include "mvc/vec.hpp"

namespace mvc {

struct LsqResult {
  V3d point;          // meters
  double condition;   // condition number of the (undamped) normal matrix
  double residual;    // sum of squared perpendicular distances, m^2
};

// Throws DegenerateConfiguration when cond(A) > 1e9 (e.g. parallel lines).
// Requires at least 2 lines.
LsqResult nearest_point_to_lines(std::span<const Line3> lines);

// Differentiable core used inside consistency adjustments: gradients flow
// into every origin and direction. Directions need not be pre-normalized.
// Performs the same degeneracy check on the current values.
V3s nearest_point_to_lines(std::span<const V3s> origins,
                           std::span<const V3s> dirs);

// Sum of squared perpendicular distances from p to the lines.
double sum_squared_distances(std::span<const Line3> lines, const V3d& p);

struct Bounds3 {
  V3d lo, hi;
};

// Grid search over bounds at the given step, then per-axis bracket
// refinement to step/1024 resolution. Independent of the linear solver.
V3d nearest_point_bruteforce(std::span<const Line3> lines,
                             const Bounds3& bounds, double step);

// Nearest point to the optical axes of all cameras; the standard center
// for the 3D proposal grid.
V3d rig_focus_point(const CameraRig& rig);

}  // namespace mvc
