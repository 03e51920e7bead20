#pragma once

// 3D voxel proposal grid and multi-view consensus fusion: per-view 2D cell
// probabilities are combined per voxel by summing log probabilities over
// the cameras and renormalizing over the jointly visible support.

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "mvc/autodiff.hpp"
#include "mvc/camera.hpp"
#include "mvc/vec.hpp"

namespace mvc {

struct GridSpec2D {
  int n_col = 8;
  int n_row = 8;
  int width = 0;   // pixels
  int height = 0;  // pixels

  int cell_count() const { return n_col * n_row; }
  double cell_w() const { return static_cast<double>(width) / n_col; }
  double cell_h() const { return static_cast<double>(height) / n_row; }
  int col_of(int cell) const { return cell % n_col; }
  int row_of(int cell) const { return cell / n_col; }
  bool is_border(int cell) const {
    const int c = col_of(cell), r = row_of(cell);
    return c == 0 || r == 0 || c == n_col - 1 || r == n_row - 1;
  }
  // center of a cell in pixel coordinates
  std::pair<double, double> cell_center(int cell) const {
    return {(col_of(cell) + 0.5) * cell_w(), (row_of(cell) + 0.5) * cell_h()};
  }
};

// Per-view probability map over the 2D grid; borders are exactly zero and
// the entries sum to one.
struct ProbMap2D {
  GridSpec2D spec;
  std::vector<double> p;
};

// Checks the ProbMap2D invariants (nonnegative, unit sum, zero borders).
void validate(const ProbMap2D& map);

// Cell containing pixel (u, v), or empty when outside [0,W) x [0,H).
std::optional<int> cell_index(const GridSpec2D& spec, double u, double v);

struct VoxelGrid {
  V3d center;
  double side = 0.0;             // cuboid side length, meters
  std::array<int, 3> dims{};     // voxels per axis
  std::vector<V3d> centers;      // x-fastest lattice order

  int voxel_count() const { return dims[0] * dims[1] * dims[2]; }
};

// Regular lattice of voxel centers filling the cuboid. Throws InvalidSpec.
VoxelGrid build_grid(const V3d& center, double side, std::array<int, 3> dims);

struct VoxelDistribution {
  std::shared_ptr<const VoxelGrid> grid;
  std::vector<double> q;      // length V; zero outside support
  std::vector<int> support;   // ascending voxel indices visible in all views
};

// Precomputed voxel-to-cell assignments for a static (rig, grid) pair.
struct FusionContext {
  std::shared_ptr<const VoxelGrid> grid;
  int n_cameras = 0;
  GridSpec2D spec;                  // shared 2D grid spec (per-camera sizes)
  std::vector<std::int32_t> cells;  // V*C entries, -1 when not visible
  std::vector<int> support;

  std::int32_t cell_of(int voxel, int cam) const {
    return cells[static_cast<std::size_t>(voxel) * n_cameras + cam];
  }
};

// Projects every voxel center into every camera once. The support is the
// set of voxels strictly inside every image with positive depth.
FusionContext make_fusion_context(const CameraRig& rig, const VoxelGrid& grid,
                                  const GridSpec2D& spec);

// Eq.-style fusion: q_j ∝ exp(sum_c log max(p_c, 1e-12)) over the support,
// computed with a max-shifted exponential sum. Throws EmptySupport.
VoxelDistribution fuse(const std::vector<ProbMap2D>& maps,
                       const CameraRig& rig, const VoxelGrid& grid);
VoxelDistribution fuse(const std::vector<ProbMap2D>& maps,
                       const FusionContext& ctx);

// Differentiable fusion over the support; maps[c] holds cell probabilities
// as tape scalars. Returns q aligned with ctx.support.
std::vector<ad::Scalar> fuse_support(
    const std::vector<std::vector<ad::Scalar>>& maps, const FusionContext& ctx);

// Per-cell sums of q over voxels projecting into each cell of camera c.
std::vector<double> marginalize(const VoxelDistribution& dist,
                                const CameraRig& rig, int cam_index,
                                const GridSpec2D& spec);

constexpr double kProbFloor = 1e-12;

}  // namespace mvc
