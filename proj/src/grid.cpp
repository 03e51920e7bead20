#include "mvc/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mvc {

void validate(const ProbMap2D& map) {
  if (static_cast<int>(map.p.size()) != map.spec.cell_count())
    throw InvalidSpec("ProbMap2D: size does not match spec");
  double sum = 0.0;
  for (int i = 0; i < map.spec.cell_count(); ++i) {
    const double v = map.p[static_cast<std::size_t>(i)];
    if (v < 0.0) throw InvalidSpec("ProbMap2D: negative probability");
    if (map.spec.is_border(i) && v != 0.0)
      throw InvalidSpec("ProbMap2D: border cell probability must be zero");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw InvalidSpec("ProbMap2D: probabilities sum to " + std::to_string(sum));
}

std::optional<int> cell_index(const GridSpec2D& spec, double u, double v) {
  if (!(u >= 0.0 && u < spec.width && v >= 0.0 && v < spec.height))
    return std::nullopt;
  const int col = static_cast<int>(std::floor(u * spec.n_col / spec.width));
  const int row = static_cast<int>(std::floor(v * spec.n_row / spec.height));
  return col + spec.n_col * row;
}

VoxelGrid build_grid(const V3d& center, double side, std::array<int, 3> dims) {
  if (!(side > 0.0)) throw InvalidSpec("build_grid: side must be > 0");
  for (int d : dims)
    if (d < 2) throw InvalidSpec("build_grid: dims must be >= 2 per axis");
  VoxelGrid grid;
  grid.center = center;
  grid.side = side;
  grid.dims = dims;
  grid.centers.reserve(static_cast<std::size_t>(grid.voxel_count()));
  const double sx = side / dims[0], sy = side / dims[1], sz = side / dims[2];
  const V3d corner{center.x - side / 2.0, center.y - side / 2.0,
                   center.z - side / 2.0};
  for (int iz = 0; iz < dims[2]; ++iz)
    for (int iy = 0; iy < dims[1]; ++iy)
      for (int ix = 0; ix < dims[0]; ++ix)
        grid.centers.push_back({corner.x + (ix + 0.5) * sx,
                                corner.y + (iy + 0.5) * sy,
                                corner.z + (iz + 0.5) * sz});
  return grid;
}

FusionContext make_fusion_context(const CameraRig& rig, const VoxelGrid& grid,
                                  const GridSpec2D& spec) {
  FusionContext ctx;
  ctx.grid = std::make_shared<VoxelGrid>(grid);
  ctx.n_cameras = rig.count();
  ctx.spec = spec;
  const int V = grid.voxel_count();
  ctx.cells.assign(static_cast<std::size_t>(V) * rig.count(), -1);
  for (int j = 0; j < V; ++j) {
    bool visible_everywhere = true;
    for (int c = 0; c < rig.count(); ++c) {
      const CameraModel& cam = rig.cameras[static_cast<std::size_t>(c)];
      std::int32_t cell = -1;
      try {
        auto [u, v] = project(cam, grid.centers[static_cast<std::size_t>(j)]);
        if (u > 0.0 && u < cam.width && v > 0.0 && v < cam.height) {
          GridSpec2D cam_spec = spec;
          cam_spec.width = cam.width;
          cam_spec.height = cam.height;
          if (auto idx = cell_index(cam_spec, u, v)) cell = *idx;
        }
      } catch (const BehindCamera&) {
      }
      ctx.cells[static_cast<std::size_t>(j) * rig.count() + c] = cell;
      if (cell < 0) visible_everywhere = false;
    }
    if (visible_everywhere) ctx.support.push_back(j);
  }
  return ctx;
}

std::vector<ad::Scalar> fuse_support(
    const std::vector<std::vector<ad::Scalar>>& maps,
    const FusionContext& ctx) {
  using ad::Scalar;
  if (static_cast<int>(maps.size()) != ctx.n_cameras)
    throw InvalidSpec("fuse: need exactly one probability map per camera");
  if (ctx.support.empty())
    throw EmptySupport("fuse: no voxel is visible in all cameras");

  const std::size_t n = ctx.support.size();
  std::vector<Scalar> logq(n, Scalar(0.0));
  for (std::size_t s = 0; s < n; ++s) {
    const int j = ctx.support[s];
    Scalar acc(0.0);
    for (int c = 0; c < ctx.n_cameras; ++c) {
      const std::int32_t cell = ctx.cell_of(j, c);
      const Scalar& p = maps[static_cast<std::size_t>(c)]
                            [static_cast<std::size_t>(cell)];
      acc += ad::log(ad::max(p, Scalar(kProbFloor)));
    }
    logq[s] = acc;
  }

  // Max-shifted exponential sum; the shift is mathematically constant in
  // the normalized ratio, so it is detached.
  double shift = logq[0].value();
  for (const Scalar& l : logq) shift = std::max(shift, l.value());
  Scalar z(0.0);
  std::vector<Scalar> expv(n, Scalar(0.0));
  for (std::size_t s = 0; s < n; ++s) {
    expv[s] = ad::exp(logq[s] - shift);
    z += expv[s];
  }
  std::vector<Scalar> q(n, Scalar(0.0));
  const Scalar inv_z = 1.0 / z;
  for (std::size_t s = 0; s < n; ++s) q[s] = expv[s] * inv_z;
  return q;
}

VoxelDistribution fuse(const std::vector<ProbMap2D>& maps,
                       const FusionContext& ctx) {
  for (const auto& m : maps)
    if (static_cast<int>(m.p.size()) != ctx.spec.cell_count())
      throw InvalidSpec("fuse: probability map does not match grid spec");
  std::vector<std::vector<ad::Scalar>> s_maps(maps.size());
  for (std::size_t c = 0; c < maps.size(); ++c)
    s_maps[c].assign(maps[c].p.begin(), maps[c].p.end());
  const auto qs = fuse_support(s_maps, ctx);

  VoxelDistribution dist;
  dist.grid = ctx.grid;
  dist.support = ctx.support;
  dist.q.assign(static_cast<std::size_t>(ctx.grid->voxel_count()), 0.0);
  for (std::size_t s = 0; s < qs.size(); ++s)
    dist.q[static_cast<std::size_t>(ctx.support[s])] = qs[s].value();
  return dist;
}

VoxelDistribution fuse(const std::vector<ProbMap2D>& maps,
                       const CameraRig& rig, const VoxelGrid& grid) {
  if (static_cast<int>(maps.size()) != rig.count())
    throw InvalidSpec("fuse: need exactly one probability map per camera");
  for (int c = 0; c < rig.count(); ++c) {
    if (maps[static_cast<std::size_t>(c)].spec.width !=
            rig.cameras[static_cast<std::size_t>(c)].width ||
        maps[static_cast<std::size_t>(c)].spec.height !=
            rig.cameras[static_cast<std::size_t>(c)].height)
      throw InvalidSpec("fuse: map spec does not match camera image size");
  }
  return fuse(maps, make_fusion_context(rig, grid, maps.front().spec));
}

std::vector<double> marginalize(const VoxelDistribution& dist,
                                const CameraRig& rig, int cam_index,
                                const GridSpec2D& spec) {
  if (cam_index < 0 || cam_index >= rig.count())
    throw InvalidSpec("marginalize: camera index out of range");
  const CameraModel& cam = rig.cameras[static_cast<std::size_t>(cam_index)];
  GridSpec2D cam_spec = spec;
  cam_spec.width = cam.width;
  cam_spec.height = cam.height;
  std::vector<double> cells(static_cast<std::size_t>(spec.cell_count()), 0.0);
  for (int j : dist.support) {
    const auto [u, v] =
        project(cam, dist.grid->centers[static_cast<std::size_t>(j)]);
    if (auto cell = cell_index(cam_spec, u, v))
      cells[static_cast<std::size_t>(*cell)] +=
          dist.q[static_cast<std::size_t>(j)];
  }
  return cells;
}

}  // namespace mvc
