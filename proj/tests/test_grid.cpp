#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mvc/grid.hpp"
#include "mvc/mvgeom.hpp"
#include "test_util.hpp"

using namespace mvc;
using testutil::ring_rig;
using testutil::uniform;

namespace {

GridSpec2D spec128() { return {8, 8, 128, 128}; }

// Uniform probability map over interior cells.
ProbMap2D uniform_map(const GridSpec2D& spec) {
  ProbMap2D m{spec, std::vector<double>(spec.cell_count(), 0.0)};
  int interior = 0;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (!spec.is_border(i)) ++interior;
  for (int i = 0; i < spec.cell_count(); ++i)
    if (!spec.is_border(i)) m.p[i] = 1.0 / interior;
  return m;
}

}  // namespace

TEST_CASE("build_grid lattice arithmetic") {
  const VoxelGrid g = build_grid({0, 0, 0}, 2.0, {2, 2, 2});
  REQUIRE(g.voxel_count() == 8);
  std::set<std::array<double, 3>> expect;
  for (double z : {-0.5, 0.5})
    for (double y : {-0.5, 0.5})
      for (double x : {-0.5, 0.5}) expect.insert({x, y, z});
  for (const V3d& c : g.centers) {
    CHECK(expect.count({c.x, c.y, c.z}) == 1);
  }
}

TEST_CASE("build_grid published configurations") {
  CHECK(build_grid({0, 0, 0}, 8.0, {16, 16, 16}).voxel_count() == 4096);
  CHECK(build_grid({0, 0, 0}, 4.0, {10, 10, 10}).voxel_count() == 1000);
  CHECK(build_grid({0, 0, 0}, 12.0, {16, 16, 16}).voxel_count() == 4096);
}

TEST_CASE("build_grid rejects invalid specs") {
  CHECK_THROWS_AS(build_grid({0, 0, 0}, 0.0, {4, 4, 4}), InvalidSpec);
  CHECK_THROWS_AS(build_grid({0, 0, 0}, 2.0, {1, 4, 4}), InvalidSpec);
}

TEST_CASE("cell_index arithmetic and bounds") {
  const GridSpec2D spec = spec128();
  CHECK(cell_index(spec, 0, 0) == 0);
  CHECK(cell_index(spec, 64, 0) == 4);
  CHECK(!cell_index(spec, 128, 50).has_value());
  CHECK(!cell_index(spec, -0.01, 50).has_value());
  CHECK(cell_index(spec, 127.999, 127.999) == 63);
}

TEST_CASE("fuse of uniform maps is uniform over support") {
  const CameraRig rig = ring_rig(3, 10.0, {0, 0, 1});
  const VoxelGrid grid = build_grid(rig_focus_point(rig), 2.0, {4, 4, 4});
  std::vector<ProbMap2D> maps(3, uniform_map(spec128()));
  const VoxelDistribution dist = fuse(maps, rig, grid);
  REQUIRE(!dist.support.empty());
  const double expect = 1.0 / dist.support.size();
  for (int j : dist.support)
    CHECK(dist.q[j] == doctest::Approx(expect).epsilon(1e-9));
  double sum = 0.0;
  for (double v : dist.q) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fuse hand example: product and normalize") {
  // Hand-built context: two cameras, two supported voxels a and b that land
  // in distinct cells in both views. q_a = 0.8*0.6 / (0.48 + 0.08) = 6/7.
  FusionContext ctx;
  ctx.grid = std::make_shared<VoxelGrid>(build_grid({0, 0, 0}, 1.0, {2, 2, 2}));
  ctx.n_cameras = 2;
  ctx.spec = spec128();
  ctx.cells.assign(static_cast<std::size_t>(8) * 2, -1);
  ctx.support = {0, 1};
  ctx.cells[0 * 2 + 0] = 9;   // voxel a
  ctx.cells[0 * 2 + 1] = 18;
  ctx.cells[1 * 2 + 0] = 10;  // voxel b
  ctx.cells[1 * 2 + 1] = 19;

  std::vector<ProbMap2D> maps(2);
  for (int c = 0; c < 2; ++c) {
    maps[c].spec = spec128();
    maps[c].p.assign(64, 0.0);
  }
  maps[0].p[9] = 0.8;
  maps[0].p[10] = 0.2;
  maps[1].p[18] = 0.6;
  maps[1].p[19] = 0.4;

  const VoxelDistribution dist = fuse(maps, ctx);
  CHECK(dist.q[0] == doctest::Approx(6.0 / 7.0).epsilon(1e-9));
  CHECK(dist.q[1] == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
}

TEST_CASE("fuse floors zero probabilities") {
  CameraRig rig = ring_rig(4, 10.0, {0, 0, 1});
  rig.cameras.resize(2);
  const VoxelGrid grid = build_grid({0, 0, 1}, 2.0, {4, 4, 4});
  const FusionContext ctx = make_fusion_context(rig, grid, spec128());
  const int va = ctx.support.front();

  auto maps = std::vector<ProbMap2D>(2, uniform_map(spec128()));
  // Camera 1 assigns zero to the cell under va; redistribute its mass.
  const int cell = ctx.cell_of(va, 1);
  REQUIRE(maps[1].p[cell] > 0.0);
  const double moved = maps[1].p[cell];
  maps[1].p[cell] = 0.0;
  for (int i = 0; i < 64; ++i)
    if (!maps[1].spec.is_border(i) && i != cell)
      maps[1].p[i] += moved / 35.0;

  const VoxelDistribution dist = fuse(maps, ctx);
  double qmax = 0.0;
  for (double v : dist.q) qmax = std::max(qmax, v);
  CHECK(dist.q[va] < 1e-6 * qmax);
}

TEST_CASE("fuse is invariant to camera permutation") {
  std::mt19937_64 rng(5);
  CameraRig rig = ring_rig(3, 9.0, {0, 0, 1});
  const VoxelGrid grid = build_grid(rig_focus_point(rig), 2.5, {4, 4, 4});
  std::vector<ProbMap2D> maps;
  for (int c = 0; c < 3; ++c) {
    ProbMap2D m = uniform_map(spec128());
    double sum = 0.0;
    for (int i = 0; i < 64; ++i)
      if (!m.spec.is_border(i)) sum += (m.p[i] = uniform(rng, 0.01, 1.0));
    for (auto& v : m.p) v /= sum;
    maps.push_back(m);
  }
  const VoxelDistribution a = fuse(maps, rig, grid);

  CameraRig rig2;
  rig2.cameras = {rig.cameras[2], rig.cameras[0], rig.cameras[1]};
  std::vector<ProbMap2D> maps2 = {maps[2], maps[0], maps[1]};
  const VoxelDistribution b = fuse(maps2, rig2, grid);
  for (int j = 0; j < grid.voxel_count(); ++j)
    CHECK(a.q[j] == doctest::Approx(b.q[j]).epsilon(1e-12));
}

TEST_CASE("fuse gradients match finite differences on a small grid") {
  CameraRig rig = ring_rig(4, 10.0, {0, 0, 1});
  rig.cameras.resize(2);
  const VoxelGrid grid = build_grid({0, 0, 1}, 2.0, {2, 2, 2});
  const FusionContext ctx = make_fusion_context(rig, grid, spec128());
  REQUIRE(!ctx.support.empty());

  // Parameters: interior cell probabilities of both maps (unnormalized is
  // fine for the gradient test; fuse renormalizes over support anyway).
  std::vector<int> interior;
  for (int i = 0; i < 64; ++i)
    if (!spec128().is_border(i)) interior.push_back(i);
  std::mt19937_64 rng(9);
  std::vector<double> x(interior.size() * 2);
  for (auto& v : x) v = uniform(rng, 0.05, 1.0);

  for (std::size_t out = 0; out < std::min<std::size_t>(ctx.support.size(), 4);
       ++out) {
    auto f = [&](std::span<const ad::Scalar> p) {
      std::vector<std::vector<ad::Scalar>> maps(
          2, std::vector<ad::Scalar>(64, ad::Scalar(0.0)));
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < interior.size(); ++i)
          maps[c][interior[i]] = p[c * interior.size() + i];
      return fuse_support(maps, ctx)[out];
    };
    const auto rep = ad::check_grad(f, x, 1e-6, 1e-4);
    CAPTURE(out);
    CHECK(rep.passed);
  }
}

TEST_CASE("fuse raises EmptySupport when views do not overlap") {
  // Grid far outside the frusta.
  CameraRig rig = ring_rig(4, 10.0, {0, 0, 1});
  rig.cameras.resize(2);
  const VoxelGrid grid = build_grid({100, 100, 100}, 2.0, {2, 2, 2});
  auto maps = std::vector<ProbMap2D>(2, uniform_map(spec128()));
  CHECK_THROWS_AS(fuse(maps, rig, grid), EmptySupport);
}

TEST_CASE("marginalize partitions the distribution") {
  const CameraRig rig = ring_rig(3, 10.0, {0, 0, 1});
  const VoxelGrid grid = build_grid(rig_focus_point(rig), 2.0, {4, 4, 4});
  const FusionContext ctx = make_fusion_context(rig, grid, spec128());

  VoxelDistribution dist;
  dist.grid = ctx.grid;
  dist.support = ctx.support;
  dist.q.assign(grid.voxel_count(), 0.0);

  SUBCASE("single nonzero voxel") {
    dist.q[ctx.support.front()] = 1.0;
    const auto cells = marginalize(dist, rig, 0, spec128());
    double sum = 0.0;
    int nonzero = 0;
    for (double v : cells) {
      sum += v;
      nonzero += v > 0.0;
    }
    CHECK(nonzero == 1);
    CHECK(sum == doctest::Approx(1.0));
  }

  SUBCASE("uniform q gives per-cell voxel counts") {
    const double u = 1.0 / ctx.support.size();
    for (int j : ctx.support) dist.q[j] = u;
    const auto cells = marginalize(dist, rig, 1, spec128());
    std::vector<int> counts(64, 0);
    for (int j : ctx.support) ++counts[ctx.cell_of(j, 1)];
    double sum = 0.0;
    for (int i = 0; i < 64; ++i) {
      CHECK(cells[i] == doctest::Approx(counts[i] * u).epsilon(1e-9));
      sum += cells[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("random q sums to one") {
    std::mt19937_64 rng(13);
    double sum = 0.0;
    for (int j : ctx.support) sum += (dist.q[j] = uniform(rng, 0.0, 1.0));
    for (int j : ctx.support) dist.q[j] /= sum;
    const auto cells = marginalize(dist, rig, 2, spec128());
    double total = 0.0;
    for (double v : cells) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("consensus concentration on synthetic maps") {
  // Per-view maps put 1-eta on the true voxel's cell; the fused argmax
  // should recover that voxel nearly always. Voxel spacing is chosen
  // coarser than the projected 2D cells so cell aliasing is rare.
  std::mt19937_64 rng(21);
  const double eta = 0.2;
  for (int cams : {2, 3, 4}) {
    CameraRig rig = ring_rig(cams == 2 ? 4 : cams, 10.0, {0, 0, 1});
    rig.cameras.resize(cams);
    const VoxelGrid grid = build_grid({0, 0, 1}, 4.5, {6, 6, 6});
    const FusionContext ctx = make_fusion_context(rig, grid, spec128());
    REQUIRE(!ctx.support.empty());
    int hits = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
      const int truth = ctx.support[rng() % ctx.support.size()];
      bool interior_everywhere = true;
      std::vector<ProbMap2D> maps;
      for (int c = 0; c < cams; ++c) {
        ProbMap2D m{spec128(), std::vector<double>(64, 0.0)};
        const int cell = ctx.cell_of(truth, c);
        if (m.spec.is_border(cell)) {
          interior_everywhere = false;
          break;
        }
        int interior_others = 0;
        for (int i = 0; i < 64; ++i)
          if (!m.spec.is_border(i) && i != cell) ++interior_others;
        for (int i = 0; i < 64; ++i)
          if (!m.spec.is_border(i) && i != cell) m.p[i] = eta / interior_others;
        m.p[cell] = 1.0 - eta;
        maps.push_back(m);
      }
      if (!interior_everywhere) {
        --t;
        continue;
      }
      const VoxelDistribution dist = fuse(maps, ctx);
      int argmax = -1;
      double qmax = -1.0;
      for (int j : dist.support)
        if (dist.q[j] > qmax) {
          qmax = dist.q[j];
          argmax = j;
        }
      hits += argmax == truth;
    }
    CAPTURE(cams);
    CHECK(hits >= static_cast<int>(0.99 * trials));
  }
}

TEST_CASE("raising a cell probability never lowers the voxel rank") {
  CameraRig rig = ring_rig(4, 10.0, {0, 0, 1});
  rig.cameras.resize(2);
  const VoxelGrid grid = build_grid({0, 0, 1}, 2.5, {4, 4, 4});
  const FusionContext ctx = make_fusion_context(rig, grid, spec128());
  std::mt19937_64 rng(31);

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ProbMap2D> maps;
    for (int c = 0; c < 2; ++c) {
      ProbMap2D m{spec128(), std::vector<double>(64, 0.0)};
      double sum = 0.0;
      for (int i = 0; i < 64; ++i)
        if (!m.spec.is_border(i)) sum += (m.p[i] = uniform(rng, 0.05, 1.0));
      for (auto& v : m.p) v /= sum;
      maps.push_back(m);
    }
    const int j = ctx.support[rng() % ctx.support.size()];
    const int cell = ctx.cell_of(j, 0);

    auto rank_among_peers = [&](const VoxelDistribution& d) {
      // Rank of j among voxels sharing its camera-1 cell (the "all other
      // cells equal" peer group for a 2-camera rig).
      int rank = 0;
      for (int o : d.support)
        if (o != j && ctx.cell_of(o, 1) == ctx.cell_of(j, 1) &&
            d.q[o] > d.q[j])
          ++rank;
      return rank;
    };

    const int before = rank_among_peers(fuse(maps, ctx));
    // Raise p for j's cell in camera 0, renormalize the map.
    maps[0].p[cell] *= 3.0;
    double sum = 0.0;
    for (double v : maps[0].p) sum += v;
    for (auto& v : maps[0].p) v /= sum;
    const int after = rank_among_peers(fuse(maps, ctx));
    CHECK(after <= before);
  }
}
