#pragma once

// Importance sampling of one voxel from the fused distribution q. The
// sampling distribution mixes q with a uniform exploration floor,
//   k_j = q_j * (1 - V*eps) + eps,   V*eps = 0.064,
// and the reweighting ratio r_j = q_j / k_j keeps sampled objectives
// unbiased. k is excluded from differentiation by convention.

#include <random>
#include <vector>

#include "mvc/grid.hpp"

namespace mvc {

// Total probability mass reserved for uniform exploration.
constexpr double kExplorationMass = 0.064;

struct ImportanceSample {
  int voxel = -1;          // global voxel index
  int support_pos = -1;    // position within the support array
  double ratio = 0.0;      // r_j = q_j / k_j
  std::vector<double> k;   // sampling distribution, aligned with support
};

// k over the support; eps = 0.064 / |support|.
std::vector<double> importance_distribution(const VoxelDistribution& dist);

// Inverse-CDF draw from k over the (sorted) support. Deterministic given
// the generator state.
ImportanceSample sample_voxel(const VoxelDistribution& dist,
                              std::mt19937_64& rng);

// Child generator for a worker, derived from (seed, stream id).
std::mt19937_64 child_rng(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) with the full 53-bit mantissa.
inline double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

}  // namespace mvc
