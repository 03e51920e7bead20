#include "mvc/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace mvc {

std::vector<double> importance_distribution(const VoxelDistribution& dist) {
  const std::size_t V = dist.support.size();
  if (V == 0) throw EmptySupport("importance_distribution: empty support");
  const double eps = kExplorationMass / static_cast<double>(V);
  const double shrink = 1.0 - kExplorationMass;  // 1 - V*eps
  std::vector<double> k(V);
  for (std::size_t s = 0; s < V; ++s)
    k[s] = dist.q[static_cast<std::size_t>(dist.support[s])] * shrink + eps;
  return k;
}

ImportanceSample sample_voxel(const VoxelDistribution& dist,
                              std::mt19937_64& rng) {
  ImportanceSample sample;
  sample.k = importance_distribution(dist);
  std::vector<double> cdf(sample.k.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < sample.k.size(); ++s) {
    acc += sample.k[s];
    cdf[s] = acc;
  }
  const double u = uniform01(rng) * acc;
  const std::size_t pos = static_cast<std::size_t>(
      std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  const std::size_t s = std::min(pos, sample.k.size() - 1);
  sample.support_pos = static_cast<int>(s);
  sample.voxel = dist.support[s];
  sample.ratio =
      dist.q[static_cast<std::size_t>(sample.voxel)] / sample.k[s];
  return sample;
}

std::mt19937_64 child_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the pair; decorrelates adjacent streams.
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + stream + 1;
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return std::mt19937_64(mix(mix(x)));
}

}  // namespace mvc
