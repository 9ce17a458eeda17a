#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace sfrd {

struct SynthSpec {
  int joint_count = 2;
  int resolution = 32;
  int blob_radius = 4;  // pixels
  double depth_near = 0.25;
  double depth_far = 0.75;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  DepthFrame frame;
  JointSetUVD joints;
  std::uint64_t seed = 0;
};

// Renders joint_count disks of jittered surface depth onto an empty frame;
// overlaps keep the nearer surface. Each joint's true depth is offset from
// its surface depth by up to 10% of the depth range, so depth decoding
// genuinely exercises the offset representation. Joints are placed at least
// max(4.5 px, 7.5% of the side) from the borders, which keeps them interior
// for a size-7 kernel even after one 2x downsampling. Deterministic per seed.
Scene generate_scene(const SynthSpec& spec);

struct Corpus {
  std::vector<Scene> scenes;
};

// count independent scenes under per-scene seeds derived with splitmix64.
Corpus generate_corpus(const SynthSpec& spec, int count);

// Seed of scene `index` in a corpus with the given base seed.
std::uint64_t derive_scene_seed(std::uint64_t base_seed, int index);

}  // namespace sfrd
