#include "core/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace sfrd {

namespace {

constexpr double kMinMarginPx = 4.5;
constexpr double kMarginFraction = 0.075;
constexpr double kSurfaceJitterFraction = 0.02;  // of the depth range
constexpr double kJointOffsetFraction = 0.10;
constexpr double kMinRenderedDepth = 1e-3;

}  // namespace

void SynthSpec::validate() const {
  if (joint_count < 1) throw ContractError("SynthSpec: joint_count must be >= 1");
  if (resolution < 8) throw ContractError("SynthSpec: resolution must be >= 8");
  if (blob_radius < 1 || blob_radius > resolution / 4)
    throw ContractError("SynthSpec: blob_radius must be in [1, resolution/4]");
  if (!(depth_near > 0.0 && depth_near < depth_far && depth_far <= 1.0))
    throw ContractError("SynthSpec: need 0 < depth_near < depth_far <= 1");
}

Scene generate_scene(const SynthSpec& spec) {
  spec.validate();
  const int n = spec.resolution;
  const double margin_px = std::max(kMinMarginPx, kMarginFraction * n);
  const double lo = margin_px / n;
  const double hi = 1.0 - margin_px / n;
  if (!(lo < hi)) throw ContractError("SynthSpec: resolution too small for placement margin");
  const double range = spec.depth_far - spec.depth_near;

  Rng rng(spec.seed);
  Scene scene;
  scene.seed = spec.seed;
  scene.frame.resolution = n;
  scene.frame.values = Grid::square(n);
  scene.joints.joints.reserve(static_cast<std::size_t>(spec.joint_count));

  for (int j = 0; j < spec.joint_count; ++j) {
    const double u = rng.uniform(lo, hi);
    const double v = rng.uniform(lo, hi);
    const double surface = rng.uniform(spec.depth_near, spec.depth_far);
    const double offset = rng.uniform(-kJointOffsetFraction * range, kJointOffsetFraction * range);
    const double joint_depth =
        std::clamp(surface + offset, spec.depth_near, spec.depth_far);
    scene.joints.joints.push_back(JointUVD{u, v, joint_depth});

    // Disk of jittered surface depth; overlaps keep the nearer value.
    const double cx = u * n - 0.5;  // column index space
    const double cy = v * n - 0.5;  // row index space
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - spec.blob_radius)));
    const int r1 = std::min(n - 1, static_cast<int>(std::ceil(cy + spec.blob_radius)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - spec.blob_radius)));
    const int c1 = std::min(n - 1, static_cast<int>(std::ceil(cx + spec.blob_radius)));
    const double rad2 = static_cast<double>(spec.blob_radius) * spec.blob_radius;
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double jitter = rng.uniform(-kSurfaceJitterFraction * range,
                                          kSurfaceJitterFraction * range);
        const double dy = r - cy;
        const double dx = c - cx;
        if (dy * dy + dx * dx > rad2) continue;
        const double depth = std::clamp(surface + jitter, kMinRenderedDepth, 1.0);
        double& cell = scene.frame.values(r, c);
        cell = (cell == 0.0) ? depth : std::min(cell, depth);
      }
    }
  }

  scene.frame.validate();
  scene.joints.validate();
  return scene;
}

std::uint64_t derive_scene_seed(std::uint64_t base_seed, int index) {
  if (index < 0) throw ContractError("derive_scene_seed: index must be >= 0");
  return splitmix64(base_seed +
                    0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1));
}

Corpus generate_corpus(const SynthSpec& spec, int count) {
  if (count < 1) throw ContractError("generate_corpus: count must be >= 1");
  spec.validate();
  Corpus corpus;
  corpus.scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SynthSpec scene_spec = spec;
    scene_spec.seed = derive_scene_seed(spec.seed, i);
    corpus.scenes.push_back(generate_scene(scene_spec));
  }
  return corpus;
}

}  // namespace sfrd
