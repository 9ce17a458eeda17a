#pragma once

#include <vector>

#include "core/error.hpp"
#include "core/grid.hpp"

namespace sfrd {

struct UV {
  double u = 0.0;
  double v = 0.0;
};

struct JointUVD {
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Normalized plane coordinates of the center of pixel (i, k) on an n x n
// grid: u follows columns, v follows rows, centers sit at (index + 0.5) / n.
// Every module uses this one convention.
UV pixel_center(int i, int k, int n);

// Square depth image normalized to [0, 1]. Zero marks background; on-hand
// pixels are strictly positive.
struct DepthFrame {
  Grid values;
  int resolution = 0;

  void validate() const;
};

// Per-joint normalized coordinates: plane (u, v) plus camera-axis depth d,
// all in [0, 1]. The joint count is fixed per dataset configuration.
struct JointSetUVD {
  std::vector<JointUVD> joints;

  int count() const { return static_cast<int>(joints.size()); }
  void validate() const;
};

// Nonnegative grid summing to one whose center of mass encodes a joint's
// plane position.
struct Heatmap {
  Grid values;

  void validate() const;
};

// Signed depth offsets (joint depth minus surface depth), nonzero only where
// the paired heatmap has support and the mask is on.
struct DepthOffsetMap {
  Grid values;

  void validate(const Heatmap& paired, const Grid& mask) const;
};

// Binary grid marking on-hand pixels: 1 exactly where the paired frame has a
// positive depth.
struct MaskMatrix {
  Grid values;

  void validate() const;
  void validate_against(const DepthFrame& frame) const;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  void validate() const;
};

// Fixed-size axis-aligned cube in camera space used to crop and normalize
// depth values.
struct NormalizationCube {
  Vec3 center_mm;
  double edge_mm = 0.0;

  void validate() const;
};

// Continuous sensor-pixel coordinates; pixel (r, c) covers [c, c+1) x [r, r+1)
// with its center at (c + 0.5, r + 0.5).
struct PixelXY {
  double x = 0.0;
  double y = 0.0;
};

PixelXY project(const Vec3& p_mm, const CameraIntrinsics& intr);
Vec3 backproject(double px, double py, double z_mm, const CameraIntrinsics& intr);

// Tolerance on a heatmap's unit-sum invariant. Encoder outputs stay orders of
// magnitude inside it.
inline constexpr double kHeatmapSumTolerance = 1e-9;

}  // namespace sfrd
