#pragma once

#include <vector>

#include "core/preprocess.hpp"
#include "core/types.hpp"

namespace sfrd {

// Everything needed to map a frame's normalized UVD joints back to camera-space
// millimeters: the sensor intrinsics, the normalization cube, and the sensor
// rectangle the crop was resampled from.
struct FrameGeometry {
  CameraIntrinsics intrinsics;
  NormalizationCube cube;
  CropGeometry crop;

  void validate() const;
};

using JointSetXYZ = std::vector<Vec3>;  // millimeters, camera space

Vec3 uvd_to_xyz(const JointUVD& joint, const FrameGeometry& geometry);
JointSetXYZ uvd_to_xyz(const JointSetUVD& joints, const FrameGeometry& geometry);

JointUVD xyz_to_uvd(const Vec3& xyz_mm, const FrameGeometry& geometry);
JointSetUVD xyz_to_uvd(const JointSetXYZ& joints_mm, const FrameGeometry& geometry);

struct MeanErrorReport {
  std::vector<double> per_joint_mm;  // mean Euclidean distance per joint index
  double overall_mm = 0.0;           // mean of the per-joint means
};

// Aligned per-frame joint sets; every frame must have the same joint count.
MeanErrorReport mean_3d_error(const std::vector<JointSetXYZ>& preds,
                              const std::vector<JointSetXYZ>& gts);

// Fraction of frames whose maximum per-joint error is strictly below each
// threshold. Thresholds must be sorted ascending; the output is non-decreasing.
std::vector<double> frames_under_threshold(const std::vector<JointSetXYZ>& preds,
                                           const std::vector<JointSetXYZ>& gts,
                                           const std::vector<double>& thresholds_mm);

// 0, 1, ..., 80 millimeters.
std::vector<double> default_thresholds_mm();

}  // namespace sfrd
