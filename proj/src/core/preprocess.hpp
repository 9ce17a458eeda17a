#pragma once

#include <cstdint>
#include <span>

#include "core/types.hpp"

namespace sfrd {

// Raw sensor frame: depth in millimeters, zero marks invalid or background.
struct RawFrame {
  Grid depth_mm;
  CameraIntrinsics intrinsics;

  void validate() const;
};

struct PreprocessConfig {
  int input_size = 128;              // m
  int repr_size = 64;                // n
  double cube_edge_mm = 250.0;
  double rotation_range_deg = 30.0;
  double background_threshold_mm = 150.0;
  double bbox_margin_mm = 25.0;

  void validate() const;
};

// Zeroes pixels outside the joints' bounding box (grown by bbox_margin in x/y)
// or deeper than background_threshold past the joints' depth range.
RawFrame remove_background(const RawFrame& raw, std::span<const Vec3> joints_xyz_mm,
                           const PreprocessConfig& cfg);

// Sensor-pixel rectangle a crop was resampled from.
struct CropGeometry {
  double u0 = 0.0;
  double v0 = 0.0;
  double u_size = 0.0;
  double v_size = 0.0;
};

// Cube of the given edge centered on the mean of the on-hand pixels
// back-projected to camera space.
NormalizationCube com_cube(const RawFrame& raw, double edge_mm);

struct CropResult {
  DepthFrame frame;
  NormalizationCube cube;
  CropGeometry geometry;
};

// Resamples the cube's pixel footprint to input_size x input_size with
// nearest-neighbor lookup and maps depths affinely: cube front face to 0,
// back face to 1, anything outside the cube (and background) to exactly 0.
CropResult crop_normalize(const RawFrame& raw, const NormalizationCube& cube,
                          const PreprocessConfig& cfg);

// Nearest-neighbor decimation taking the top-left sample of each block;
// requires the input resolution to be divisible by repr_size.
DepthFrame downsample_repr(const DepthFrame& frame, int repr_size);

struct RotateResult {
  DepthFrame frame;
  JointSetUVD joints;
};

// Rotates the frame about the image center with nearest-neighbor sampling
// (background fill 0) and the joints' plane coordinates about (0.5, 0.5) by
// the same angle; depths are untouched. Multiples of 90 degrees permute the
// grid exactly.
RotateResult rotate_augment(const DepthFrame& frame, const JointSetUVD& joints,
                            double angle_deg);

// Seeded draw from [-range, range] for augmentation.
double random_rotation_angle(std::uint64_t seed, double range_deg);

}  // namespace sfrd
