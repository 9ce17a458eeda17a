#include "core/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/rng.hpp"

namespace sfrd {

void RawFrame::validate() const {
  intrinsics.validate();
  if (depth_mm.empty()) throw ContractError("RawFrame: empty depth grid");
  for (double v : depth_mm.data()) {
    if (!(v >= 0.0)) throw ContractError("RawFrame: negative depth");
  }
}

void PreprocessConfig::validate() const {
  if (input_size <= 0 || repr_size <= 0 || input_size <= repr_size) {
    throw ContractError("PreprocessConfig: require input_size > repr_size > 0");
  }
  if (!(cube_edge_mm > 0.0)) {
    throw ContractError("PreprocessConfig: cube edge must be positive");
  }
  if (rotation_range_deg < 0.0) {
    throw ContractError("PreprocessConfig: rotation range must be nonnegative");
  }
}

RawFrame remove_background(const RawFrame& raw, std::span<const Vec3> joints_xyz_mm,
                           const PreprocessConfig& cfg) {
  raw.validate();
  if (joints_xyz_mm.empty()) {
    throw ContractError("remove_background: at least one joint required");
  }
  double min_x = joints_xyz_mm[0].x, max_x = joints_xyz_mm[0].x;
  double min_y = joints_xyz_mm[0].y, max_y = joints_xyz_mm[0].y;
  double min_z = joints_xyz_mm[0].z, max_z = joints_xyz_mm[0].z;
  for (const Vec3& j : joints_xyz_mm) {
    min_x = std::min(min_x, j.x);
    max_x = std::max(max_x, j.x);
    min_y = std::min(min_y, j.y);
    max_y = std::max(max_y, j.y);
    min_z = std::min(min_z, j.z);
    max_z = std::max(max_z, j.z);
  }
  min_x -= cfg.bbox_margin_mm;
  max_x += cfg.bbox_margin_mm;
  min_y -= cfg.bbox_margin_mm;
  max_y += cfg.bbox_margin_mm;
  min_z -= cfg.background_threshold_mm;
  max_z += cfg.background_threshold_mm;

  RawFrame out = raw;
  int survivors = 0;
  for (int r = 0; r < raw.depth_mm.rows(); ++r) {
    for (int c = 0; c < raw.depth_mm.cols(); ++c) {
      double z = raw.depth_mm(r, c);
      if (z <= 0.0) continue;
      Vec3 p = backproject(c + 0.5, r + 0.5, z, raw.intrinsics);
      bool keep = p.x >= min_x && p.x <= max_x && p.y >= min_y &&
                  p.y <= max_y && z >= min_z && z <= max_z;
      if (keep) {
        ++survivors;
      } else {
        out.depth_mm(r, c) = 0.0;
      }
    }
  }
  if (survivors == 0) {
    throw EmptyHandError("remove_background: no pixels left inside the joint box");
  }
  return out;
}

NormalizationCube com_cube(const RawFrame& raw, double edge_mm) {
  raw.validate();
  if (!(edge_mm > 0.0)) throw ContractError("com_cube: edge must be positive");
  Vec3 acc;
  int count = 0;
  for (int r = 0; r < raw.depth_mm.rows(); ++r) {
    for (int c = 0; c < raw.depth_mm.cols(); ++c) {
      double z = raw.depth_mm(r, c);
      if (z <= 0.0) continue;
      Vec3 p = backproject(c + 0.5, r + 0.5, z, raw.intrinsics);
      acc.x += p.x;
      acc.y += p.y;
      acc.z += p.z;
      ++count;
    }
  }
  if (count == 0) {
    throw EmptyHandError("com_cube: frame has no on-hand pixels");
  }
  return NormalizationCube{
      Vec3{acc.x / count, acc.y / count, acc.z / count}, edge_mm};
}

CropResult crop_normalize(const RawFrame& raw, const NormalizationCube& cube,
                          const PreprocessConfig& cfg) {
  raw.validate();
  cube.validate();
  cfg.validate();
  if (!(cube.center_mm.z > 0.0)) {
    throw ContractError("crop_normalize: cube center must be in front of the camera");
  }

  const int m = cfg.input_size;
  const double front = cube.center_mm.z - cube.edge_mm / 2.0;
  const double back = cube.center_mm.z + cube.edge_mm / 2.0;
  PixelXY center_px = project(cube.center_mm, raw.intrinsics);
  const double half_u = (cube.edge_mm / 2.0) * raw.intrinsics.fx / cube.center_mm.z;
  const double half_v = (cube.edge_mm / 2.0) * raw.intrinsics.fy / cube.center_mm.z;
  CropGeometry geom{center_px.x - half_u, center_px.y - half_v, 2.0 * half_u,
                    2.0 * half_v};

  DepthFrame frame{Grid::square(m), m};
  int on_hand = 0;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      double src_x = geom.u0 + (c + 0.5) * geom.u_size / m;
      double src_y = geom.v0 + (r + 0.5) * geom.v_size / m;
      int sc = static_cast<int>(std::floor(src_x));
      int sr = static_cast<int>(std::floor(src_y));
      if (sr < 0 || sr >= raw.depth_mm.rows() || sc < 0 ||
          sc >= raw.depth_mm.cols()) {
        continue;
      }
      double z = raw.depth_mm(sr, sc);
      if (z <= front || z > back) continue;  // background or outside the cube
      frame.values(r, c) = (z - front) / cube.edge_mm;
      ++on_hand;
    }
  }
  if (on_hand == 0) {
    throw EmptyCropError("crop_normalize: no on-hand pixels inside the cube");
  }
  return CropResult{std::move(frame), cube, geom};
}

DepthFrame downsample_repr(const DepthFrame& frame, int repr_size) {
  frame.validate();
  if (repr_size <= 0 || frame.resolution % repr_size != 0) {
    throw ContractError("downsample_repr: resolution not divisible by repr_size");
  }
  const int stride = frame.resolution / repr_size;
  DepthFrame out{Grid::square(repr_size), repr_size};
  for (int r = 0; r < repr_size; ++r) {
    for (int c = 0; c < repr_size; ++c) {
      out.values(r, c) = frame.values(r * stride, c * stride);
    }
  }
  return out;
}

RotateResult rotate_augment(const DepthFrame& frame, const JointSetUVD& joints,
                            double angle_deg) {
  frame.validate();
  joints.validate();
  const int n = frame.resolution;
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double cos_a = std::cos(rad);
  const double sin_a = std::sin(rad);

  // Inverse mapping: each output pixel center pulled back by -angle.
  RotateResult out{DepthFrame{Grid::square(n), n}, JointSetUVD{}};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double du = (c + 0.5) / n - 0.5;
      double dv = (r + 0.5) / n - 0.5;
      double su = 0.5 + cos_a * du + sin_a * dv;
      double sv = 0.5 - sin_a * du + cos_a * dv;
      int sc = static_cast<int>(std::floor(su * n));
      int sr = static_cast<int>(std::floor(sv * n));
      if (sr < 0 || sr >= n || sc < 0 || sc >= n) continue;  // fill 0
      out.frame.values(r, c) = frame.values(sr, sc);
    }
  }
  out.joints.joints.reserve(joints.joints.size());
  for (const JointUVD& j : joints.joints) {
    double du = j.u - 0.5;
    double dv = j.v - 0.5;
    out.joints.joints.push_back(JointUVD{0.5 + cos_a * du - sin_a * dv,
                                         0.5 + sin_a * du + cos_a * dv, j.d});
  }
  return out;
}

double random_rotation_angle(std::uint64_t seed, double range_deg) {
  if (range_deg < 0.0) {
    throw ContractError("random_rotation_angle: range must be nonnegative");
  }
  Rng rng(splitmix64(seed));
  return rng.uniform(-range_deg, range_deg);
}

}  // namespace sfrd
