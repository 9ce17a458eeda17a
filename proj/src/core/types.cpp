#include "core/types.hpp"

#include <cmath>
#include <string>

namespace sfrd {

UV pixel_center(int i, int k, int n) {
  if (n <= 0) throw ContractError("pixel_center: resolution must be positive");
  if (i < 0 || i >= n || k < 0 || k >= n) {
    throw ContractError("pixel_center: index (" + std::to_string(i) + ", " +
                        std::to_string(k) + ") out of range for n=" +
                        std::to_string(n));
  }
  return UV{(static_cast<double>(k) + 0.5) / n,
            (static_cast<double>(i) + 0.5) / n};
}

void DepthFrame::validate() const {
  if (resolution <= 0) throw ContractError("DepthFrame: resolution must be positive");
  if (!values.is_square(resolution)) {
    throw ContractError("DepthFrame: grid is not " + std::to_string(resolution) +
                        "x" + std::to_string(resolution));
  }
  for (double v : values.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractError("DepthFrame: value " + std::to_string(v) +
                          " outside [0, 1]");
    }
  }
}

void JointSetUVD::validate() const {
  if (joints.empty()) throw ContractError("JointSetUVD: at least one joint required");
  for (const JointUVD& j : joints) {
    if (!(j.u >= 0.0 && j.u <= 1.0 && j.v >= 0.0 && j.v <= 1.0)) {
      throw ContractError("JointSetUVD: plane coordinate outside [0, 1]");
    }
    if (!(j.d >= 0.0 && j.d <= 1.0)) {
      throw ContractError("JointSetUVD: depth coordinate outside [0, 1]");
    }
  }
}

void Heatmap::validate() const {
  if (values.empty() || values.rows() != values.cols()) {
    throw ContractError("Heatmap: grid must be square and non-empty");
  }
  for (double v : values.data()) {
    if (!(v >= 0.0)) throw ContractError("Heatmap: negative entry");
  }
  double total = values.sum();
  if (std::abs(total - 1.0) > kHeatmapSumTolerance) {
    throw ContractError("Heatmap: entries sum to " + std::to_string(total) +
                        ", expected 1");
  }
}

void DepthOffsetMap::validate(const Heatmap& paired, const Grid& mask) const {
  if (!values.same_shape(paired.values) || !values.same_shape(mask)) {
    throw ContractError("DepthOffsetMap: shape mismatch with paired grids");
  }
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c) {
      if (values(r, c) != 0.0 &&
          (paired.values(r, c) == 0.0 || mask(r, c) == 0.0)) {
        throw ContractError("DepthOffsetMap: nonzero entry outside support");
      }
    }
  }
}

void MaskMatrix::validate() const {
  for (double v : values.data()) {
    if (v != 0.0 && v != 1.0) {
      throw ContractError("MaskMatrix: entry not in {0, 1}");
    }
  }
}

void MaskMatrix::validate_against(const DepthFrame& frame) const {
  validate();
  if (!values.same_shape(frame.values)) {
    throw ContractError("MaskMatrix: shape mismatch with frame");
  }
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c) {
      bool on_hand = frame.values(r, c) > 0.0;
      if ((values(r, c) == 1.0) != on_hand) {
        throw ContractError("MaskMatrix: disagrees with frame at (" +
                            std::to_string(r) + ", " + std::to_string(c) + ")");
      }
    }
  }
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ContractError("CameraIntrinsics: focal lengths must be positive");
  }
}

void NormalizationCube::validate() const {
  if (!(edge_mm > 0.0)) {
    throw ContractError("NormalizationCube: edge must be positive");
  }
}

PixelXY project(const Vec3& p_mm, const CameraIntrinsics& intr) {
  intr.validate();
  if (!(p_mm.z > 0.0)) {
    throw ContractError("project: point must lie in front of the camera");
  }
  return PixelXY{intr.fx * p_mm.x / p_mm.z + intr.cx,
                 intr.fy * p_mm.y / p_mm.z + intr.cy};
}

Vec3 backproject(double px, double py, double z_mm, const CameraIntrinsics& intr) {
  intr.validate();
  return Vec3{(px - intr.cx) * z_mm / intr.fx, (py - intr.cy) * z_mm / intr.fy,
              z_mm};
}

}  // namespace sfrd
