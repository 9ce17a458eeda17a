#include "core/metrics.hpp"

#include <cmath>

#include "core/error.hpp"

namespace sfrd {

void FrameGeometry::validate() const {
  intrinsics.validate();
  cube.validate();
  if (!(crop.u_size > 0.0) || !(crop.v_size > 0.0))
    throw ContractError("FrameGeometry: crop extents must be positive");
}

Vec3 uvd_to_xyz(const JointUVD& joint, const FrameGeometry& geometry) {
  geometry.validate();
  const double px = geometry.crop.u0 + joint.u * geometry.crop.u_size;
  const double py = geometry.crop.v0 + joint.v * geometry.crop.v_size;
  const double front = geometry.cube.center_mm.z - geometry.cube.edge_mm / 2.0;
  const double z = front + joint.d * geometry.cube.edge_mm;
  return backproject(px, py, z, geometry.intrinsics);
}

JointSetXYZ uvd_to_xyz(const JointSetUVD& joints, const FrameGeometry& geometry) {
  JointSetXYZ out;
  out.reserve(joints.joints.size());
  for (const JointUVD& j : joints.joints) out.push_back(uvd_to_xyz(j, geometry));
  return out;
}

JointUVD xyz_to_uvd(const Vec3& xyz_mm, const FrameGeometry& geometry) {
  geometry.validate();
  const PixelXY px = project(xyz_mm, geometry.intrinsics);
  const double front = geometry.cube.center_mm.z - geometry.cube.edge_mm / 2.0;
  return JointUVD{(px.x - geometry.crop.u0) / geometry.crop.u_size,
                  (px.y - geometry.crop.v0) / geometry.crop.v_size,
                  (xyz_mm.z - front) / geometry.cube.edge_mm};
}

JointSetUVD xyz_to_uvd(const JointSetXYZ& joints_mm, const FrameGeometry& geometry) {
  JointSetUVD out;
  out.joints.reserve(joints_mm.size());
  for (const Vec3& p : joints_mm) out.joints.push_back(xyz_to_uvd(p, geometry));
  return out;
}

namespace {

double distance_mm(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::size_t checked_joint_count(const std::vector<JointSetXYZ>& preds,
                                const std::vector<JointSetXYZ>& gts) {
  if (preds.empty()) throw ContractError("metrics: need at least one frame");
  if (preds.size() != gts.size())
    throw ContractError("metrics: frame counts differ");
  const std::size_t joints = preds.front().size();
  if (joints == 0) throw ContractError("metrics: need at least one joint");
  for (std::size_t f = 0; f < preds.size(); ++f) {
    if (preds[f].size() != joints || gts[f].size() != joints)
      throw ContractError("metrics: joint counts differ across frames");
  }
  return joints;
}

}  // namespace

MeanErrorReport mean_3d_error(const std::vector<JointSetXYZ>& preds,
                              const std::vector<JointSetXYZ>& gts) {
  const std::size_t joints = checked_joint_count(preds, gts);
  MeanErrorReport report;
  report.per_joint_mm.assign(joints, 0.0);
  for (std::size_t f = 0; f < preds.size(); ++f)
    for (std::size_t j = 0; j < joints; ++j)
      report.per_joint_mm[j] += distance_mm(preds[f][j], gts[f][j]);
  double total = 0.0;
  for (double& e : report.per_joint_mm) {
    e /= static_cast<double>(preds.size());
    total += e;
  }
  report.overall_mm = total / static_cast<double>(joints);
  return report;
}

std::vector<double> frames_under_threshold(const std::vector<JointSetXYZ>& preds,
                                           const std::vector<JointSetXYZ>& gts,
                                           const std::vector<double>& thresholds_mm) {
  const std::size_t joints = checked_joint_count(preds, gts);
  for (std::size_t i = 1; i < thresholds_mm.size(); ++i)
    if (thresholds_mm[i - 1] > thresholds_mm[i])
      throw ContractError("frames_under_threshold: thresholds must be ascending");

  std::vector<double> max_errors;
  max_errors.reserve(preds.size());
  for (std::size_t f = 0; f < preds.size(); ++f) {
    double worst = 0.0;
    for (std::size_t j = 0; j < joints; ++j)
      worst = std::max(worst, distance_mm(preds[f][j], gts[f][j]));
    max_errors.push_back(worst);
  }

  std::vector<double> fractions;
  fractions.reserve(thresholds_mm.size());
  for (double t : thresholds_mm) {
    int hits = 0;
    for (double e : max_errors)
      if (e < t) ++hits;
    fractions.push_back(static_cast<double>(hits) /
                        static_cast<double>(max_errors.size()));
  }
  return fractions;
}

std::vector<double> default_thresholds_mm() {
  std::vector<double> out;
  out.reserve(81);
  for (int t = 0; t <= 80; ++t) out.push_back(static_cast<double>(t));
  return out;
}

}  // namespace sfrd
