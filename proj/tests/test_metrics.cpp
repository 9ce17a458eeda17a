#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/metrics.hpp"
#include "core/rng.hpp"

using namespace sfrd;

namespace {

FrameGeometry test_geometry() {
  FrameGeometry g;
  g.intrinsics = CameraIntrinsics{588.0, 588.0, 64.0, 64.0};
  g.cube = NormalizationCube{Vec3{10.0, -20.0, 400.0}, 250.0};
  g.crop = CropGeometry{30.0, 40.0, 70.0, 60.0};
  return g;
}

// Brute-force oracles, written independently of the library internals.
double oracle_joint_mean(const std::vector<JointSetXYZ>& preds,
                         const std::vector<JointSetXYZ>& gts, int joint) {
  double acc = 0.0;
  for (std::size_t f = 0; f < preds.size(); ++f) {
    double dx = preds[f][joint].x - gts[f][joint].x;
    double dy = preds[f][joint].y - gts[f][joint].y;
    double dz = preds[f][joint].z - gts[f][joint].z;
    acc += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return acc / preds.size();
}

double oracle_fraction_under(const std::vector<JointSetXYZ>& preds,
                             const std::vector<JointSetXYZ>& gts, double t) {
  int count = 0;
  for (std::size_t f = 0; f < preds.size(); ++f) {
    double worst = 0.0;
    for (std::size_t j = 0; j < preds[f].size(); ++j) {
      double dx = preds[f][j].x - gts[f][j].x;
      double dy = preds[f][j].y - gts[f][j].y;
      double dz = preds[f][j].z - gts[f][j].z;
      worst = std::max(worst, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    if (worst < t) ++count;
  }
  return static_cast<double>(count) / preds.size();
}

}  // namespace

TEST_CASE("uvd and xyz conversions invert each other through the geometry") {
  FrameGeometry g = test_geometry();
  g.validate();
  JointUVD uvd{0.3, 0.7, 0.4};
  Vec3 xyz = uvd_to_xyz(uvd, g);
  // u maps through the crop rectangle to a sensor pixel, then backprojects
  double px = g.crop.u0 + uvd.u * g.crop.u_size;  // 30 + 21 = 51
  double z = g.cube.center_mm.z - g.cube.edge_mm / 2 + uvd.d * g.cube.edge_mm;
  CHECK(z == doctest::Approx(375.0).epsilon(1e-15));
  CHECK(xyz.z == doctest::Approx(z).epsilon(1e-15));
  CHECK(xyz.x == doctest::Approx((px - 64.0) * z / 588.0).epsilon(1e-12));

  JointUVD back = xyz_to_uvd(xyz, g);
  CHECK(back.u == doctest::Approx(uvd.u).epsilon(1e-12));
  CHECK(back.v == doctest::Approx(uvd.v).epsilon(1e-12));
  CHECK(back.d == doctest::Approx(uvd.d).epsilon(1e-12));

  JointSetUVD set{{uvd, JointUVD{0.5, 0.5, 0.5}}};
  JointSetXYZ set_xyz = uvd_to_xyz(set, g);
  JointSetUVD roundtrip = xyz_to_uvd(set_xyz, g);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::fabs(roundtrip.joints[j].u - set.joints[j].u) < 1e-12);
    CHECK(std::fabs(roundtrip.joints[j].d - set.joints[j].d) < 1e-12);
  }
}

TEST_CASE("hand-computed mean error and threshold fractions") {
  // one frame, two joints: displacement (3,4,0) -> 5mm and (0,0,2) -> 2mm
  std::vector<JointSetXYZ> gts{{Vec3{0, 0, 400}, Vec3{50, 50, 420}}};
  std::vector<JointSetXYZ> preds{{Vec3{3, 4, 400}, Vec3{50, 50, 422}}};
  MeanErrorReport report = mean_3d_error(preds, gts);
  REQUIRE(report.per_joint_mm.size() == 2);
  CHECK(report.per_joint_mm[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(report.per_joint_mm[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(report.overall_mm == doctest::Approx(3.5).epsilon(1e-12));

  // worst joint error is 5mm; the comparison is strict
  std::vector<double> fr = frames_under_threshold(preds, gts, {2.0, 5.0, 5.0001});
  CHECK(fr[0] == 0.0);
  CHECK(fr[1] == 0.0);
  CHECK(fr[2] == 1.0);
}

TEST_CASE("identical predictions give zero error and a full curve above zero") {
  std::vector<JointSetXYZ> gts{{Vec3{1, 2, 3}}, {Vec3{-4, 0, 9}}};
  MeanErrorReport report = mean_3d_error(gts, gts);
  CHECK(report.overall_mm == 0.0);
  std::vector<double> fr = frames_under_threshold(gts, gts, {0.0, 1e-9, 10.0});
  CHECK(fr[0] == 0.0);  // strict comparison at exactly zero error
  CHECK(fr[1] == 1.0);
  CHECK(fr[2] == 1.0);
}

TEST_CASE("metrics match brute-force oracles on random frames") {
  Rng rng(61);
  const int frames = 100;
  const int joints = 5;
  std::vector<JointSetXYZ> preds(frames), gts(frames);
  for (int f = 0; f < frames; ++f) {
    for (int j = 0; j < joints; ++j) {
      Vec3 gt{rng.uniform(-100, 100), rng.uniform(-100, 100),
              rng.uniform(300, 500)};
      gts[f].push_back(gt);
      preds[f].push_back(Vec3{gt.x + rng.uniform(-30, 30),
                              gt.y + rng.uniform(-30, 30),
                              gt.z + rng.uniform(-30, 30)});
    }
  }
  MeanErrorReport report = mean_3d_error(preds, gts);
  double overall_acc = 0.0;
  for (int j = 0; j < joints; ++j) {
    double expected = oracle_joint_mean(preds, gts, j);
    CHECK(std::fabs(report.per_joint_mm[j] - expected) < 1e-9);
    overall_acc += expected;
  }
  CHECK(std::fabs(report.overall_mm - overall_acc / joints) < 1e-9);

  std::vector<double> thresholds = default_thresholds_mm();
  REQUIRE(thresholds.size() == 81);
  CHECK(thresholds.front() == 0.0);
  CHECK(thresholds.back() == 80.0);
  std::vector<double> fr = frames_under_threshold(preds, gts, thresholds);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    CHECK(std::fabs(fr[i] - oracle_fraction_under(preds, gts, thresholds[i])) <
          1e-9);
    CHECK(fr[i] >= 0.0);
    CHECK(fr[i] <= 1.0);
    if (i > 0) CHECK(fr[i] >= fr[i - 1]);  // monotone non-decreasing
  }
}

TEST_CASE("shape violations are rejected") {
  std::vector<JointSetXYZ> two{{Vec3{}, Vec3{}}};
  std::vector<JointSetXYZ> three{{Vec3{}, Vec3{}, Vec3{}}};
  CHECK_THROWS_AS(mean_3d_error(two, three), ContractError);
  CHECK_THROWS_AS(mean_3d_error({}, {}), ContractError);
  std::vector<JointSetXYZ> ragged{{Vec3{}, Vec3{}}, {Vec3{}}};
  std::vector<JointSetXYZ> paired{{Vec3{}, Vec3{}}, {Vec3{}, Vec3{}}};
  CHECK_THROWS_AS(mean_3d_error(ragged, paired), ContractError);
  CHECK_THROWS_AS(frames_under_threshold(two, two, {5.0, 3.0}), ContractError);
}

TEST_CASE("geometry validation guards the conversion inputs") {
  FrameGeometry g = test_geometry();
  g.crop.u_size = 0.0;
  CHECK_THROWS_AS(g.validate(), ContractError);
  g = test_geometry();
  g.cube.edge_mm = -1.0;
  CHECK_THROWS_AS(g.validate(), ContractError);
}
