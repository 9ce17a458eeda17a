#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/losses.hpp"
#include "core/synthdata.hpp"

using namespace sfrd;

namespace {

SynthSpec fit_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.resolution = 12;
  spec.joint_count = 2;
  spec.blob_radius = 2;
  spec.seed = seed;
  return spec;
}

double max_coord_error(const JointSetUVD& decoded, const JointSetUVD& target) {
  double worst = 0.0;
  for (std::size_t j = 0; j < decoded.joints.size(); ++j) {
    worst = std::max(worst, std::fabs(decoded.joints[j].u - target.joints[j].u));
    worst = std::max(worst, std::fabs(decoded.joints[j].v - target.joints[j].v));
    worst = std::max(worst, std::fabs(decoded.joints[j].d - target.joints[j].d));
  }
  return worst;
}

}  // namespace

TEST_CASE("fit is deterministic for a fixed seed") {
  Scene scene = generate_scene(fit_spec(5));
  FitConfig cfg;
  cfg.max_iters = 120;
  cfg.seed = 77;
  const GaussKernel kernel = GaussKernel::make(7);
  FitResult a = fit_representation(scene.joints, scene.frame, cfg,
                                   LossWeights{1.0, 1.0}, kernel);
  FitResult b = fit_representation(scene.joints, scene.frame, cfg,
                                   LossWeights{1.0, 1.0}, kernel);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].total == b.trace[i].total);  // bitwise
  }
  for (std::size_t j = 0; j < a.heatmaps.size(); ++j) {
    CHECK(a.heatmaps[j].values == b.heatmaps[j].values);
    CHECK(a.offset_maps[j].values == b.offset_maps[j].values);
  }
  CHECK(a.decoded.joints.size() == b.decoded.joints.size());

  cfg.seed = 78;  // different start, different trajectory
  FitResult c = fit_representation(scene.joints, scene.frame, cfg,
                                   LossWeights{1.0, 1.0}, kernel);
  CHECK(a.trace.front().total != c.trace.front().total);
}

TEST_CASE("trace has max_iters + 1 rows with sequential iteration ids") {
  Scene scene = generate_scene(fit_spec(8));
  FitConfig cfg;
  cfg.max_iters = 37;
  FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, GaussKernel::make(7));
  REQUIRE(res.trace.size() == 38);
  for (int i = 0; i <= 37; ++i) CHECK(res.trace[i].iteration == i);
  CHECK(res.trace.back().total <= res.trace.front().total);
}

TEST_CASE("a zero step size leaves the objective unchanged") {
  Scene scene = generate_scene(fit_spec(9));
  FitConfig cfg;
  cfg.step_size = 0.0;
  cfg.max_iters = 10;
  FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, GaussKernel::make(7));
  for (const FitTraceRow& row : res.trace) {
    CHECK(row.total == res.trace.front().total);
  }
}

TEST_CASE("an oversized step raises the divergence error") {
  Scene scene = generate_scene(fit_spec(10));
  FitConfig cfg;
  cfg.step_size = 50000.0;
  cfg.max_iters = 500;
  CHECK_THROWS_AS(fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, GaussKernel::make(7)),
                  DivergenceError);
}

TEST_CASE("traces stay non-increasing below the stability bound") {
  // The documented bound: below it the full-mode trace is monotone after the
  // first iterations on at least 95 of 100 seeded scenes. Run at the default
  // step, which sits under the bound.
  REQUIRE(FitConfig::kDefaultFitStepSize < FitConfig::kStabilityBound);
  const GaussKernel kernel = GaussKernel::make(7);
  int monotone = 0;
  for (int s = 0; s < 100; ++s) {
    Scene scene = generate_scene(fit_spec(5000 + s));
    FitConfig cfg;
    cfg.max_iters = 300;
    cfg.seed = 5000 + s;
    FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                       LossWeights{1.0, 1.0}, kernel);
    bool ok = true;
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      double prev = res.trace[i - 1].total;
      if (res.trace[i].total > prev + 1e-12 * std::max(1.0, prev)) {
        ok = false;
        break;
      }
    }
    monotone += ok ? 1 : 0;
  }
  CHECK(monotone >= 95);
}

TEST_CASE("full mode reaches the coordinate gate on a synthetic scene") {
  Scene scene = generate_scene(fit_spec(1003));
  FitConfig cfg;
  cfg.max_iters = 2000;
  cfg.seed = 1003;
  FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, GaussKernel::make(7));
  CHECK(max_coord_error(res.decoded, scene.joints) < 1e-3);
}

TEST_CASE("representation_unsupervised drives coordinates to the target while heatmaps drift") {
  Scene scene = generate_scene(fit_spec(1004));
  FitConfig cfg;
  cfg.mode = FitMode::representation_unsupervised;
  cfg.max_iters = 2000;
  cfg.seed = 1004;
  const GaussKernel kernel = GaussKernel::make(7);
  FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, kernel);
  CHECK(max_coord_error(res.decoded, scene.joints) < 1e-3);
  // the fitted heatmaps are not pulled toward the encoder targets
  CHECK(res.trace.back().parts.heatmap > 1e-3);
}

TEST_CASE("coordinate_unsupervised reports its post-hoc decode") {
  Scene scene = generate_scene(fit_spec(1005));
  FitConfig cfg;
  cfg.mode = FitMode::coordinate_unsupervised;
  cfg.max_iters = 500;
  cfg.seed = 1005;
  FitResult res = fit_representation(scene.joints, scene.frame, cfg,
                                     LossWeights{1.0, 1.0}, GaussKernel::make(7));
  // objective excludes the coordinate terms but the decode is still reported
  CHECK(res.trace.back().total <= res.trace.front().total);
  CHECK(res.decoded.joints.size() == scene.joints.joints.size());
  CHECK(max_coord_error(res.decoded, scene.joints) < 0.5);
}

TEST_CASE("fit mode names are stable strings") {
  CHECK(std::string(fit_mode_name(FitMode::full)) == "full");
  CHECK(std::string(fit_mode_name(FitMode::coordinate_unsupervised)) ==
        "coordinate_unsupervised");
  CHECK(std::string(fit_mode_name(FitMode::representation_unsupervised)) ==
        "representation_unsupervised");
}
