#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/depth_codec.hpp"
#include "core/plane_codec.hpp"
#include "core/rng.hpp"
#include "core/synthdata.hpp"

using namespace sfrd;

TEST_CASE("mask is the indicator of positive depth") {
  DepthFrame f{Grid::square(3), 3};
  f.values(0, 1) = 0.2;
  f.values(2, 2) = 0.9;
  MaskMatrix m = build_mask(f);
  CHECK(m.values.sum() == 2.0);
  CHECK(m.values(0, 1) == 1.0);
  CHECK(m.values(2, 2) == 1.0);
  CHECK(m.values(1, 1) == 0.0);
  CHECK_NOTHROW(m.validate_against(f));
}

TEST_CASE("hand-computed 2x2 offset map and its decode") {
  DepthFrame img{Grid::square(2), 2};
  img.values(0, 0) = 0.5;
  img.values(1, 0) = 0.2;
  img.values(1, 1) = 0.3;  // (0,1) stays background
  MaskMatrix m = build_mask(img);

  Heatmap h{Grid::square(2, 0.25)};  // uniform support over the full grid
  const double depth = 0.6;
  DepthOffsetMap d = encode_depth_map(depth, h, img, m);

  // offsets are depth - surface on masked support, zero elsewhere
  CHECK(d.values(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d.values(1, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(d.values(1, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.values(0, 1) == 0.0);

  CHECK(decode_depth(d, h, img, m) == doctest::Approx(depth).epsilon(1e-15));
}

TEST_CASE("decode is the heatmap-weighted mean of recovered depths") {
  DepthFrame img{Grid::square(2), 2};
  img.values(0, 0) = 0.4;
  img.values(0, 1) = 0.8;
  MaskMatrix m = build_mask(img);
  Grid hg = Grid::square(2);
  hg(0, 0) = 0.75;
  hg(0, 1) = 0.25;
  Grid dg = Grid::square(2);
  dg(0, 0) = 0.1;   // recovered 0.5
  dg(0, 1) = -0.2;  // recovered 0.6
  double out = decode_depth(DepthOffsetMap{dg}, Heatmap{hg}, img, m);
  CHECK(out == doctest::Approx(0.75 * 0.5 + 0.25 * 0.6).epsilon(1e-15));
}

TEST_CASE("roundtrip on synthetic scenes is exact to machine precision") {
  SynthSpec spec;
  spec.resolution = 24;
  spec.joint_count = 3;
  spec.blob_radius = 3;
  const GaussKernel g = GaussKernel::make(7);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    Scene scene = generate_scene(spec);
    MaskMatrix m = build_mask(scene.frame);
    for (const JointUVD& j : scene.joints.joints) {
      Heatmap h = encode_heatmap(UV{j.u, j.v}, spec.resolution, g);
      DepthOffsetMap d = encode_depth_map(j.d, h, scene.frame, m);
      CHECK(std::fabs(decode_depth(d, h, scene.frame, m) - j.d) < 1e-12);
    }
  }
}

TEST_CASE("fully off-hand support raises the unsupported-joint error") {
  DepthFrame img{Grid::square(8), 8};
  img.values(1, 1) = 0.5;  // hand only in the top-left corner
  MaskMatrix m = build_mask(img);
  Grid hg = Grid::square(8);
  hg(6, 6) = 1.0;  // support far from the hand
  DepthOffsetMap d{Grid::square(8)};
  CHECK_THROWS_AS(decode_depth(d, Heatmap{hg}, img, m), UnsupportedJointError);
  CHECK_THROWS_AS(decode_depth_jacobian(d, Heatmap{hg}, img, m),
                  UnsupportedJointError);
}

TEST_CASE("offsets are zeroed off the heatmap support and off the mask") {
  DepthFrame img{Grid::square(4), 4};
  for (double& v : img.values.data()) v = 0.5;
  img.values(3, 3) = 0.0;
  MaskMatrix m = build_mask(img);
  Grid hg = Grid::square(4);
  hg(0, 0) = 0.5;
  hg(3, 3) = 0.5;  // support includes a background pixel
  DepthOffsetMap d = encode_depth_map(0.7, Heatmap{hg}, img, m);
  CHECK(d.values(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d.values(3, 3) == 0.0);  // masked out despite heatmap support
  CHECK(d.values(1, 1) == 0.0);  // no heatmap support
  CHECK_NOTHROW(d.validate(Heatmap{hg}, m.values));
}

TEST_CASE("depth jacobian formulas and finite differences agree") {
  Rng rng(5);
  const int n = 6;
  DepthFrame img{Grid::square(n), n};
  for (double& v : img.values.data()) v = rng.uniform(0.1, 0.9);
  img.values(0, 5) = 0.0;
  MaskMatrix m = build_mask(img);

  Grid scores = Grid::square(n);
  for (double& v : scores.data()) v = rng.uniform(0.0, 1.0);
  double total = scores.sum();
  for (double& v : scores.data()) v /= total;
  Heatmap h{scores};
  Grid dg = Grid::square(n);
  for (double& v : dg.data()) v = rng.uniform(-0.2, 0.2);
  DepthOffsetMap d{dg};

  DepthJacobian jac = decode_depth_jacobian(d, h, img, m);
  CHECK(jac.decoded == doctest::Approx(decode_depth(d, h, img, m)).epsilon(1e-15));

  // independent formula check: den = sum(m h), d(out)/d(d_p) = m h / den
  double den = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) den += m.values(r, c) * h.values(r, c);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double expected = m.values(r, c) * h.values(r, c) / den;
      CHECK(jac.wrt_offsets(r, c) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  const double eps = 1e-6;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      DepthOffsetMap dp = d, dm = d;
      dp.values(r, c) += eps;
      dm.values(r, c) -= eps;
      double fd = (decode_depth(dp, h, img, m) - decode_depth(dm, h, img, m)) /
                  (2 * eps);
      CHECK(std::fabs(fd - jac.wrt_offsets(r, c)) < 1e-9);

      Heatmap hp = h, hm = h;
      hp.values(r, c) += eps;
      hm.values(r, c) -= eps;
      fd = (decode_depth(d, hp, img, m) - decode_depth(d, hm, img, m)) / (2 * eps);
      CHECK(std::fabs(fd - jac.wrt_heatmap(r, c)) < 1e-8);
    }
  }
}

TEST_CASE("shape mismatches are rejected up front") {
  DepthFrame img{Grid::square(4), 4};
  img.values(1, 1) = 0.5;
  MaskMatrix m = build_mask(img);
  Heatmap small{Grid::square(3)};
  small.values(1, 1) = 1.0;
  CHECK_THROWS_AS(encode_depth_map(0.5, small, img, m), ContractError);
  CHECK_THROWS_AS(decode_depth(DepthOffsetMap{Grid::square(3)},
                               Heatmap{Grid::square(4)}, img, m),
                  ContractError);
}
