// Exercises the shared-library surface only: no core headers, no C++ types.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "sfrd/sfrd.h"

TEST_CASE("version and status names are populated") {
  CHECK(std::string(sfrd_version()).size() > 0);
  CHECK(std::string(sfrd_status_name(SFRD_OK)) == "ok");
  CHECK(std::string(sfrd_status_name(SFRD_ERROR_OUT_OF_HULL)).size() > 0);
  CHECK(std::string(sfrd_status_name(SFRD_ERROR_DIVERGENCE)).size() > 0);
}

TEST_CASE("plane encode and decode roundtrip through the C surface") {
  const int n = 32;
  std::vector<double> heatmap(n * n);
  REQUIRE(sfrd_encode_heatmap(n, 7, 0.4, 0.6, heatmap.data()) == SFRD_OK);
  double sum = 0.0;
  for (double w : heatmap) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(std::fabs(sum - 1.0) < 1e-12);
  double u = 0.0, v = 0.0;
  REQUIRE(sfrd_decode_plane(n, heatmap.data(), &u, &v) == SFRD_OK);
  CHECK(std::fabs(u - 0.4) < 1e-9);
  CHECK(std::fabs(v - 0.6) < 1e-9);

  int interior = 0;
  REQUIRE(sfrd_point_is_interior(n, 7, 0.4, 0.6, &interior) == SFRD_OK);
  CHECK(interior == 1);
  REQUIRE(sfrd_point_is_interior(n, 7, 0.01, 0.6, &interior) == SFRD_OK);
  CHECK(interior == 0);
}

TEST_CASE("errors set a status code and a thread-local message") {
  const int n = 16;
  std::vector<double> heatmap(n * n);
  CHECK(sfrd_encode_heatmap(n, 7, -0.5, 0.5, heatmap.data()) ==
        SFRD_ERROR_OUT_OF_HULL);
  CHECK(std::string(sfrd_last_error()).size() > 0);

  CHECK(sfrd_encode_heatmap(n, 7, 0.5, 0.5, nullptr) ==
        SFRD_ERROR_INVALID_ARGUMENT);
  CHECK(sfrd_encode_heatmap(0, 7, 0.5, 0.5, heatmap.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);
  CHECK(sfrd_encode_heatmap(n, 4, 0.5, 0.5, heatmap.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);

  std::vector<double> zeros(n * n, 0.0);
  double u, v;
  CHECK(sfrd_decode_plane(n, zeros.data(), &u, &v) ==
        SFRD_ERROR_DEGENERATE_INPUT);
}

TEST_CASE("outputs stay untouched when a call fails") {
  const int n = 8;
  std::vector<double> heatmap(n * n, 42.0);
  CHECK(sfrd_encode_heatmap(n, 7, -1.0, 0.5, heatmap.data()) ==
        SFRD_ERROR_OUT_OF_HULL);
  for (double w : heatmap) CHECK(w == 42.0);
}

TEST_CASE("depth codec through the C surface") {
  const int n = 16;
  sfrd_synth_spec spec;
  sfrd_synth_spec_defaults(&spec);
  spec.resolution = n;
  spec.joint_count = 2;
  spec.blob_radius = 2;
  spec.seed = 11;
  sfrd_corpus* corpus = nullptr;
  REQUIRE(sfrd_corpus_generate(&spec, 1, &corpus) == SFRD_OK);

  std::vector<double> img(n * n), joints(6), heatmap(n * n), offsets(n * n),
      mask(n * n);
  REQUIRE(sfrd_corpus_frame(corpus, 0, img.data()) == SFRD_OK);
  REQUIRE(sfrd_corpus_joints(corpus, 0, joints.data()) == SFRD_OK);
  sfrd_corpus_free(corpus);

  REQUIRE(sfrd_build_mask(n, img.data(), mask.data()) == SFRD_OK);
  for (int i = 0; i < n * n; ++i) {
    CHECK(mask[i] == (img[i] > 0.0 ? 1.0 : 0.0));
  }

  REQUIRE(sfrd_encode_heatmap(n, 7, joints[0], joints[1], heatmap.data()) ==
          SFRD_OK);
  REQUIRE(sfrd_encode_depth_map(n, joints[2], heatmap.data(), img.data(),
                                offsets.data()) == SFRD_OK);
  double depth = 0.0;
  REQUIRE(sfrd_decode_depth(n, offsets.data(), heatmap.data(), img.data(),
                            &depth) == SFRD_OK);
  CHECK(std::fabs(depth - joints[2]) < 1e-9);

  // support entirely off-hand: still an error, never a number
  std::vector<double> empty_img(n * n, 0.0);
  empty_img[0] = 0.5;
  CHECK(sfrd_decode_depth(n, offsets.data(), heatmap.data(), empty_img.data(),
                          &depth) == SFRD_ERROR_UNSUPPORTED_JOINT);
}

TEST_CASE("corpus handles expose shape and reject bad indices") {
  sfrd_synth_spec spec;
  sfrd_synth_spec_defaults(&spec);
  spec.seed = 3;
  sfrd_corpus* corpus = nullptr;
  REQUIRE(sfrd_corpus_generate(&spec, 4, &corpus) == SFRD_OK);
  CHECK(sfrd_corpus_count(corpus) == 4);
  CHECK(sfrd_corpus_resolution(corpus) == spec.resolution);
  CHECK(sfrd_corpus_joint_count(corpus) == spec.joint_count);

  std::vector<double> buf(spec.resolution * spec.resolution);
  CHECK(sfrd_corpus_frame(corpus, 4, buf.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);
  CHECK(sfrd_corpus_frame(corpus, -1, buf.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);
  sfrd_corpus_free(corpus);

  sfrd_synth_spec bad = spec;
  bad.joint_count = 0;
  sfrd_corpus* none = nullptr;
  CHECK(sfrd_corpus_generate(&bad, 2, &none) == SFRD_ERROR_INVALID_ARGUMENT);
  CHECK(none == nullptr);
}

TEST_CASE("downsample and rotate through the C surface") {
  std::vector<double> big(16), small(4);
  for (int i = 0; i < 16; ++i) big[i] = i / 16.0;
  REQUIRE(sfrd_downsample(4, big.data(), 2, small.data()) == SFRD_OK);
  CHECK(small[0] == big[0]);
  CHECK(small[1] == big[2]);
  CHECK(small[2] == big[8]);
  CHECK(small[3] == big[10]);
  CHECK(sfrd_downsample(4, big.data(), 3, small.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);

  const int n = 8;
  std::vector<double> frame(n * n, 0.0), rotated(n * n), joints{0.25, 0.5, 0.5},
      out_joints(3);
  frame[3 * n + 1] = 0.7;
  REQUIRE(sfrd_rotate_augment(n, frame.data(), 1, joints.data(), 90.0,
                              rotated.data(), out_joints.data()) == SFRD_OK);
  double total = 0.0;
  for (double v : rotated) total += v;
  CHECK(std::fabs(total - 0.7) < 1e-12);  // permutation, nothing lost
  CHECK(std::fabs(out_joints[0] - 0.5) < 1e-12);   // u' = 0.5 - (v - 0.5)
  CHECK(std::fabs(out_joints[1] - 0.25) < 1e-12);  // v' = 0.5 + (u - 0.5)
  CHECK(out_joints[2] == 0.5);
}

TEST_CASE("fit runs, reports a trace, and is deterministic") {
  const int n = 12;
  sfrd_synth_spec spec;
  sfrd_synth_spec_defaults(&spec);
  spec.resolution = n;
  spec.joint_count = 2;
  spec.blob_radius = 2;
  spec.seed = 21;
  sfrd_corpus* corpus = nullptr;
  REQUIRE(sfrd_corpus_generate(&spec, 1, &corpus) == SFRD_OK);
  std::vector<double> img(n * n), target(6);
  REQUIRE(sfrd_corpus_frame(corpus, 0, img.data()) == SFRD_OK);
  REQUIRE(sfrd_corpus_joints(corpus, 0, target.data()) == SFRD_OK);
  sfrd_corpus_free(corpus);

  sfrd_fit_options options;
  sfrd_fit_options_defaults(&options);
  CHECK(options.mode == SFRD_FIT_FULL);
  CHECK(options.step_size > 0.0);
  options.max_iters = 150;
  options.seed = 5;

  sfrd_fit_result* a = nullptr;
  sfrd_fit_result* b = nullptr;
  REQUIRE(sfrd_fit_run(n, img.data(), 2, target.data(), &options, &a) == SFRD_OK);
  REQUIRE(sfrd_fit_run(n, img.data(), 2, target.data(), &options, &b) == SFRD_OK);
  CHECK(sfrd_fit_result_resolution(a) == n);
  CHECK(sfrd_fit_result_joint_count(a) == 2);
  REQUIRE(sfrd_fit_result_trace_length(a) == 151);

  sfrd_fit_trace_row row_a, row_b;
  for (int i = 0; i < 151; ++i) {
    REQUIRE(sfrd_fit_result_trace_row(a, i, &row_a) == SFRD_OK);
    REQUIRE(sfrd_fit_result_trace_row(b, i, &row_b) == SFRD_OK);
    CHECK(row_a.iteration == i);
    CHECK(row_a.total == row_b.total);  // bitwise determinism
  }
  CHECK(row_a.total <= 1.0);

  std::vector<double> decoded_a(6), decoded_b(6), grid(n * n);
  REQUIRE(sfrd_fit_result_decoded(a, decoded_a.data()) == SFRD_OK);
  REQUIRE(sfrd_fit_result_decoded(b, decoded_b.data()) == SFRD_OK);
  CHECK(std::memcmp(decoded_a.data(), decoded_b.data(), 6 * sizeof(double)) == 0);

  REQUIRE(sfrd_fit_result_heatmap(a, 0, grid.data()) == SFRD_OK);
  double sum = 0.0;
  for (double w : grid) sum += w;
  CHECK(std::fabs(sum - 1.0) < 1e-9);  // softmax keeps the simplex
  CHECK(sfrd_fit_result_heatmap(a, 2, grid.data()) ==
        SFRD_ERROR_INVALID_ARGUMENT);

  sfrd_fit_result_free(a);
  sfrd_fit_result_free(b);

  sfrd_fit_options bad = options;
  bad.max_iters = 0;
  sfrd_fit_result* none = nullptr;
  CHECK(sfrd_fit_run(n, img.data(), 2, target.data(), &bad, &none) ==
        SFRD_ERROR_INVALID_ARGUMENT);
  CHECK(none == nullptr);
}

TEST_CASE("metrics through the C surface") {
  sfrd_frame_geometry g{};
  g.fx = 588.0;
  g.fy = 588.0;
  g.cx = 64.0;
  g.cy = 64.0;
  g.cube_z = 400.0;
  g.cube_edge = 250.0;
  g.crop_u_size = 128.0;
  g.crop_v_size = 128.0;

  double x, y, z;
  REQUIRE(sfrd_uvd_to_xyz(&g, 0.5, 0.5, 0.5, &x, &y, &z) == SFRD_OK);
  CHECK(std::fabs(z - 400.0) < 1e-12);
  CHECK(std::fabs(x) < 1e-9);  // crop center hits the principal point
  double u, v, d;
  REQUIRE(sfrd_xyz_to_uvd(&g, x, y, z, &u, &v, &d) == SFRD_OK);
  CHECK(std::fabs(u - 0.5) < 1e-12);
  CHECK(std::fabs(d - 0.5) < 1e-12);

  // 2 frames x 1 joint: errors 5mm and 2mm
  std::vector<double> gts{0, 0, 400, 10, 10, 410};
  std::vector<double> preds{3, 4, 400, 10, 10, 412};
  double per_joint = 0.0, overall = 0.0;
  REQUIRE(sfrd_mean_3d_error(2, 1, preds.data(), gts.data(), &per_joint,
                             &overall) == SFRD_OK);
  CHECK(std::fabs(per_joint - 3.5) < 1e-12);
  CHECK(std::fabs(overall - 3.5) < 1e-12);

  std::vector<double> thresholds{1.0, 3.0, 6.0};
  std::vector<double> fractions(3);
  REQUIRE(sfrd_frames_under_threshold(2, 1, preds.data(), gts.data(), 3,
                                      thresholds.data(),
                                      fractions.data()) == SFRD_OK);
  CHECK(fractions[0] == 0.0);
  CHECK(fractions[1] == 0.5);
  CHECK(fractions[2] == 1.0);

  CHECK(sfrd_mean_3d_error(0, 1, preds.data(), gts.data(), &per_joint,
                           &overall) == SFRD_ERROR_INVALID_ARGUMENT);
}
