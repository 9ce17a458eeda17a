// C surface over the core. Every entry point funnels through guarded(), which
// turns exceptions into status codes and stashes the message thread-locally;
// outputs are written only after the core call succeeded.

#if !defined(_WIN32)
#define SFRD_API __attribute__((visibility("default")))
#endif

#include "sfrd/sfrd.h"

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "core/depth_codec.hpp"
#include "core/error.hpp"
#include "core/losses.hpp"
#include "core/metrics.hpp"
#include "core/plane_codec.hpp"
#include "core/preprocess.hpp"
#include "core/synthdata.hpp"
#include "core/types.hpp"

namespace {

thread_local std::string g_last_error;

sfrd_status status_from(sfrd::ErrorCode code) {
  switch (code) {
    case sfrd::ErrorCode::invalid_argument: return SFRD_ERROR_INVALID_ARGUMENT;
    case sfrd::ErrorCode::out_of_hull: return SFRD_ERROR_OUT_OF_HULL;
    case sfrd::ErrorCode::degenerate_input: return SFRD_ERROR_DEGENERATE_INPUT;
    case sfrd::ErrorCode::unsupported_joint: return SFRD_ERROR_UNSUPPORTED_JOINT;
    case sfrd::ErrorCode::divergence: return SFRD_ERROR_DIVERGENCE;
    case sfrd::ErrorCode::empty_hand: return SFRD_ERROR_EMPTY_HAND;
    case sfrd::ErrorCode::empty_crop: return SFRD_ERROR_EMPTY_CROP;
  }
  return SFRD_ERROR_INTERNAL;
}

template <typename Fn>
sfrd_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SFRD_OK;
  } catch (const sfrd::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SFRD_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SFRD_ERROR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw sfrd::ContractError(what);
}

sfrd::Grid grid_from(int n, const double* values, const char* what) {
  require(n >= 1, "grid size must be >= 1");
  require(values != nullptr, what);
  sfrd::Grid g = sfrd::Grid::square(n);
  std::copy(values, values + static_cast<std::size_t>(n) * n, g.data().begin());
  return g;
}

void grid_to(const sfrd::Grid& g, double* out) {
  std::copy(g.data().begin(), g.data().end(), out);
}

sfrd::DepthFrame frame_from(int n, const double* img) {
  sfrd::DepthFrame frame{grid_from(n, img, "img buffer is null"), n};
  frame.validate();
  return frame;
}

sfrd::JointSetUVD joints_from(int joint_count, const double* uvd) {
  require(joint_count >= 1, "joint count must be >= 1");
  require(uvd != nullptr, "joint buffer is null");
  sfrd::JointSetUVD joints;
  joints.joints.reserve(static_cast<std::size_t>(joint_count));
  for (int j = 0; j < joint_count; ++j)
    joints.joints.push_back(
        sfrd::JointUVD{uvd[3 * j + 0], uvd[3 * j + 1], uvd[3 * j + 2]});
  return joints;
}

void joints_to(const sfrd::JointSetUVD& joints, double* uvd_out) {
  for (std::size_t j = 0; j < joints.joints.size(); ++j) {
    uvd_out[3 * j + 0] = joints.joints[j].u;
    uvd_out[3 * j + 1] = joints.joints[j].v;
    uvd_out[3 * j + 2] = joints.joints[j].d;
  }
}

sfrd::FrameGeometry geometry_from(const sfrd_frame_geometry* g) {
  require(g != nullptr, "geometry is null");
  sfrd::FrameGeometry out;
  out.intrinsics = sfrd::CameraIntrinsics{g->fx, g->fy, g->cx, g->cy};
  out.cube = sfrd::NormalizationCube{{g->cube_x, g->cube_y, g->cube_z},
                                     g->cube_edge};
  out.crop = sfrd::CropGeometry{g->crop_u0, g->crop_v0, g->crop_u_size,
                                g->crop_v_size};
  return out;
}

std::vector<sfrd::JointSetXYZ> xyz_sets_from(int frame_count, int joint_count,
                                             const double* xyz,
                                             const char* what) {
  require(frame_count >= 1, "frame count must be >= 1");
  require(joint_count >= 1, "joint count must be >= 1");
  require(xyz != nullptr, what);
  std::vector<sfrd::JointSetXYZ> sets(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    sets[f].reserve(static_cast<std::size_t>(joint_count));
    for (int j = 0; j < joint_count; ++j) {
      const double* p = xyz + (static_cast<std::size_t>(f) * joint_count + j) * 3;
      sets[f].push_back(sfrd::Vec3{p[0], p[1], p[2]});
    }
  }
  return sets;
}

}  // namespace

struct sfrd_corpus {
  sfrd::Corpus data;
  int resolution = 0;
  int joint_count = 0;
};

struct sfrd_fit_result {
  sfrd::FitResult data;
  int resolution = 0;
};

extern "C" {

const char* sfrd_status_name(sfrd_status status) {
  switch (status) {
    case SFRD_OK: return "ok";
    case SFRD_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case SFRD_ERROR_OUT_OF_HULL: return "out_of_hull";
    case SFRD_ERROR_DEGENERATE_INPUT: return "degenerate_input";
    case SFRD_ERROR_UNSUPPORTED_JOINT: return "unsupported_joint";
    case SFRD_ERROR_DIVERGENCE: return "divergence";
    case SFRD_ERROR_EMPTY_HAND: return "empty_hand";
    case SFRD_ERROR_EMPTY_CROP: return "empty_crop";
    case SFRD_ERROR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sfrd_last_error(void) { return g_last_error.c_str(); }

const char* sfrd_version(void) { return "1.0.0"; }

/* ---- plane codec ------------------------------------------------------- */

sfrd_status sfrd_encode_corners(int n, double u, double v, double* heatmap_out) {
  return guarded([&] {
    require(heatmap_out != nullptr, "heatmap_out is null");
    sfrd::Heatmap h = sfrd::encode_corners(sfrd::UV{u, v}, n);
    grid_to(h.values, heatmap_out);
  });
}

sfrd_status sfrd_gauss_smooth(int n, int kernel_size, const double* heatmap_in,
                              double* heatmap_out) {
  return guarded([&] {
    require(heatmap_out != nullptr, "heatmap_out is null");
    sfrd::Heatmap h{grid_from(n, heatmap_in, "heatmap_in is null")};
    sfrd::Heatmap smoothed =
        sfrd::gauss_smooth(h, sfrd::GaussKernel::make(kernel_size));
    grid_to(smoothed.values, heatmap_out);
  });
}

sfrd_status sfrd_encode_heatmap(int n, int kernel_size, double u, double v,
                                double* heatmap_out) {
  return guarded([&] {
    require(heatmap_out != nullptr, "heatmap_out is null");
    sfrd::Heatmap h = sfrd::encode_heatmap(sfrd::UV{u, v}, n,
                                           sfrd::GaussKernel::make(kernel_size));
    grid_to(h.values, heatmap_out);
  });
}

sfrd_status sfrd_decode_plane(int n, const double* heatmap, double* u_out,
                              double* v_out) {
  return guarded([&] {
    require(u_out != nullptr && v_out != nullptr, "output pointer is null");
    sfrd::Heatmap h{grid_from(n, heatmap, "heatmap is null")};
    sfrd::UV p = sfrd::decode_plane(h, sfrd::ComKernel::make(n));
    *u_out = p.u;
    *v_out = p.v;
  });
}

sfrd_status sfrd_decode_plane_jacobian(int n, double* du_out, double* dv_out) {
  return guarded([&] {
    require(du_out != nullptr && dv_out != nullptr, "output pointer is null");
    require(n >= 1, "grid size must be >= 1");
    sfrd::ComKernel kernel = sfrd::ComKernel::make(n);
    grid_to(kernel.u, du_out);
    grid_to(kernel.v, dv_out);
  });
}

sfrd_status sfrd_point_is_interior(int n, int kernel_size, double u, double v,
                                   int* interior_out) {
  return guarded([&] {
    require(interior_out != nullptr, "interior_out is null");
    *interior_out =
        sfrd::point_is_interior(sfrd::UV{u, v}, n, kernel_size) ? 1 : 0;
  });
}

sfrd_status sfrd_boundary_proximate(int n, int kernel_size, const double* grid,
                                    int* proximate_out) {
  return guarded([&] {
    require(proximate_out != nullptr, "proximate_out is null");
    sfrd::Grid g = grid_from(n, grid, "grid is null");
    *proximate_out = sfrd::boundary_proximate(g, kernel_size) ? 1 : 0;
  });
}

/* ---- depth codec ------------------------------------------------------- */

sfrd_status sfrd_build_mask(int n, const double* img, double* mask_out) {
  return guarded([&] {
    require(mask_out != nullptr, "mask_out is null");
    sfrd::MaskMatrix mask = sfrd::build_mask(frame_from(n, img));
    grid_to(mask.values, mask_out);
  });
}

sfrd_status sfrd_encode_depth_map(int n, double depth, const double* heatmap,
                                  const double* img, double* offsets_out) {
  return guarded([&] {
    require(offsets_out != nullptr, "offsets_out is null");
    sfrd::DepthFrame frame = frame_from(n, img);
    sfrd::Heatmap h{grid_from(n, heatmap, "heatmap is null")};
    sfrd::MaskMatrix mask = sfrd::build_mask(frame);
    sfrd::DepthOffsetMap offsets = sfrd::encode_depth_map(depth, h, frame, mask);
    grid_to(offsets.values, offsets_out);
  });
}

sfrd_status sfrd_decode_depth(int n, const double* offsets, const double* heatmap,
                              const double* img, double* depth_out) {
  return guarded([&] {
    require(depth_out != nullptr, "depth_out is null");
    sfrd::DepthFrame frame = frame_from(n, img);
    sfrd::Heatmap h{grid_from(n, heatmap, "heatmap is null")};
    sfrd::DepthOffsetMap d{grid_from(n, offsets, "offsets is null")};
    sfrd::MaskMatrix mask = sfrd::build_mask(frame);
    *depth_out = sfrd::decode_depth(d, h, frame, mask);
  });
}

sfrd_status sfrd_decode_depth_jacobian(int n, const double* offsets,
                                       const double* heatmap, const double* img,
                                       double* wrt_offsets_out,
                                       double* wrt_heatmap_out,
                                       double* depth_out) {
  return guarded([&] {
    require(wrt_offsets_out != nullptr && wrt_heatmap_out != nullptr &&
                depth_out != nullptr,
            "output pointer is null");
    sfrd::DepthFrame frame = frame_from(n, img);
    sfrd::Heatmap h{grid_from(n, heatmap, "heatmap is null")};
    sfrd::DepthOffsetMap d{grid_from(n, offsets, "offsets is null")};
    sfrd::MaskMatrix mask = sfrd::build_mask(frame);
    sfrd::DepthJacobian jac = sfrd::decode_depth_jacobian(d, h, frame, mask);
    grid_to(jac.wrt_offsets, wrt_offsets_out);
    grid_to(jac.wrt_heatmap, wrt_heatmap_out);
    *depth_out = jac.decoded;
  });
}

/* ---- synthetic corpus -------------------------------------------------- */

void sfrd_synth_spec_defaults(sfrd_synth_spec* spec) {
  if (spec == nullptr) return;
  sfrd::SynthSpec defaults;
  spec->joint_count = defaults.joint_count;
  spec->resolution = defaults.resolution;
  spec->blob_radius = defaults.blob_radius;
  spec->depth_near = defaults.depth_near;
  spec->depth_far = defaults.depth_far;
  spec->seed = defaults.seed;
}

sfrd_status sfrd_corpus_generate(const sfrd_synth_spec* spec, int count,
                                 sfrd_corpus** corpus_out) {
  return guarded([&] {
    require(spec != nullptr, "spec is null");
    require(corpus_out != nullptr, "corpus_out is null");
    sfrd::SynthSpec core_spec;
    core_spec.joint_count = spec->joint_count;
    core_spec.resolution = spec->resolution;
    core_spec.blob_radius = spec->blob_radius;
    core_spec.depth_near = spec->depth_near;
    core_spec.depth_far = spec->depth_far;
    core_spec.seed = spec->seed;
    auto handle = std::make_unique<sfrd_corpus>();
    handle->data = sfrd::generate_corpus(core_spec, count);
    handle->resolution = core_spec.resolution;
    handle->joint_count = core_spec.joint_count;
    *corpus_out = handle.release();
  });
}

void sfrd_corpus_free(sfrd_corpus* corpus) { delete corpus; }

int sfrd_corpus_count(const sfrd_corpus* corpus) {
  return corpus == nullptr ? 0 : static_cast<int>(corpus->data.scenes.size());
}

int sfrd_corpus_resolution(const sfrd_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->resolution;
}

int sfrd_corpus_joint_count(const sfrd_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->joint_count;
}

sfrd_status sfrd_corpus_frame(const sfrd_corpus* corpus, int index,
                              double* values_out) {
  return guarded([&] {
    require(corpus != nullptr, "corpus is null");
    require(values_out != nullptr, "values_out is null");
    require(index >= 0 && index < sfrd_corpus_count(corpus),
            "scene index out of range");
    grid_to(corpus->data.scenes[static_cast<std::size_t>(index)].frame.values,
            values_out);
  });
}

sfrd_status sfrd_corpus_joints(const sfrd_corpus* corpus, int index,
                               double* uvd_out) {
  return guarded([&] {
    require(corpus != nullptr, "corpus is null");
    require(uvd_out != nullptr, "uvd_out is null");
    require(index >= 0 && index < sfrd_corpus_count(corpus),
            "scene index out of range");
    joints_to(corpus->data.scenes[static_cast<std::size_t>(index)].joints,
              uvd_out);
  });
}

sfrd_status sfrd_downsample(int size_in, const double* values_in, int size_out,
                            double* values_out) {
  return guarded([&] {
    require(values_out != nullptr, "values_out is null");
    sfrd::DepthFrame frame{grid_from(size_in, values_in, "values_in is null"),
                           size_in};
    frame.validate();
    sfrd::DepthFrame small = sfrd::downsample_repr(frame, size_out);
    grid_to(small.values, values_out);
  });
}

sfrd_status sfrd_rotate_augment(int n, const double* frame_in, int joint_count,
                                const double* uvd_in, double angle_deg,
                                double* frame_out, double* uvd_out) {
  return guarded([&] {
    require(frame_out != nullptr && uvd_out != nullptr,
            "output pointer is null");
    sfrd::DepthFrame frame = frame_from(n, frame_in);
    sfrd::JointSetUVD joints = joints_from(joint_count, uvd_in);
    sfrd::RotateResult rotated = sfrd::rotate_augment(frame, joints, angle_deg);
    grid_to(rotated.frame.values, frame_out);
    joints_to(rotated.joints, uvd_out);
  });
}

/* ---- fit through the decoders ------------------------------------------ */

void sfrd_fit_options_defaults(sfrd_fit_options* options) {
  if (options == nullptr) return;
  sfrd::FitConfig defaults;
  options->mode = SFRD_FIT_FULL;
  options->max_iters = defaults.max_iters;
  options->step_size = defaults.step_size;
  options->seed = defaults.seed;
  options->kernel_size = 7;
  options->lambda_heatmap = 1.0;
  options->lambda_depthmap = 1.0;
}

sfrd_status sfrd_fit_run(int n, const double* img, int joint_count,
                         const double* target_uvd,
                         const sfrd_fit_options* options,
                         sfrd_fit_result** result_out) {
  return guarded([&] {
    require(options != nullptr, "options is null");
    require(result_out != nullptr, "result_out is null");
    sfrd::DepthFrame frame = frame_from(n, img);
    sfrd::JointSetUVD target = joints_from(joint_count, target_uvd);
    target.validate();
    sfrd::FitConfig cfg;
    switch (options->mode) {
      case SFRD_FIT_FULL: cfg.mode = sfrd::FitMode::full; break;
      case SFRD_FIT_COORDINATE_UNSUPERVISED:
        cfg.mode = sfrd::FitMode::coordinate_unsupervised;
        break;
      case SFRD_FIT_REPRESENTATION_UNSUPERVISED:
        cfg.mode = sfrd::FitMode::representation_unsupervised;
        break;
      default: throw sfrd::ContractError("unknown fit mode");
    }
    cfg.max_iters = options->max_iters;
    cfg.step_size = options->step_size;
    cfg.seed = options->seed;
    sfrd::LossWeights weights{options->lambda_heatmap, options->lambda_depthmap};
    auto handle = std::make_unique<sfrd_fit_result>();
    handle->data = sfrd::fit_representation(
        target, frame, cfg, weights,
        sfrd::GaussKernel::make(options->kernel_size));
    handle->resolution = n;
    *result_out = handle.release();
  });
}

void sfrd_fit_result_free(sfrd_fit_result* result) { delete result; }

int sfrd_fit_result_resolution(const sfrd_fit_result* result) {
  return result == nullptr ? 0 : result->resolution;
}

int sfrd_fit_result_joint_count(const sfrd_fit_result* result) {
  return result == nullptr ? 0 : result->data.decoded.count();
}

int sfrd_fit_result_trace_length(const sfrd_fit_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->data.trace.size());
}

sfrd_status sfrd_fit_result_trace_row(const sfrd_fit_result* result, int index,
                                      sfrd_fit_trace_row* row_out) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(row_out != nullptr, "row_out is null");
    require(index >= 0 && index < sfrd_fit_result_trace_length(result),
            "trace index out of range");
    const sfrd::FitTraceRow& row =
        result->data.trace[static_cast<std::size_t>(index)];
    row_out->iteration = row.iteration;
    row_out->loss_uv = row.parts.uv;
    row_out->loss_d = row.parts.d;
    row_out->loss_heatmap = row.parts.heatmap;
    row_out->loss_depthmap = row.parts.depthmap;
    row_out->total = row.total;
  });
}

sfrd_status sfrd_fit_result_decoded(const sfrd_fit_result* result,
                                    double* uvd_out) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(uvd_out != nullptr, "uvd_out is null");
    joints_to(result->data.decoded, uvd_out);
  });
}

sfrd_status sfrd_fit_result_heatmap(const sfrd_fit_result* result, int joint,
                                    double* heatmap_out) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(heatmap_out != nullptr, "heatmap_out is null");
    require(joint >= 0 && joint < sfrd_fit_result_joint_count(result),
            "joint index out of range");
    grid_to(result->data.heatmaps[static_cast<std::size_t>(joint)].values,
            heatmap_out);
  });
}

sfrd_status sfrd_fit_result_offset_map(const sfrd_fit_result* result, int joint,
                                       double* offsets_out) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(offsets_out != nullptr, "offsets_out is null");
    require(joint >= 0 && joint < sfrd_fit_result_joint_count(result),
            "joint index out of range");
    grid_to(result->data.offset_maps[static_cast<std::size_t>(joint)].values,
            offsets_out);
  });
}

/* ---- metrics ----------------------------------------------------------- */

sfrd_status sfrd_uvd_to_xyz(const sfrd_frame_geometry* geometry, double u,
                            double v, double d, double* x_out, double* y_out,
                            double* z_out) {
  return guarded([&] {
    require(x_out != nullptr && y_out != nullptr && z_out != nullptr,
            "output pointer is null");
    sfrd::Vec3 p = sfrd::uvd_to_xyz(sfrd::JointUVD{u, v, d},
                                    geometry_from(geometry));
    *x_out = p.x;
    *y_out = p.y;
    *z_out = p.z;
  });
}

sfrd_status sfrd_xyz_to_uvd(const sfrd_frame_geometry* geometry, double x,
                            double y, double z, double* u_out, double* v_out,
                            double* d_out) {
  return guarded([&] {
    require(u_out != nullptr && v_out != nullptr && d_out != nullptr,
            "output pointer is null");
    sfrd::JointUVD j = sfrd::xyz_to_uvd(sfrd::Vec3{x, y, z},
                                        geometry_from(geometry));
    *u_out = j.u;
    *v_out = j.v;
    *d_out = j.d;
  });
}

sfrd_status sfrd_mean_3d_error(int frame_count, int joint_count,
                               const double* preds_xyz, const double* gts_xyz,
                               double* per_joint_mm_out, double* overall_mm_out) {
  return guarded([&] {
    require(per_joint_mm_out != nullptr && overall_mm_out != nullptr,
            "output pointer is null");
    sfrd::MeanErrorReport report = sfrd::mean_3d_error(
        xyz_sets_from(frame_count, joint_count, preds_xyz, "preds_xyz is null"),
        xyz_sets_from(frame_count, joint_count, gts_xyz, "gts_xyz is null"));
    std::copy(report.per_joint_mm.begin(), report.per_joint_mm.end(),
              per_joint_mm_out);
    *overall_mm_out = report.overall_mm;
  });
}

sfrd_status sfrd_frames_under_threshold(int frame_count, int joint_count,
                                        const double* preds_xyz,
                                        const double* gts_xyz,
                                        int threshold_count,
                                        const double* thresholds_mm,
                                        double* fractions_out) {
  return guarded([&] {
    require(fractions_out != nullptr, "fractions_out is null");
    require(threshold_count >= 1, "threshold count must be >= 1");
    require(thresholds_mm != nullptr, "thresholds_mm is null");
    std::vector<double> thresholds(thresholds_mm,
                                   thresholds_mm + threshold_count);
    std::vector<double> fractions = sfrd::frames_under_threshold(
        xyz_sets_from(frame_count, joint_count, preds_xyz, "preds_xyz is null"),
        xyz_sets_from(frame_count, joint_count, gts_xyz, "gts_xyz is null"),
        thresholds);
    std::copy(fractions.begin(), fractions.end(), fractions_out);
  });
}

} /* extern "C" */
