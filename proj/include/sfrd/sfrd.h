/* Spatial-form representations for 3D hand joints: heatmap / depth-offset
 * codecs, differentiable decoders, a fit-through-decoder optimizer, synthetic
 * corpora, and evaluation metrics.
 *
 * Conventions shared by every function here:
 *   - grids are square, row-major double buffers of n*n elements;
 *   - plane coordinates (u, v) are normalized to [0, 1], u along columns,
 *     v along rows, pixel centers at (index + 0.5) / n;
 *   - joint buffers hold (u, v, d) triples, joint-major;
 *   - functions return SFRD_OK or an error code; on error, outputs are
 *     untouched and sfrd_last_error() describes the failure for the calling
 *     thread until its next sfrd_* call.
 */
#ifndef SFRD_H
#define SFRD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef SFRD_API
#if defined(_WIN32)
#define SFRD_API __declspec(dllimport)
#else
#define SFRD_API __attribute__((visibility("default")))
#endif
#endif

typedef enum sfrd_status {
  SFRD_OK = 0,
  SFRD_ERROR_INVALID_ARGUMENT = 1,
  SFRD_ERROR_OUT_OF_HULL = 2,       /* plane coordinate outside the decodable hull */
  SFRD_ERROR_DEGENERATE_INPUT = 3,  /* e.g. heatmap with no mass */
  SFRD_ERROR_UNSUPPORTED_JOINT = 4, /* heatmap support misses the hand mask */
  SFRD_ERROR_DIVERGENCE = 5,        /* fit objective exploded */
  SFRD_ERROR_EMPTY_HAND = 6,        /* no on-hand pixels after preprocessing */
  SFRD_ERROR_EMPTY_CROP = 7,        /* crop captured no hand pixels */
  SFRD_ERROR_INTERNAL = 8
} sfrd_status;

SFRD_API const char* sfrd_status_name(sfrd_status status);
SFRD_API const char* sfrd_last_error(void);
SFRD_API const char* sfrd_version(void);

/* ---- plane codec ------------------------------------------------------- */

/* Four-pixel heatmap whose center of mass is exactly (u, v). */
SFRD_API sfrd_status sfrd_encode_corners(int n, double u, double v,
                                         double* heatmap_out);

/* Zero-padded Gaussian smoothing (odd kernel_size, sigma = kernel_size / 4)
 * followed by renormalization to unit sum. In-place operation is allowed. */
SFRD_API sfrd_status sfrd_gauss_smooth(int n, int kernel_size,
                                       const double* heatmap_in,
                                       double* heatmap_out);

/* encode_corners then gauss_smooth. */
SFRD_API sfrd_status sfrd_encode_heatmap(int n, int kernel_size, double u,
                                         double v, double* heatmap_out);

/* Center of mass of the heatmap under the pixel-center coordinate kernels. */
SFRD_API sfrd_status sfrd_decode_plane(int n, const double* heatmap,
                                       double* u_out, double* v_out);

/* d(u)/d(h) and d(v)/d(h); constant in h (the decoder is linear). */
SFRD_API sfrd_status sfrd_decode_plane_jacobian(int n, double* du_out,
                                                double* dv_out);

/* 1 if (u, v) sits at least (kernel_size + 1) / 2 pixels from every border. */
SFRD_API sfrd_status sfrd_point_is_interior(int n, int kernel_size, double u,
                                            double v, int* interior_out);

/* 1 if the grid's nonzero support comes within (kernel_size - 1) / 2 pixels
 * of a border, i.e. smoothing it would lose mass off the edge. */
SFRD_API sfrd_status sfrd_boundary_proximate(int n, int kernel_size,
                                             const double* grid,
                                             int* proximate_out);

/* ---- depth codec ------------------------------------------------------- */

/* Binary mask of strictly positive img pixels. */
SFRD_API sfrd_status sfrd_build_mask(int n, const double* img, double* mask_out);

/* Offset map holding (depth - img) on on-hand pixels under the heatmap
 * support, zero elsewhere. */
SFRD_API sfrd_status sfrd_encode_depth_map(int n, double depth,
                                           const double* heatmap,
                                           const double* img,
                                           double* offsets_out);

/* Heatmap-weighted mean of img + offsets over the mask. Fails with
 * SFRD_ERROR_UNSUPPORTED_JOINT when the heatmap puts no mass on the hand. */
SFRD_API sfrd_status sfrd_decode_depth(int n, const double* offsets,
                                       const double* heatmap, const double* img,
                                       double* depth_out);

/* Gradients of the decoded depth w.r.t. the offset map and the heatmap,
 * plus the decoded value itself. */
SFRD_API sfrd_status sfrd_decode_depth_jacobian(int n, const double* offsets,
                                                const double* heatmap,
                                                const double* img,
                                                double* wrt_offsets_out,
                                                double* wrt_heatmap_out,
                                                double* depth_out);

/* ---- synthetic corpus -------------------------------------------------- */

typedef struct sfrd_synth_spec {
  int32_t joint_count;
  int32_t resolution;
  int32_t blob_radius; /* pixels */
  double depth_near;   /* normalized, in (0, depth_far) */
  double depth_far;    /* normalized, in (depth_near, 1] */
  uint64_t seed;
} sfrd_synth_spec;

SFRD_API void sfrd_synth_spec_defaults(sfrd_synth_spec* spec);

typedef struct sfrd_corpus sfrd_corpus;

/* count scenes, each deterministic under a seed derived from spec->seed. */
SFRD_API sfrd_status sfrd_corpus_generate(const sfrd_synth_spec* spec, int count,
                                          sfrd_corpus** corpus_out);
SFRD_API void sfrd_corpus_free(sfrd_corpus* corpus);

SFRD_API int sfrd_corpus_count(const sfrd_corpus* corpus);
SFRD_API int sfrd_corpus_resolution(const sfrd_corpus* corpus);
SFRD_API int sfrd_corpus_joint_count(const sfrd_corpus* corpus);

/* Depth values of scene `index` into a resolution^2 buffer. */
SFRD_API sfrd_status sfrd_corpus_frame(const sfrd_corpus* corpus, int index,
                                       double* values_out);
/* Ground-truth joints of scene `index` into a joint_count*3 (u,v,d) buffer. */
SFRD_API sfrd_status sfrd_corpus_joints(const sfrd_corpus* corpus, int index,
                                        double* uvd_out);

/* Top-left nearest-neighbor decimation from size_in to size_out
 * (size_in must be a multiple of size_out). */
SFRD_API sfrd_status sfrd_downsample(int size_in, const double* values_in,
                                     int size_out, double* values_out);

/* Frame and joints rotated together about the image center; depth values are
 * carried along unchanged. Buffers must not alias their inputs. */
SFRD_API sfrd_status sfrd_rotate_augment(int n, const double* frame_in,
                                         int joint_count, const double* uvd_in,
                                         double angle_deg, double* frame_out,
                                         double* uvd_out);

/* ---- fit through the decoders ------------------------------------------ */

typedef enum sfrd_fit_mode {
  SFRD_FIT_FULL = 0,
  SFRD_FIT_COORDINATE_UNSUPERVISED = 1,
  SFRD_FIT_REPRESENTATION_UNSUPERVISED = 2
} sfrd_fit_mode;

typedef struct sfrd_fit_options {
  int32_t mode;      /* sfrd_fit_mode */
  int32_t max_iters;
  double step_size;
  uint64_t seed;
  int32_t kernel_size;
  double lambda_heatmap;
  double lambda_depthmap;
} sfrd_fit_options;

SFRD_API void sfrd_fit_options_defaults(sfrd_fit_options* options);

typedef struct sfrd_fit_result sfrd_fit_result;

typedef struct sfrd_fit_trace_row {
  int32_t iteration;
  double loss_uv;
  double loss_d;
  double loss_heatmap;
  double loss_depthmap;
  double total; /* the objective minimized for the configured mode */
} sfrd_fit_trace_row;

/* Gradient-descent fit of per-joint representations against target joints on
 * the given frame. Deterministic per options->seed. */
SFRD_API sfrd_status sfrd_fit_run(int n, const double* img, int joint_count,
                                  const double* target_uvd,
                                  const sfrd_fit_options* options,
                                  sfrd_fit_result** result_out);
SFRD_API void sfrd_fit_result_free(sfrd_fit_result* result);

SFRD_API int sfrd_fit_result_resolution(const sfrd_fit_result* result);
SFRD_API int sfrd_fit_result_joint_count(const sfrd_fit_result* result);
SFRD_API int sfrd_fit_result_trace_length(const sfrd_fit_result* result);
SFRD_API sfrd_status sfrd_fit_result_trace_row(const sfrd_fit_result* result,
                                               int index,
                                               sfrd_fit_trace_row* row_out);
SFRD_API sfrd_status sfrd_fit_result_decoded(const sfrd_fit_result* result,
                                             double* uvd_out);
SFRD_API sfrd_status sfrd_fit_result_heatmap(const sfrd_fit_result* result,
                                             int joint, double* heatmap_out);
SFRD_API sfrd_status sfrd_fit_result_offset_map(const sfrd_fit_result* result,
                                                int joint, double* offsets_out);

/* ---- metrics ----------------------------------------------------------- */

typedef struct sfrd_frame_geometry {
  double fx, fy, cx, cy;                           /* sensor intrinsics */
  double cube_x, cube_y, cube_z, cube_edge;        /* normalization cube, mm */
  double crop_u0, crop_v0, crop_u_size, crop_v_size; /* sensor-pixel rect */
} sfrd_frame_geometry;

SFRD_API sfrd_status sfrd_uvd_to_xyz(const sfrd_frame_geometry* geometry,
                                     double u, double v, double d, double* x_out,
                                     double* y_out, double* z_out);
SFRD_API sfrd_status sfrd_xyz_to_uvd(const sfrd_frame_geometry* geometry,
                                     double x, double y, double z, double* u_out,
                                     double* v_out, double* d_out);

/* preds/gts are frame-major, joint-major (x, y, z) triples in millimeters.
 * per_joint_mm_out holds joint_count means; overall_mm_out their mean. */
SFRD_API sfrd_status sfrd_mean_3d_error(int frame_count, int joint_count,
                                        const double* preds_xyz,
                                        const double* gts_xyz,
                                        double* per_joint_mm_out,
                                        double* overall_mm_out);

/* Fraction of frames whose worst joint error is strictly below each
 * threshold; thresholds must be ascending. */
SFRD_API sfrd_status sfrd_frames_under_threshold(int frame_count,
                                                 int joint_count,
                                                 const double* preds_xyz,
                                                 const double* gts_xyz,
                                                 int threshold_count,
                                                 const double* thresholds_mm,
                                                 double* fractions_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SFRD_H */
