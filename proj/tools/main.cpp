// sfrd: corpus generation, SFR encode/decode, roundtrip checks, gradient
// checks, fit-through-decoder runs, and metric evaluation over the file
// formats in formats.hpp. Links only the public C API.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "formats.hpp"
#include "sfrd/sfrd.h"

namespace fs = std::filesystem;
using sfrdcli::AnnotationRow;
using sfrdcli::format_double;

namespace {

struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(sfrd_status status, const std::string& context) {
  if (status == SFRD_OK) return;
  std::ostringstream os;
  os << context << ": " << sfrd_status_name(status);
  const char* detail = sfrd_last_error();
  if (detail && *detail) os << " (" << detail << ")";
  throw CommandError(os.str());
}

// frame_id -> joint rows sorted by joint id, duplicates rejected.
std::map<long, std::vector<AnnotationRow>> group_annotations(
    const std::vector<AnnotationRow>& rows) {
  std::map<long, std::vector<AnnotationRow>> grouped;
  for (const AnnotationRow& row : rows) grouped[row.frame_id].push_back(row);
  for (auto& [frame_id, joints] : grouped) {
    std::sort(joints.begin(), joints.end(),
              [](const AnnotationRow& a, const AnnotationRow& b) {
                return a.joint_id < b.joint_id;
              });
    for (std::size_t i = 1; i < joints.size(); ++i) {
      if (joints[i].joint_id == joints[i - 1].joint_id) {
        std::ostringstream os;
        os << "duplicate annotation for frame " << frame_id << " joint "
           << joints[i].joint_id;
        throw CommandError(os.str());
      }
    }
  }
  return grouped;
}

std::string grid_file_name(long frame_id, int joint_id, const char* kind) {
  std::ostringstream os;
  os << "f" << frame_id << "_j" << joint_id << "_" << kind << ".sfrb";
  return os.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CommandError("cannot create directory " + dir + ": " + ec.message());
}

// Synthetic sensor used by gen so UVD corpora can be evaluated in millimeters:
// frames are treated as full-sensor crops of an m x m camera at a fixed cube.
sfrd_frame_geometry synthetic_geometry(int input_size) {
  sfrd_frame_geometry g{};
  g.fx = 588.0;
  g.fy = 588.0;
  g.cx = input_size / 2.0;
  g.cy = input_size / 2.0;
  g.cube_x = 0.0;
  g.cube_y = 0.0;
  g.cube_z = 400.0;
  g.cube_edge = 250.0;
  g.crop_u0 = 0.0;
  g.crop_v0 = 0.0;
  g.crop_u_size = input_size;
  g.crop_v_size = input_size;
  return g;
}

// ---- gen ----------------------------------------------------------------

struct GenOptions {
  std::string out_dir;
  int count = 10;
  int joints = 2;
  int size_m = 128;
  int size_n = 64;
  int blob_radius = 8;
  std::uint64_t seed = 0;
  bool binary = false;
};

int cmd_gen(const GenOptions& opt) {
  if (opt.size_n < 1 || opt.size_m % opt.size_n != 0)
    throw CommandError("--size-m must be a positive multiple of --size-n");
  ensure_dir(opt.out_dir);

  sfrd_synth_spec spec;
  sfrd_synth_spec_defaults(&spec);
  spec.joint_count = opt.joints;
  spec.resolution = opt.size_m;
  spec.blob_radius = opt.blob_radius;
  spec.seed = opt.seed;

  sfrd_corpus* corpus = nullptr;
  check(sfrd_corpus_generate(&spec, opt.count, &corpus), "generating corpus");

  sfrdcli::FrameFile frames;
  frames.n = opt.size_n;
  std::vector<AnnotationRow> annotations;
  std::vector<sfrdcli::GeometryRow> geometry;
  const sfrd_frame_geometry geom = synthetic_geometry(opt.size_m);

  std::vector<double> full(static_cast<std::size_t>(opt.size_m) * opt.size_m);
  std::vector<double> small(static_cast<std::size_t>(opt.size_n) * opt.size_n);
  std::vector<double> uvd(static_cast<std::size_t>(opt.joints) * 3);
  for (int i = 0; i < opt.count; ++i) {
    check(sfrd_corpus_frame(corpus, i, full.data()), "reading scene");
    check(sfrd_downsample(opt.size_m, full.data(), opt.size_n, small.data()),
          "downsampling scene");
    sfrdcli::FrameData frame;
    frame.id = i;
    frame.values = small;
    frames.frames.push_back(std::move(frame));

    check(sfrd_corpus_joints(corpus, i, uvd.data()), "reading joints");
    for (int j = 0; j < opt.joints; ++j) {
      AnnotationRow row;
      row.frame_id = i;
      row.joint_id = j;
      row.u = uvd[3 * j + 0];
      row.v = uvd[3 * j + 1];
      row.d = uvd[3 * j + 2];
      annotations.push_back(row);
    }
    geometry.push_back(sfrdcli::GeometryRow{i, geom});
  }
  sfrd_corpus_free(corpus);

  const std::string frames_path =
      opt.out_dir + (opt.binary ? "/frames.sfrb" : "/frames.txt");
  if (opt.binary)
    sfrdcli::write_frames_binary(frames_path, frames);
  else
    sfrdcli::write_frames_text(frames_path, frames);
  sfrdcli::write_annotations(opt.out_dir + "/annotations.csv", annotations);
  sfrdcli::write_geometry(opt.out_dir + "/geometry.csv", geometry);

  std::cout << "wrote " << opt.count << " frames at " << opt.size_n << "x"
            << opt.size_n << " (" << opt.joints << " joints) to " << opt.out_dir
            << "\n";
  return 0;
}

// ---- encode -------------------------------------------------------------

struct EncodeOptions {
  std::string frames_path;
  std::string annotations_path;
  std::string out_dir;
  int kernel_k = 7;
};

int cmd_encode(const EncodeOptions& opt) {
  sfrdcli::FrameFile frames = sfrdcli::read_frames(opt.frames_path);
  if (frames.frames.empty()) throw CommandError("no frames in " + opt.frames_path);
  auto grouped = group_annotations(sfrdcli::read_annotations(opt.annotations_path));
  ensure_dir(opt.out_dir);

  const int n = frames.n;
  std::vector<double> heatmap(static_cast<std::size_t>(n) * n);
  std::vector<double> offsets(static_cast<std::size_t>(n) * n);
  std::vector<sfrdcli::ManifestRow> manifest;
  int encoded = 0;
  int skipped = 0;

  for (const sfrdcli::FrameData& frame : frames.frames) {
    auto it = grouped.find(frame.id);
    if (it == grouped.end() || it->second.empty()) {
      std::cerr << "frame " << frame.id << ": no annotations; skipping frame\n";
      ++skipped;
      continue;
    }

    struct Encoded {
      int joint_id;
      std::vector<double> heatmap;
      std::vector<double> offsets;
    };
    std::vector<Encoded> batch;
    bool frame_ok = true;
    for (const AnnotationRow& joint : it->second) {
      sfrd_status status =
          sfrd_encode_heatmap(n, opt.kernel_k, joint.u, joint.v, heatmap.data());
      if (status == SFRD_ERROR_OUT_OF_HULL) {
        std::cerr << "frame " << frame.id << " joint " << joint.joint_id
                  << ": plane coordinate outside the decodable hull ("
                  << sfrd_last_error() << "); skipping frame\n";
        frame_ok = false;
        break;
      }
      check(status, "encoding heatmap");
      check(sfrd_encode_depth_map(n, joint.d, heatmap.data(), frame.values.data(),
                                  offsets.data()),
            "encoding depth map");
      batch.push_back(Encoded{joint.joint_id, heatmap, offsets});
    }
    if (!frame_ok) {
      ++skipped;
      continue;
    }

    for (const Encoded& e : batch) {
      std::string hm = grid_file_name(frame.id, e.joint_id, "heatmap");
      std::string dm = grid_file_name(frame.id, e.joint_id, "depthmap");
      sfrdcli::write_grid(opt.out_dir + "/" + hm, n, e.heatmap);
      sfrdcli::write_grid(opt.out_dir + "/" + dm, n, e.offsets);
      manifest.push_back(sfrdcli::ManifestRow{frame.id, e.joint_id, "heatmap", hm});
      manifest.push_back(sfrdcli::ManifestRow{frame.id, e.joint_id, "depthmap", dm});
    }
    ++encoded;
  }

  if (encoded == 0) throw CommandError("no frames encoded");
  sfrdcli::write_manifest(opt.out_dir + "/manifest.csv", manifest);
  std::cout << "encoded " << encoded << " frames (" << skipped << " skipped) into "
            << opt.out_dir << "\n";
  return 0;
}

// ---- decode -------------------------------------------------------------

struct DecodeOptions {
  std::string frames_path;
  std::string bundle_dir;
  std::string out_path;
};

int cmd_decode(const DecodeOptions& opt) {
  sfrdcli::FrameFile frames = sfrdcli::read_frames(opt.frames_path);
  auto manifest = sfrdcli::read_manifest(opt.bundle_dir + "/manifest.csv");
  if (manifest.empty()) throw CommandError("empty bundle manifest");

  std::map<long, const sfrdcli::FrameData*> frame_index;
  for (const sfrdcli::FrameData& f : frames.frames) frame_index[f.id] = &f;

  std::map<std::pair<long, int>, std::pair<std::string, std::string>> pairs;
  for (const sfrdcli::ManifestRow& row : manifest) {
    auto& entry = pairs[{row.frame_id, row.joint_id}];
    (row.kind == "heatmap" ? entry.first : entry.second) = row.file;
  }

  const int n = frames.n;
  std::vector<AnnotationRow> predictions;
  for (const auto& [key, files] : pairs) {
    const auto& [frame_id, joint_id] = key;
    if (files.first.empty() || files.second.empty()) {
      std::ostringstream os;
      os << "bundle is missing a grid for frame " << frame_id << " joint "
         << joint_id;
      throw CommandError(os.str());
    }
    auto frame_it = frame_index.find(frame_id);
    if (frame_it == frame_index.end()) {
      std::ostringstream os;
      os << "bundle references frame " << frame_id << " absent from "
         << opt.frames_path;
      throw CommandError(os.str());
    }
    std::vector<double> heatmap =
        sfrdcli::read_grid(opt.bundle_dir + "/" + files.first, n);
    std::vector<double> offsets =
        sfrdcli::read_grid(opt.bundle_dir + "/" + files.second, n);

    AnnotationRow row;
    row.frame_id = frame_id;
    row.joint_id = joint_id;
    check(sfrd_decode_plane(n, heatmap.data(), &row.u, &row.v), "decoding plane");
    std::ostringstream ctx;
    ctx << "decoding depth for frame " << frame_id << " joint " << joint_id;
    check(sfrd_decode_depth(n, offsets.data(), heatmap.data(),
                            frame_it->second->values.data(), &row.d),
          ctx.str());
    predictions.push_back(row);
  }

  sfrdcli::write_annotations(opt.out_path, predictions);
  std::cout << "decoded " << predictions.size() << " joints to " << opt.out_path
            << "\n";
  return 0;
}

// ---- roundtrip ----------------------------------------------------------

struct RoundtripOptions {
  std::string frames_path;
  std::string annotations_path;
  double tol = 1e-6;
  double depth_tol = 1e-9;
  int kernel_k = 7;
  std::string report_path;
  std::string pred_out;
};

int cmd_roundtrip(const RoundtripOptions& opt) {
  sfrdcli::FrameFile frames = sfrdcli::read_frames(opt.frames_path);
  if (frames.frames.empty()) throw CommandError("no frames in " + opt.frames_path);
  auto grouped = group_annotations(sfrdcli::read_annotations(opt.annotations_path));

  const int n = frames.n;
  std::vector<double> corners(static_cast<std::size_t>(n) * n);
  std::vector<double> heatmap(static_cast<std::size_t>(n) * n);
  std::vector<double> offsets(static_cast<std::size_t>(n) * n);
  std::vector<sfrdcli::RoundtripRow> report;
  std::vector<AnnotationRow> predictions;
  int checked = 0, passed = 0, failed = 0, boundary = 0, unsupported = 0,
      skipped_frames = 0;

  for (const sfrdcli::FrameData& frame : frames.frames) {
    auto it = grouped.find(frame.id);
    if (it == grouped.end() || it->second.empty()) {
      std::cerr << "frame " << frame.id << ": no annotations; skipping frame\n";
      ++skipped_frames;
      continue;
    }
    bool frame_ok = true;
    for (const AnnotationRow& joint : it->second) {
      sfrd_status status = sfrd_encode_corners(n, joint.u, joint.v, corners.data());
      if (status == SFRD_ERROR_OUT_OF_HULL) {
        std::cerr << "frame " << frame.id << " joint " << joint.joint_id
                  << ": plane coordinate outside the decodable hull ("
                  << sfrd_last_error() << "); skipping frame\n";
        frame_ok = false;
        break;
      }
      check(status, "encoding corners");
    }
    if (!frame_ok) {
      ++skipped_frames;
      continue;
    }

    for (const AnnotationRow& joint : it->second) {
      check(sfrd_encode_corners(n, joint.u, joint.v, corners.data()),
            "encoding corners");
      int proximate = 0;
      check(sfrd_boundary_proximate(n, opt.kernel_k, corners.data(), &proximate),
            "checking boundary proximity");
      check(sfrd_gauss_smooth(n, opt.kernel_k, corners.data(), heatmap.data()),
            "smoothing heatmap");
      check(sfrd_encode_depth_map(n, joint.d, heatmap.data(), frame.values.data(),
                                  offsets.data()),
            "encoding depth map");

      sfrdcli::RoundtripRow row;
      row.frame_id = frame.id;
      row.joint_id = joint.joint_id;
      double u = 0.0, v = 0.0, d = 0.0;
      check(sfrd_decode_plane(n, heatmap.data(), &u, &v), "decoding plane");
      row.du = std::fabs(u - joint.u);
      row.dv = std::fabs(v - joint.v);
      sfrd_status depth_status = sfrd_decode_depth(
          n, offsets.data(), heatmap.data(), frame.values.data(), &d);
      if (depth_status == SFRD_ERROR_UNSUPPORTED_JOINT) {
        row.dd = std::numeric_limits<double>::quiet_NaN();
        row.status = "unsupported";
        ++unsupported;
        report.push_back(row);
        continue;
      }
      check(depth_status, "decoding depth");
      row.dd = std::fabs(d - joint.d);

      AnnotationRow pred;
      pred.frame_id = frame.id;
      pred.joint_id = joint.joint_id;
      pred.u = u;
      pred.v = v;
      pred.d = d;
      predictions.push_back(pred);

      if (proximate) {
        row.status = "boundary";
        ++boundary;
      } else {
        ++checked;
        bool ok = row.du < opt.tol && row.dv < opt.tol && row.dd < opt.depth_tol;
        row.status = ok ? "ok" : "fail";
        (ok ? passed : failed)++;
      }
      report.push_back(row);
    }
  }

  if (!opt.report_path.empty()) sfrdcli::write_roundtrip_report(opt.report_path, report);
  if (!opt.pred_out.empty()) sfrdcli::write_annotations(opt.pred_out, predictions);

  std::cout << "roundtrip: " << checked << " joints gated, " << passed
            << " passed, " << failed << " failed, " << boundary
            << " boundary-proximate (excluded), " << unsupported
            << " unsupported (excluded), " << skipped_frames
            << " frames skipped; tol " << format_double(opt.tol) << ", depth tol "
            << format_double(opt.depth_tol) << "\n";
  return (failed == 0 && checked > 0) ? 0 : 1;
}

// ---- gradcheck ----------------------------------------------------------

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int instances = 20;
  int size_n = 12;
  int joints = 2;
  int kernel_k = 7;
};

int cmd_gradcheck(const GradcheckOptions& opt) {
  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-2;  // scale floor for relative error
  constexpr double kPlaneTol = 1e-4;
  constexpr double kDepthTol = 1e-5;

  sfrd_synth_spec spec;
  sfrd_synth_spec_defaults(&spec);
  spec.joint_count = opt.joints;
  spec.resolution = opt.size_n;
  spec.blob_radius = std::max(2, opt.size_n / 8);
  spec.seed = opt.seed;
  sfrd_corpus* corpus = nullptr;
  check(sfrd_corpus_generate(&spec, opt.instances, &corpus), "generating instances");

  const int n = opt.size_n;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  std::vector<double> frame(cells), heatmap(cells), offsets(cells);
  std::vector<double> jac_u(cells), jac_v(cells);
  std::vector<double> jac_doff(cells), jac_dheat(cells);
  std::vector<double> uvd(static_cast<std::size_t>(opt.joints) * 3);

  check(sfrd_decode_plane_jacobian(n, jac_u.data(), jac_v.data()),
        "plane jacobian");

  auto rel_err = [&](double fd, double an) {
    return std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), kFloor});
  };

  double plane_max = 0.0;
  double depth_max = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    check(sfrd_corpus_frame(corpus, i, frame.data()), "reading scene");
    check(sfrd_corpus_joints(corpus, i, uvd.data()), "reading joints");
    for (int j = 0; j < opt.joints; ++j) {
      check(sfrd_encode_heatmap(n, opt.kernel_k, uvd[3 * j], uvd[3 * j + 1],
                                heatmap.data()),
            "encoding heatmap");
      check(sfrd_encode_depth_map(n, uvd[3 * j + 2], heatmap.data(), frame.data(),
                                  offsets.data()),
            "encoding depth map");
      double dec = 0.0;
      check(sfrd_decode_depth_jacobian(n, offsets.data(), heatmap.data(),
                                       frame.data(), jac_doff.data(),
                                       jac_dheat.data(), &dec),
            "depth jacobian");

      for (std::size_t p = 0; p < cells; ++p) {
        // plane decoder wrt heatmap entry p
        double saved = heatmap[p];
        double u_hi, v_hi, u_lo, v_lo, d_hi, d_lo;
        heatmap[p] = saved + kStep;
        check(sfrd_decode_plane(n, heatmap.data(), &u_hi, &v_hi), "fd plane");
        check(sfrd_decode_depth(n, offsets.data(), heatmap.data(), frame.data(),
                                &d_hi),
              "fd depth");
        heatmap[p] = saved - kStep;
        check(sfrd_decode_plane(n, heatmap.data(), &u_lo, &v_lo), "fd plane");
        check(sfrd_decode_depth(n, offsets.data(), heatmap.data(), frame.data(),
                                &d_lo),
              "fd depth");
        heatmap[p] = saved;
        plane_max = std::max(plane_max, rel_err((u_hi - u_lo) / (2 * kStep), jac_u[p]));
        plane_max = std::max(plane_max, rel_err((v_hi - v_lo) / (2 * kStep), jac_v[p]));
        depth_max = std::max(depth_max, rel_err((d_hi - d_lo) / (2 * kStep), jac_dheat[p]));

        // depth decoder wrt offset entry p
        saved = offsets[p];
        offsets[p] = saved + kStep;
        check(sfrd_decode_depth(n, offsets.data(), heatmap.data(), frame.data(),
                                &d_hi),
              "fd depth");
        offsets[p] = saved - kStep;
        check(sfrd_decode_depth(n, offsets.data(), heatmap.data(), frame.data(),
                                &d_lo),
              "fd depth");
        offsets[p] = saved;
        depth_max = std::max(depth_max, rel_err((d_hi - d_lo) / (2 * kStep), jac_doff[p]));
      }
    }
  }
  sfrd_corpus_free(corpus);

  bool plane_ok = plane_max < kPlaneTol;
  bool depth_ok = depth_max < kDepthTol;
  std::cout << "plane decoder: " << opt.instances << " instances, max rel err "
            << format_double(plane_max) << " (tol " << format_double(kPlaneTol)
            << "): " << (plane_ok ? "pass" : "FAIL") << "\n";
  std::cout << "depth decoder: " << opt.instances << " instances, max rel err "
            << format_double(depth_max) << " (tol " << format_double(kDepthTol)
            << "): " << (depth_ok ? "pass" : "FAIL") << "\n";
  std::cout << "gradcheck " << (plane_ok && depth_ok ? "pass" : "FAIL") << "\n";
  return plane_ok && depth_ok ? 0 : 1;
}

// ---- fit ----------------------------------------------------------------

struct FitOptions {
  std::string frames_path;
  std::string annotations_path;
  long frame_id = 0;
  std::string mode = "full";
  double step_size = -1.0;  // negative: use library default
  int max_iters = 2000;
  std::uint64_t seed = 0;
  int kernel_k = 7;
  double lambda_h = 1.0;
  double lambda_d = 1.0;
  std::string trace_out;
  std::string bundle_out;
  std::string pred_out;
};

int cmd_fit(const FitOptions& opt) {
  sfrdcli::FrameFile frames = sfrdcli::read_frames(opt.frames_path);
  auto grouped = group_annotations(sfrdcli::read_annotations(opt.annotations_path));

  const sfrdcli::FrameData* frame = nullptr;
  for (const sfrdcli::FrameData& f : frames.frames)
    if (f.id == opt.frame_id) frame = &f;
  if (!frame) {
    std::ostringstream os;
    os << "frame " << opt.frame_id << " not found in " << opt.frames_path;
    throw CommandError(os.str());
  }
  auto it = grouped.find(opt.frame_id);
  if (it == grouped.end() || it->second.empty()) {
    std::ostringstream os;
    os << "no annotations for frame " << opt.frame_id;
    throw CommandError(os.str());
  }
  const std::vector<AnnotationRow>& joints = it->second;
  const int joint_count = static_cast<int>(joints.size());
  const int n = frames.n;

  sfrd_fit_options options;
  sfrd_fit_options_defaults(&options);
  if (opt.mode == "full")
    options.mode = SFRD_FIT_FULL;
  else if (opt.mode == "coordinate_unsupervised")
    options.mode = SFRD_FIT_COORDINATE_UNSUPERVISED;
  else if (opt.mode == "representation_unsupervised")
    options.mode = SFRD_FIT_REPRESENTATION_UNSUPERVISED;
  else
    throw CommandError("unknown mode '" + opt.mode + "'");
  if (opt.step_size >= 0.0) options.step_size = opt.step_size;
  options.max_iters = opt.max_iters;
  options.seed = opt.seed;
  options.kernel_size = opt.kernel_k;
  options.lambda_heatmap = opt.lambda_h;
  options.lambda_depthmap = opt.lambda_d;

  std::vector<double> target(static_cast<std::size_t>(joint_count) * 3);
  for (int j = 0; j < joint_count; ++j) {
    target[3 * j + 0] = joints[j].u;
    target[3 * j + 1] = joints[j].v;
    target[3 * j + 2] = joints[j].d;
  }

  sfrd_fit_result* result = nullptr;
  check(sfrd_fit_run(n, frame->values.data(), joint_count, target.data(), &options,
                     &result),
        "fit");

  const int rows = sfrd_fit_result_trace_length(result);
  std::vector<sfrd_fit_trace_row> trace(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i)
    check(sfrd_fit_result_trace_row(result, i, &trace[i]), "reading trace");
  if (!opt.trace_out.empty()) sfrdcli::write_trace(opt.trace_out, trace);

  std::vector<double> decoded(static_cast<std::size_t>(joint_count) * 3);
  check(sfrd_fit_result_decoded(result, decoded.data()), "reading decoded joints");

  if (!opt.bundle_out.empty()) {
    ensure_dir(opt.bundle_out);
    std::vector<double> grid(static_cast<std::size_t>(n) * n);
    std::vector<sfrdcli::ManifestRow> manifest;
    for (int j = 0; j < joint_count; ++j) {
      const int joint_id = joints[j].joint_id;
      std::string hm = grid_file_name(opt.frame_id, joint_id, "heatmap");
      std::string dm = grid_file_name(opt.frame_id, joint_id, "depthmap");
      check(sfrd_fit_result_heatmap(result, j, grid.data()), "reading heatmap");
      sfrdcli::write_grid(opt.bundle_out + "/" + hm, n, grid);
      check(sfrd_fit_result_offset_map(result, j, grid.data()),
            "reading offset map");
      sfrdcli::write_grid(opt.bundle_out + "/" + dm, n, grid);
      manifest.push_back(
          sfrdcli::ManifestRow{opt.frame_id, joint_id, "heatmap", hm});
      manifest.push_back(
          sfrdcli::ManifestRow{opt.frame_id, joint_id, "depthmap", dm});
    }
    sfrdcli::write_manifest(opt.bundle_out + "/manifest.csv", manifest);
  }

  if (!opt.pred_out.empty()) {
    std::vector<AnnotationRow> predictions;
    for (int j = 0; j < joint_count; ++j) {
      AnnotationRow row;
      row.frame_id = opt.frame_id;
      row.joint_id = joints[j].joint_id;
      row.u = decoded[3 * j + 0];
      row.v = decoded[3 * j + 1];
      row.d = decoded[3 * j + 2];
      predictions.push_back(row);
    }
    sfrdcli::write_annotations(opt.pred_out, predictions);
  }

  double max_err = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    max_err = std::max(max_err, std::fabs(decoded[i] - target[i]));
  const sfrd_fit_trace_row& last = trace.back();
  std::cout << "fit mode " << opt.mode << ": " << last.iteration
            << " iterations, final objective " << format_double(last.total)
            << ", max coordinate error " << format_double(max_err) << "\n";
  sfrd_fit_result_free(result);
  return 0;
}

// ---- eval ---------------------------------------------------------------

struct EvalOptions {
  std::string pred_path;
  std::string gt_path;
  std::string geometry_path;
  std::string out_path;
};

int cmd_eval(const EvalOptions& opt) {
  auto pred = group_annotations(sfrdcli::read_annotations(opt.pred_path));
  auto gt = group_annotations(sfrdcli::read_annotations(opt.gt_path));
  if (pred.empty()) throw CommandError("no predictions in " + opt.pred_path);
  if (gt.empty()) throw CommandError("no ground truth in " + opt.gt_path);

  if (pred.size() != gt.size()) {
    std::ostringstream os;
    os << "frame counts differ: predictions have " << pred.size()
       << ", ground truth has " << gt.size();
    throw CommandError(os.str());
  }

  std::map<long, sfrd_frame_geometry> geometry;
  for (const sfrdcli::GeometryRow& row : sfrdcli::read_geometry(opt.geometry_path))
    geometry[row.frame_id] = row.geometry;

  const int joint_count = static_cast<int>(gt.begin()->second.size());
  std::vector<double> pred_xyz, gt_xyz;
  int frame_count = 0;
  for (const auto& [frame_id, gt_joints] : gt) {
    auto pred_it = pred.find(frame_id);
    if (pred_it == pred.end()) {
      std::ostringstream os;
      os << "frame " << frame_id << " in ground truth has no predictions";
      throw CommandError(os.str());
    }
    const auto& pred_joints = pred_it->second;
    if (static_cast<int>(pred_joints.size()) != joint_count ||
        static_cast<int>(gt_joints.size()) != joint_count) {
      std::ostringstream os;
      os << "joint counts differ for frame " << frame_id << ": predictions have "
         << pred_joints.size() << ", ground truth has " << gt_joints.size();
      throw CommandError(os.str());
    }
    auto geom_it = geometry.find(frame_id);
    if (geom_it == geometry.end()) {
      std::ostringstream os;
      os << "no geometry row for frame " << frame_id;
      throw CommandError(os.str());
    }
    for (int j = 0; j < joint_count; ++j) {
      if (pred_joints[j].joint_id != gt_joints[j].joint_id) {
        std::ostringstream os;
        os << "joint ids differ for frame " << frame_id << ": predictions have "
           << pred_joints[j].joint_id << ", ground truth has "
           << gt_joints[j].joint_id;
        throw CommandError(os.str());
      }
      double x, y, z;
      check(sfrd_uvd_to_xyz(&geom_it->second, pred_joints[j].u, pred_joints[j].v,
                            pred_joints[j].d, &x, &y, &z),
            "converting prediction");
      pred_xyz.insert(pred_xyz.end(), {x, y, z});
      check(sfrd_uvd_to_xyz(&geom_it->second, gt_joints[j].u, gt_joints[j].v,
                            gt_joints[j].d, &x, &y, &z),
            "converting ground truth");
      gt_xyz.insert(gt_xyz.end(), {x, y, z});
    }
    ++frame_count;
  }

  std::vector<double> per_joint(static_cast<std::size_t>(joint_count));
  double overall = 0.0;
  check(sfrd_mean_3d_error(frame_count, joint_count, pred_xyz.data(),
                           gt_xyz.data(), per_joint.data(), &overall),
        "computing mean error");

  std::vector<double> thresholds;
  for (int t = 0; t <= 80; ++t) thresholds.push_back(static_cast<double>(t));
  std::vector<double> fractions(thresholds.size());
  check(sfrd_frames_under_threshold(frame_count, joint_count, pred_xyz.data(),
                                    gt_xyz.data(),
                                    static_cast<int>(thresholds.size()),
                                    thresholds.data(), fractions.data()),
        "computing threshold curve");

  sfrdcli::write_metrics(opt.out_path, per_joint, overall, thresholds, fractions);
  std::cout << "evaluated " << frame_count << " frames, " << joint_count
            << " joints: overall mean error " << format_double(overall)
            << " mm; metrics written to " << opt.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial-form representations for 3D hand joints"};
  app.require_subcommand(1);
  int rc = 0;

  GenOptions gen;
  CLI::App* c = app.add_subcommand("gen", "generate a synthetic corpus");
  c->add_option("--out-dir", gen.out_dir, "output directory")->required();
  c->add_option("--count", gen.count, "number of frames");
  c->add_option("--joints", gen.joints, "joints per frame");
  c->add_option("--size-m", gen.size_m, "input scale (scenes are synthesized here)");
  c->add_option("--size-n", gen.size_n, "representation scale (frames are written here)");
  c->add_option("--blob-radius", gen.blob_radius, "blob radius in input pixels");
  c->add_option("--seed", gen.seed, "corpus seed");
  c->add_flag("--binary", gen.binary, "write frames in the binary format");
  c->callback([&] { rc = cmd_gen(gen); });

  EncodeOptions enc;
  c = app.add_subcommand("encode", "encode annotations into SFR bundles");
  c->add_option("--frames", enc.frames_path, "frame file")->required();
  c->add_option("--annotations", enc.annotations_path, "annotation CSV")->required();
  c->add_option("--out-dir", enc.out_dir, "bundle directory")->required();
  c->add_option("--kernel-k", enc.kernel_k, "Gaussian kernel size");
  c->callback([&] { rc = cmd_encode(enc); });

  DecodeOptions dec;
  c = app.add_subcommand("decode", "decode SFR bundles into predictions");
  c->add_option("--frames", dec.frames_path, "frame file")->required();
  c->add_option("--bundle-dir", dec.bundle_dir, "bundle directory")->required();
  c->add_option("--out", dec.out_path, "prediction CSV to write")->required();
  c->callback([&] { rc = cmd_decode(dec); });

  RoundtripOptions rt;
  c = app.add_subcommand("roundtrip", "encode+decode and gate the residuals");
  c->add_option("--frames", rt.frames_path, "frame file")->required();
  c->add_option("--annotations", rt.annotations_path, "annotation CSV")->required();
  c->add_option("--tol", rt.tol, "plane residual tolerance");
  c->add_option("--depth-tol", rt.depth_tol, "depth residual tolerance");
  c->add_option("--kernel-k", rt.kernel_k, "Gaussian kernel size");
  c->add_option("--report", rt.report_path, "per-joint residual CSV to write");
  c->add_option("--pred-out", rt.pred_out, "decoded prediction CSV to write");
  c->callback([&] { rc = cmd_roundtrip(rt); });

  GradcheckOptions gc;
  c = app.add_subcommand("gradcheck",
                         "compare decoder Jacobians against finite differences");
  c->add_option("--seed", gc.seed, "instance seed");
  c->add_option("--instances", gc.instances, "number of instances")
      ->check(CLI::PositiveNumber);
  c->add_option("--size-n", gc.size_n, "instance resolution");
  c->add_option("--joints", gc.joints, "joints per instance");
  c->add_option("--kernel-k", gc.kernel_k, "Gaussian kernel size");
  c->callback([&] { rc = cmd_gradcheck(gc); });

  FitOptions fit;
  c = app.add_subcommand("fit", "fit representations to a frame's annotations");
  c->add_option("--frames", fit.frames_path, "frame file")->required();
  c->add_option("--annotations", fit.annotations_path, "annotation CSV")->required();
  c->add_option("--frame-id", fit.frame_id, "frame to fit");
  c->add_option("--mode", fit.mode, "full | coordinate_unsupervised | representation_unsupervised")
      ->check(CLI::IsMember({"full", "coordinate_unsupervised",
                             "representation_unsupervised"}));
  c->add_option("--step", fit.step_size, "gradient descent step size");
  c->add_option("--iters", fit.max_iters, "iteration budget");
  c->add_option("--seed", fit.seed, "initial state seed");
  c->add_option("--kernel-k", fit.kernel_k, "Gaussian kernel size");
  c->add_option("--lambda-h", fit.lambda_h, "heatmap loss weight");
  c->add_option("--lambda-d", fit.lambda_d, "depth map loss weight");
  c->add_option("--trace-out", fit.trace_out, "loss trace CSV to write");
  c->add_option("--bundle-out", fit.bundle_out, "fitted SFR bundle directory");
  c->add_option("--pred-out", fit.pred_out, "decoded prediction CSV to write");
  c->callback([&] { rc = cmd_fit(fit); });

  EvalOptions ev;
  c = app.add_subcommand("eval", "evaluate predictions against ground truth");
  c->add_option("--pred", ev.pred_path, "prediction CSV")->required();
  c->add_option("--gt", ev.gt_path, "ground truth CSV")->required();
  c->add_option("--geometry", ev.geometry_path, "geometry CSV")->required();
  c->add_option("--out", ev.out_path, "metrics CSV to write")->required();
  c->callback([&] { rc = cmd_eval(ev); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
