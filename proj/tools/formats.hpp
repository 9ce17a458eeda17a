#pragma once

// File formats the CLI speaks. Everything writes "\n" line endings and
// shortest-roundtrip decimal text so repeated runs are byte-identical.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfrd/sfrd.h"

namespace sfrdcli {

// Thrown with file/line context already formatted into what().
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double value);

struct FrameData {
  long id = 0;
  std::vector<double> values;  // n*n row-major
};

struct FrameFile {
  int n = 0;
  std::vector<FrameData> frames;
};

// Text: header "SFRD1 <n> <count>", then per frame "frame <id>" and n rows of
// n space-separated values. Binary: 16-byte header (magic "SFRB", u32 n,
// u32 count, u32 reserved, little-endian) then count grids of n*n float32,
// row-major; ids are implicit 0..count-1. read_frames sniffs the magic.
FrameFile read_frames(const std::string& path);
void write_frames_text(const std::string& path, const FrameFile& file);
void write_frames_binary(const std::string& path, const FrameFile& file);

// Single-grid binary file (count 1), used for SFR bundle members.
std::vector<double> read_grid(const std::string& path, int expected_n);
void write_grid(const std::string& path, int n, const std::vector<double>& values);

struct AnnotationRow {
  long frame_id = 0;
  int joint_id = 0;
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;
};

// CSV with header "frame_id,joint_id,u,v,d"; predictions share the schema.
std::vector<AnnotationRow> read_annotations(const std::string& path);
void write_annotations(const std::string& path,
                       const std::vector<AnnotationRow>& rows);

struct GeometryRow {
  long frame_id = 0;
  sfrd_frame_geometry geometry{};
};

std::vector<GeometryRow> read_geometry(const std::string& path);
void write_geometry(const std::string& path, const std::vector<GeometryRow>& rows);

struct ManifestRow {
  long frame_id = 0;
  int joint_id = 0;
  std::string kind;  // "heatmap" or "depthmap"
  std::string file;  // relative to the bundle directory
};

std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);

void write_metrics(const std::string& path, const std::vector<double>& per_joint_mm,
                   double overall_mm, const std::vector<double>& thresholds_mm,
                   const std::vector<double>& fractions);

void write_trace(const std::string& path,
                 const std::vector<sfrd_fit_trace_row>& rows);

struct RoundtripRow {
  long frame_id = 0;
  int joint_id = 0;
  double du = 0.0;
  double dv = 0.0;
  double dd = 0.0;
  std::string status;  // ok | fail | boundary | unsupported
};

void write_roundtrip_report(const std::string& path,
                            const std::vector<RoundtripRow>& rows);

}  // namespace sfrdcli
