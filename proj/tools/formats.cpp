#include "formats.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace sfrdcli {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw FormatError(os.str());
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw FormatError(path + ": " + what);
}

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) fail(path, "cannot open for reading");
  }

  bool next(std::string* line) {
    if (!std::getline(in_, *line)) return false;
    ++line_no_;
    if (!line->empty() && line->back() == '\r') line->pop_back();
    return true;
  }

  std::string must_next(const std::string& expectation) {
    std::string line;
    if (!next(&line)) fail(path_, line_no_ + 1, "unexpected end of file, expected " + expectation);
    return line;
  }

  std::size_t line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

double parse_double(const LineReader& r, std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(r.path(), r.line_no(), "bad number '" + std::string(token) + "'");
  return value;
}

long parse_long(const LineReader& r, std::string_view token) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(r.path(), r.line_no(), "bad integer '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_row(const LineReader& r,
                                        std::string_view line, char sep,
                                        std::size_t expected,
                                        const char* schema) {
  std::vector<std::string_view> fields = split(line, sep);
  if (fields.size() != expected) {
    std::ostringstream os;
    os << "malformed row '" << line << "': expected " << expected << " fields ("
       << schema << "), got " << fields.size();
    fail(r.path(), r.line_no(), os.str());
  }
  return fields;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

void put_u32le(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr char kBinaryMagic[4] = {'S', 'F', 'R', 'B'};
constexpr char kTextMagic[] = "SFRD1";

void write_binary_grids(std::ofstream& out, const std::string& path, int n,
                        std::size_t count,
                        const std::vector<const std::vector<double>*>& grids) {
  std::string header;
  header.append(kBinaryMagic, 4);
  put_u32le(header, static_cast<std::uint32_t>(n));
  put_u32le(header, static_cast<std::uint32_t>(count));
  put_u32le(header, 0);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::string payload;
  for (const std::vector<double>* g : grids) {
    for (double value : *g) {
      float f = static_cast<float>(value);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      put_u32le(payload, bits);
    }
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) fail(path, "write failed");
}

struct BinaryHeader {
  int n = 0;
  std::size_t count = 0;
};

BinaryHeader read_binary_header(std::ifstream& in, const std::string& path) {
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (in.gcount() != sizeof header) fail(path, "truncated binary header");
  if (std::memcmp(header, kBinaryMagic, 4) != 0)
    fail(path, "bad magic, expected SFRB");
  BinaryHeader h;
  h.n = static_cast<int>(get_u32le(header + 4));
  h.count = get_u32le(header + 8);
  if (h.n < 1 || h.n > 1 << 14) fail(path, "implausible grid size in header");
  return h;
}

std::vector<double> read_binary_grid_payload(std::ifstream& in,
                                             const std::string& path, int n) {
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  std::vector<unsigned char> raw(cells * 4);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    fail(path, "truncated grid payload");
  std::vector<double> values(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    std::uint32_t bits = get_u32le(raw.data() + 4 * i);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    values[i] = static_cast<double>(f);
  }
  return values;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

FrameFile read_frames(const std::string& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "cannot open for reading");
    char magic[5] = {};
    probe.read(magic, 4);
    if (probe.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0) {
      std::ifstream in(path, std::ios::binary);
      in.seekg(0);
      BinaryHeader h = read_binary_header(in, path);
      FrameFile file;
      file.n = h.n;
      file.frames.reserve(h.count);
      for (std::size_t i = 0; i < h.count; ++i) {
        FrameData frame;
        frame.id = static_cast<long>(i);
        frame.values = read_binary_grid_payload(in, path, h.n);
        file.frames.push_back(std::move(frame));
      }
      return file;
    }
  }

  LineReader r(path);
  std::string line = r.must_next("header");
  std::vector<std::string_view> head = split(line, ' ');
  if (head.size() != 3 || head[0] != kTextMagic)
    fail(path, r.line_no(), "bad header, expected 'SFRD1 <n> <count>'");
  FrameFile file;
  file.n = static_cast<int>(parse_long(r, head[1]));
  long count = parse_long(r, head[2]);
  if (file.n < 1) fail(path, r.line_no(), "grid size must be >= 1");
  if (count < 0) fail(path, r.line_no(), "negative frame count");
  file.frames.reserve(static_cast<std::size_t>(count));
  for (long f = 0; f < count; ++f) {
    line = r.must_next("'frame <id>'");
    std::vector<std::string_view> tag = split(line, ' ');
    if (tag.size() != 2 || tag[0] != "frame")
      fail(path, r.line_no(), "expected 'frame <id>', got '" + line + "'");
    FrameData frame;
    frame.id = parse_long(r, tag[1]);
    frame.values.reserve(static_cast<std::size_t>(file.n) * file.n);
    for (int row = 0; row < file.n; ++row) {
      line = r.must_next("a depth row");
      std::vector<std::string_view> cells = split(line, ' ');
      if (static_cast<int>(cells.size()) != file.n) {
        std::ostringstream os;
        os << "expected " << file.n << " values, got " << cells.size();
        fail(path, r.line_no(), os.str());
      }
      for (std::string_view cell : cells)
        frame.values.push_back(parse_double(r, cell));
    }
    file.frames.push_back(std::move(frame));
  }
  return file;
}

void write_frames_text(const std::string& path, const FrameFile& file) {
  std::ofstream out = open_out(path, false);
  out << kTextMagic << ' ' << file.n << ' ' << file.frames.size() << '\n';
  for (const FrameData& frame : file.frames) {
    out << "frame " << frame.id << '\n';
    for (int r = 0; r < file.n; ++r) {
      for (int c = 0; c < file.n; ++c) {
        if (c) out << ' ';
        out << format_double(frame.values[static_cast<std::size_t>(r) * file.n + c]);
      }
      out << '\n';
    }
  }
  if (!out) fail(path, "write failed");
}

void write_frames_binary(const std::string& path, const FrameFile& file) {
  std::ofstream out = open_out(path, true);
  std::vector<const std::vector<double>*> grids;
  grids.reserve(file.frames.size());
  for (const FrameData& frame : file.frames) grids.push_back(&frame.values);
  write_binary_grids(out, path, file.n, file.frames.size(), grids);
}

std::vector<double> read_grid(const std::string& path, int expected_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  BinaryHeader h = read_binary_header(in, path);
  if (h.count != 1) fail(path, "expected a single-grid file");
  if (expected_n > 0 && h.n != expected_n) {
    std::ostringstream os;
    os << "grid size " << h.n << " does not match expected " << expected_n;
    fail(path, os.str());
  }
  return read_binary_grid_payload(in, path, h.n);
}

void write_grid(const std::string& path, int n, const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(n) * n)
    fail(path, "grid buffer size does not match its resolution");
  std::ofstream out = open_out(path, true);
  write_binary_grids(out, path, n, 1, {&values});
}

std::vector<AnnotationRow> read_annotations(const std::string& path) {
  LineReader r(path);
  std::string line = r.must_next("header");
  if (line != "frame_id,joint_id,u,v,d")
    fail(path, r.line_no(), "bad header, expected 'frame_id,joint_id,u,v,d'");
  std::vector<AnnotationRow> rows;
  while (r.next(&line)) {
    if (line.empty()) continue;
    auto f = split_row(r, line, ',', 5, "frame_id,joint_id,u,v,d");
    AnnotationRow row;
    row.frame_id = parse_long(r, f[0]);
    row.joint_id = static_cast<int>(parse_long(r, f[1]));
    row.u = parse_double(r, f[2]);
    row.v = parse_double(r, f[3]);
    row.d = parse_double(r, f[4]);
    rows.push_back(row);
  }
  return rows;
}

void write_annotations(const std::string& path,
                       const std::vector<AnnotationRow>& rows) {
  std::ofstream out = open_out(path, false);
  out << "frame_id,joint_id,u,v,d\n";
  for (const AnnotationRow& row : rows) {
    out << row.frame_id << ',' << row.joint_id << ',' << format_double(row.u)
        << ',' << format_double(row.v) << ',' << format_double(row.d) << '\n';
  }
  if (!out) fail(path, "write failed");
}

namespace {
constexpr char kGeometryHeader[] =
    "frame_id,fx,fy,cx,cy,cube_x,cube_y,cube_z,cube_edge,crop_u0,crop_v0,"
    "crop_u_size,crop_v_size";
}

std::vector<GeometryRow> read_geometry(const std::string& path) {
  LineReader r(path);
  std::string line = r.must_next("header");
  if (line != kGeometryHeader)
    fail(path, r.line_no(), "bad header for geometry file");
  std::vector<GeometryRow> rows;
  while (r.next(&line)) {
    if (line.empty()) continue;
    auto f = split_row(r, line, ',', 13, kGeometryHeader);
    GeometryRow row;
    row.frame_id = parse_long(r, f[0]);
    row.geometry.fx = parse_double(r, f[1]);
    row.geometry.fy = parse_double(r, f[2]);
    row.geometry.cx = parse_double(r, f[3]);
    row.geometry.cy = parse_double(r, f[4]);
    row.geometry.cube_x = parse_double(r, f[5]);
    row.geometry.cube_y = parse_double(r, f[6]);
    row.geometry.cube_z = parse_double(r, f[7]);
    row.geometry.cube_edge = parse_double(r, f[8]);
    row.geometry.crop_u0 = parse_double(r, f[9]);
    row.geometry.crop_v0 = parse_double(r, f[10]);
    row.geometry.crop_u_size = parse_double(r, f[11]);
    row.geometry.crop_v_size = parse_double(r, f[12]);
    rows.push_back(row);
  }
  return rows;
}

void write_geometry(const std::string& path, const std::vector<GeometryRow>& rows) {
  std::ofstream out = open_out(path, false);
  out << kGeometryHeader << '\n';
  for (const GeometryRow& row : rows) {
    const sfrd_frame_geometry& g = row.geometry;
    out << row.frame_id << ',' << format_double(g.fx) << ',' << format_double(g.fy)
        << ',' << format_double(g.cx) << ',' << format_double(g.cy) << ','
        << format_double(g.cube_x) << ',' << format_double(g.cube_y) << ','
        << format_double(g.cube_z) << ',' << format_double(g.cube_edge) << ','
        << format_double(g.crop_u0) << ',' << format_double(g.crop_v0) << ','
        << format_double(g.crop_u_size) << ',' << format_double(g.crop_v_size)
        << '\n';
  }
  if (!out) fail(path, "write failed");
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
  LineReader r(path);
  std::string line = r.must_next("header");
  if (line != "frame_id,joint_id,kind,file")
    fail(path, r.line_no(), "bad header, expected 'frame_id,joint_id,kind,file'");
  std::vector<ManifestRow> rows;
  while (r.next(&line)) {
    if (line.empty()) continue;
    auto f = split_row(r, line, ',', 4, "frame_id,joint_id,kind,file");
    ManifestRow row;
    row.frame_id = parse_long(r, f[0]);
    row.joint_id = static_cast<int>(parse_long(r, f[1]));
    row.kind = std::string(f[2]);
    row.file = std::string(f[3]);
    if (row.kind != "heatmap" && row.kind != "depthmap")
      fail(path, r.line_no(), "unknown grid kind '" + row.kind + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out = open_out(path, false);
  out << "frame_id,joint_id,kind,file\n";
  for (const ManifestRow& row : rows) {
    out << row.frame_id << ',' << row.joint_id << ',' << row.kind << ','
        << row.file << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_metrics(const std::string& path, const std::vector<double>& per_joint_mm,
                   double overall_mm, const std::vector<double>& thresholds_mm,
                   const std::vector<double>& fractions) {
  std::ofstream out = open_out(path, false);
  out << "joint_id,mean_mm\n";
  for (std::size_t j = 0; j < per_joint_mm.size(); ++j)
    out << j << ',' << format_double(per_joint_mm[j]) << '\n';
  out << "overall," << format_double(overall_mm) << '\n';
  out << "threshold_mm,fraction\n";
  for (std::size_t i = 0; i < thresholds_mm.size(); ++i)
    out << format_double(thresholds_mm[i]) << ',' << format_double(fractions[i])
        << '\n';
  if (!out) fail(path, "write failed");
}

void write_trace(const std::string& path,
                 const std::vector<sfrd_fit_trace_row>& rows) {
  std::ofstream out = open_out(path, false);
  out << "iteration,loss_uv,loss_d,loss_heatmap,loss_depthmap,total\n";
  for (const sfrd_fit_trace_row& row : rows) {
    out << row.iteration << ',' << format_double(row.loss_uv) << ','
        << format_double(row.loss_d) << ',' << format_double(row.loss_heatmap)
        << ',' << format_double(row.loss_depthmap) << ','
        << format_double(row.total) << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_roundtrip_report(const std::string& path,
                            const std::vector<RoundtripRow>& rows) {
  std::ofstream out = open_out(path, false);
  out << "frame_id,joint_id,du,dv,dd,status\n";
  for (const RoundtripRow& row : rows) {
    out << row.frame_id << ',' << row.joint_id << ',' << format_double(row.du)
        << ',' << format_double(row.dv) << ',' << format_double(row.dd) << ','
        << row.status << '\n';
  }
  if (!out) fail(path, "write failed");
}

}  // namespace sfrdcli
