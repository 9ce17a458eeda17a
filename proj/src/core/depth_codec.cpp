#include "core/depth_codec.hpp"

namespace sfrd {

namespace {

void check_shapes(const Grid& a, const Grid& b, const Grid& c, const Grid& d,
                  const char* op) {
  if (!a.same_shape(b) || !a.same_shape(c) || !a.same_shape(d)) {
    throw ContractError(std::string(op) + ": grid shape mismatch");
  }
}

}  // namespace

MaskMatrix build_mask(const DepthFrame& img) {
  MaskMatrix m{Grid(img.values.rows(), img.values.cols())};
  for (int r = 0; r < img.values.rows(); ++r) {
    for (int c = 0; c < img.values.cols(); ++c) {
      m.values(r, c) = img.values(r, c) > 0.0 ? 1.0 : 0.0;
    }
  }
  return m;
}

DepthOffsetMap encode_depth_map(double depth, const Heatmap& h,
                                const DepthFrame& img, const MaskMatrix& m) {
  if (!h.values.same_shape(img.values) || !h.values.same_shape(m.values)) {
    throw ContractError("encode_depth_map: grid shape mismatch");
  }
  DepthOffsetMap out{Grid(h.values.rows(), h.values.cols())};
  for (int r = 0; r < h.values.rows(); ++r) {
    for (int c = 0; c < h.values.cols(); ++c) {
      if (h.values(r, c) > 0.0) {
        out.values(r, c) = (depth - img.values(r, c)) * m.values(r, c);
      }
    }
  }
  return out;
}

double decode_depth(const DepthOffsetMap& d, const Heatmap& h,
                    const DepthFrame& img, const MaskMatrix& m) {
  check_shapes(d.values, h.values, img.values, m.values, "decode_depth");
  double num = 0.0;
  double den = 0.0;
  for (int r = 0; r < d.values.rows(); ++r) {
    for (int c = 0; c < d.values.cols(); ++c) {
      double w = m.values(r, c) * h.values(r, c);
      num += w * (img.values(r, c) + d.values(r, c));
      den += w;
    }
  }
  if (den <= kDepthDenominatorEpsilon) {
    throw UnsupportedJointError(
        "decode_depth: heatmap support lies entirely off the hand mask");
  }
  return num / den;
}

DepthJacobian decode_depth_jacobian(const DepthOffsetMap& d, const Heatmap& h,
                                    const DepthFrame& img, const MaskMatrix& m) {
  check_shapes(d.values, h.values, img.values, m.values,
               "decode_depth_jacobian");
  double num = 0.0;
  double den = 0.0;
  for (int r = 0; r < d.values.rows(); ++r) {
    for (int c = 0; c < d.values.cols(); ++c) {
      double w = m.values(r, c) * h.values(r, c);
      num += w * (img.values(r, c) + d.values(r, c));
      den += w;
    }
  }
  if (den <= kDepthDenominatorEpsilon) {
    throw UnsupportedJointError(
        "decode_depth_jacobian: heatmap support lies entirely off the hand mask");
  }
  double decoded = num / den;

  DepthJacobian jac{Grid(d.values.rows(), d.values.cols()),
                    Grid(d.values.rows(), d.values.cols()), decoded};
  for (int r = 0; r < d.values.rows(); ++r) {
    for (int c = 0; c < d.values.cols(); ++c) {
      double mv = m.values(r, c);
      jac.wrt_offsets(r, c) = mv * h.values(r, c) / den;
      jac.wrt_heatmap(r, c) =
          mv * ((img.values(r, c) + d.values(r, c)) - decoded) / den;
    }
  }
  return jac;
}

}  // namespace sfrd
