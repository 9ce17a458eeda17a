#pragma once

#include "core/types.hpp"

namespace sfrd {

// Guard on the depth decoder's denominator; below this the heatmap support is
// treated as entirely off-hand.
inline constexpr double kDepthDenominatorEpsilon = 1e-12;

MaskMatrix build_mask(const DepthFrame& img);

// Local offset depth map: (depth - surface) on masked pixels under the
// heatmap support, zero elsewhere.
DepthOffsetMap encode_depth_map(double depth, const Heatmap& h,
                                const DepthFrame& img, const MaskMatrix& m);

// Heatmap-weighted mean of the recovered values img + d over masked pixels.
double decode_depth(const DepthOffsetMap& d, const Heatmap& h,
                    const DepthFrame& img, const MaskMatrix& m);

struct DepthJacobian {
  Grid wrt_offsets;  // m * h / denom
  Grid wrt_heatmap;  // m * ((img + d) - decoded) / denom
  double decoded = 0.0;
};
DepthJacobian decode_depth_jacobian(const DepthOffsetMap& d, const Heatmap& h,
                                    const DepthFrame& img, const MaskMatrix& m);

}  // namespace sfrd
