#pragma once

#include "core/types.hpp"

namespace sfrd {

// Per-pixel coordinate channels; correlating a heatmap with them yields its
// center of mass, which is the plane decoder.
struct ComKernel {
  Grid u;
  Grid v;

  static ComKernel make(int n);
  int resolution() const { return u.rows(); }
};

struct GaussKernel {
  int size = 1;
  double sigma = 0.25;
  Grid weights;  // size x size, sums to 1

  static GaussKernel make(int size, double sigma);
  // sigma = size / 4, which keeps the effective support inside the window.
  static GaussKernel make(int size);
  void validate() const;
};

// Minimal-support heatmap for p: mass only on the (at most four) pixel centers
// bracketing p. Of the one-parameter solution family satisfying nonnegativity,
// unit sum and COM == p, picks the midpoint of the feasible interval of the
// high-row/high-col corner weight.
Heatmap encode_corners(UV p, int n);

// Zero-padded 2D convolution followed by renormalization to unit sum. Keeps
// the COM fixed as long as the support stays clear of the borders.
Heatmap gauss_smooth(const Heatmap& h, const GaussKernel& g);

// Two-step encoder: corner heatmap, then Gaussian smoothing.
Heatmap encode_heatmap(UV p, int n, const GaussKernel& g);

// Center of mass of the heatmap; linear in its entries.
UV decode_plane(const Heatmap& h, const ComKernel& c);

// d(u,v)/dH. Equal to the kernel channels for every heatmap since the decoder
// is linear.
struct PlaneJacobian {
  Grid du;
  Grid dv;
};
PlaneJacobian decode_plane_jacobian(const Heatmap& h, const ComKernel& c);

// Distance from p to the nearest image border, in pixel units.
double point_border_margin(UV p, int n);

// True when an encoded heatmap for p keeps its smoothed support clear of the
// borders: margin of at least (kernel_size + 1) / 2 pixels.
bool point_is_interior(UV p, int n, int kernel_size);

// Index distance from the nonzero pixels to the border; n for an all-zero grid.
int support_border_distance(const Grid& g);

// Support closer than (kernel_size - 1) / 2 to the border. Smoothing such a
// grid truncates mass and COM preservation no longer holds.
bool boundary_proximate(const Grid& g, int kernel_size);

}  // namespace sfrd
