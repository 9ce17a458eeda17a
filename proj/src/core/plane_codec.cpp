#include "core/plane_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfrd {

ComKernel ComKernel::make(int n) {
  if (n <= 0) throw ContractError("ComKernel: resolution must be positive");
  ComKernel kernel{Grid::square(n), Grid::square(n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      UV c = pixel_center(i, k, n);
      kernel.u(i, k) = c.u;
      kernel.v(i, k) = c.v;
    }
  }
  return kernel;
}

GaussKernel GaussKernel::make(int size, double sigma) {
  if (size <= 0 || size % 2 == 0) {
    throw ContractError("GaussKernel: size must be odd and positive");
  }
  if (!(sigma > 0.0)) throw ContractError("GaussKernel: sigma must be positive");
  GaussKernel g{size, sigma, Grid::square(size)};
  int mid = size / 2;
  double total = 0.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double dr = r - mid;
      double dc = c - mid;
      double w = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      g.weights(r, c) = w;
      total += w;
    }
  }
  for (double& w : g.weights.data()) w /= total;
  return g;
}

GaussKernel GaussKernel::make(int size) {
  return make(size, static_cast<double>(size) / 4.0);
}

void GaussKernel::validate() const {
  if (size <= 0 || size % 2 == 0 || !weights.is_square(size)) {
    throw ContractError("GaussKernel: bad size");
  }
  if (!(sigma > 0.0)) throw ContractError("GaussKernel: sigma must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw ContractError("GaussKernel: weights do not sum to 1");
  }
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double w = weights(r, c);
      if (w != weights(r, size - 1 - c) || w != weights(size - 1 - r, c) ||
          w != weights(c, r)) {
        throw ContractError("GaussKernel: weights not reflection-symmetric");
      }
    }
  }
}

Heatmap encode_corners(UV p, int n) {
  if (n < 2) throw ContractError("encode_corners: resolution must be at least 2");
  const double lo = 0.5 / n;
  const double hi = 1.0 - 0.5 / n;
  if (!(p.u >= lo && p.u <= hi && p.v >= lo && p.v <= hi)) {
    throw OutOfHullError("encode_corners: (" + std::to_string(p.u) + ", " +
                         std::to_string(p.v) +
                         ") outside the pixel-center hull for n=" +
                         std::to_string(n));
  }

  // Position in pixel-center units: x in [0, n-1] indexes the column axis.
  double x = p.u * n - 0.5;
  double y = p.v * n - 0.5;
  int k0 = std::min(static_cast<int>(std::floor(x)), n - 2);
  int i0 = std::min(static_cast<int>(std::floor(y)), n - 2);
  double a = x - k0;  // fractional offset along columns, in [0, 1]
  double b = y - i0;  // fractional offset along rows, in [0, 1]

  // Weight t of the (high-row, high-col) corner is free; the other three are
  // forced by unit sum and COM. Feasibility pins t to [max(0, a+b-1), min(a,b)].
  double t_lo = std::max(0.0, a + b - 1.0);
  double t_hi = std::min(a, b);
  double t = 0.5 * (t_lo + t_hi);

  double w_hh = t;
  double w_lh = a - t;
  double w_hl = b - t;
  double w_ll = 1.0 - a - b + t;
  // Rounding can leave a weight a few ulp below zero; snap to exact zero.
  auto snap = [](double w) { return w < 0.0 ? 0.0 : w; };

  Heatmap h{Grid::square(n)};
  h.values(i0, k0) = snap(w_ll);
  h.values(i0, k0 + 1) = snap(w_lh);
  h.values(i0 + 1, k0) = snap(w_hl);
  h.values(i0 + 1, k0 + 1) = snap(w_hh);
  return h;
}

Heatmap gauss_smooth(const Heatmap& h, const GaussKernel& g) {
  const int n = h.values.rows();
  const int mid = g.size / 2;
  Heatmap out{Grid::square(n)};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int kr = 0; kr < g.size; ++kr) {
        int sr = r + kr - mid;
        if (sr < 0 || sr >= n) continue;  // zero padding
        for (int kc = 0; kc < g.size; ++kc) {
          int sc = c + kc - mid;
          if (sc < 0 || sc >= n) continue;
          acc += h.values(sr, sc) * g.weights(kr, kc);
        }
      }
      out.values(r, c) = acc;
    }
  }
  double total = out.values.sum();
  if (!(total > 0.0)) {
    throw DegenerateInputError("gauss_smooth: smoothed heatmap has no mass");
  }
  for (double& v : out.values.data()) v /= total;
  return out;
}

Heatmap encode_heatmap(UV p, int n, const GaussKernel& g) {
  return gauss_smooth(encode_corners(p, n), g);
}

UV decode_plane(const Heatmap& h, const ComKernel& c) {
  const int n = c.resolution();
  if (!h.values.is_square(n)) {
    throw ContractError("decode_plane: heatmap and kernel resolution mismatch");
  }
  double total = 0.0;
  double u = 0.0;
  double v = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      double w = h.values(r, k);
      total += w;
      u += w * c.u(r, k);
      v += w * c.v(r, k);
    }
  }
  if (total <= 1e-12) {
    throw DegenerateInputError("decode_plane: heatmap carries no mass");
  }
  return UV{u, v};
}

PlaneJacobian decode_plane_jacobian(const Heatmap& h, const ComKernel& c) {
  if (!h.values.same_shape(c.u)) {
    throw ContractError("decode_plane_jacobian: resolution mismatch");
  }
  return PlaneJacobian{c.u, c.v};
}

double point_border_margin(UV p, int n) {
  double x = p.u * n;
  double y = p.v * n;
  return std::min(std::min(x, n - x), std::min(y, n - y));
}

bool point_is_interior(UV p, int n, int kernel_size) {
  return point_border_margin(p, n) >= (kernel_size + 1) / 2.0;
}

int support_border_distance(const Grid& g) {
  const int n = g.rows();
  int best = n;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      if (g(r, c) != 0.0) {
        int d = std::min(std::min(r, g.rows() - 1 - r),
                         std::min(c, g.cols() - 1 - c));
        best = std::min(best, d);
      }
    }
  }
  return best;
}

bool boundary_proximate(const Grid& g, int kernel_size) {
  return support_border_distance(g) < (kernel_size - 1) / 2;
}

}  // namespace sfrd
