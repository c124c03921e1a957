#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sils/dataset.hpp"
#include "sils/simplex.hpp"

namespace sils {

// Localizing kernel L with support inside [-1/2,1/2]^d. Default (empty fn) is
// the uniform kernel 1{z in (-1/2,1/2)^d}; user kernels are evaluated inside
// the declared support and forced to 0 outside it.
struct Kernel {
  std::function<double(const double* z, int d)> fn;

  bool is_uniform() const { return !fn; }
};

inline double kernel_L(const Kernel& k, const double* z, int d) {
  for (int c = 0; c < d; ++c)
    if (!(std::fabs(z[c]) < 0.5)) return 0.0;
  return k.is_uniform() ? 1.0 : k.fn(z, d);
}

// b^{d/2} * prod_{k=1..r} L_b(v - v_k) with L_b(z) = b^{-d} L(z/b).
inline double kernel_weight(const Kernel& k, const double* v, const double* pts, int r, int d,
                            double b) {
  double out = std::pow(b, 0.5 * d - static_cast<double>(d) * r);
  double z[kMaxDim];
  for (int i = 0; i < r; ++i) {
    for (int c = 0; c < d; ++c) z[c] = (v[c] - pts[i * d + c]) / b;
    const double L = kernel_L(k, z, d);
    if (L == 0.0) return 0.0;
    out *= L;
  }
  return out;
}

enum class KernelVariant { identity, sign };

// h_v(x_1..x_r): simplex statistic (or its sign) times the localizing weight.
// Short-circuits to 0 without classifying when the weight vanishes.
inline double h_value(KernelVariant variant, const Kernel& k, const double* v,
                      const double* pts, const double* ys, int r, int d, double b) {
  const double kw = kernel_weight(k, v, pts, r, d, b);
  if (kw == 0.0) return 0.0;
  const double w = (variant == KernelVariant::identity)
                       ? w_identity(pts, ys, d)
                       : static_cast<double>(w_sign(pts, ys, d));
  return w * kw;
}

// Data indices with ||V_i - v||_inf <= b/2, ascending.
struct Neighborhood {
  std::vector<int> idx;

  int size() const { return static_cast<int>(idx.size()); }
  bool contains(int i) const { return std::binary_search(idx.begin(), idx.end(), i); }
};

// Per-coordinate sorted orders; lookup picks the tightest coordinate interval
// by binary search and verifies the remaining coordinates on that slice.
struct CoordIndex {
  int n = 0, d = 0;
  std::vector<double> sorted;  // d * n, column-major per coordinate
  std::vector<int> order;      // d * n, data index at each sorted rank
};

inline CoordIndex build_coord_index(const Dataset& ds) {
  CoordIndex ix;
  ix.n = ds.n();
  ix.d = ds.d;
  ix.sorted.resize(static_cast<std::size_t>(ix.d) * ix.n);
  ix.order.resize(static_cast<std::size_t>(ix.d) * ix.n);
  std::vector<int> perm(ix.n);
  for (int c = 0; c < ix.d; ++c) {
    for (int i = 0; i < ix.n; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
      return ds.point(a)[c] < ds.point(b)[c];
    });
    for (int i = 0; i < ix.n; ++i) {
      ix.order[static_cast<std::size_t>(c) * ix.n + i] = perm[i];
      ix.sorted[static_cast<std::size_t>(c) * ix.n + i] = ds.point(perm[i])[c];
    }
  }
  return ix;
}

inline Neighborhood neighborhood(const Dataset& ds, const CoordIndex& ix, const double* v,
                                 double b) {
  Neighborhood nd;
  const int n = ds.n();
  if (n == 0) return nd;
  const double half = 0.5 * b;
  int best_c = 0;
  long best_count = n + 1;
  long best_lo = 0;
  for (int c = 0; c < ds.d; ++c) {
    const double* col = ix.sorted.data() + static_cast<std::size_t>(c) * n;
    const long lo = std::lower_bound(col, col + n, v[c] - half) - col;
    const long hi = std::upper_bound(col, col + n, v[c] + half) - col;
    if (hi - lo < best_count) {
      best_count = hi - lo;
      best_c = c;
      best_lo = lo;
    }
  }
  const int* ord = ix.order.data() + static_cast<std::size_t>(best_c) * n;
  for (long t = best_lo; t < best_lo + best_count; ++t) {
    const int i = ord[t];
    const double* p = ds.point(i);
    bool in = true;
    for (int c = 0; c < ds.d; ++c)
      if (std::fabs(p[c] - v[c]) > half) {
        in = false;
        break;
      }
    if (in) nd.idx.push_back(i);
  }
  std::sort(nd.idx.begin(), nd.idx.end());
  return nd;
}

inline Neighborhood neighborhood(const Dataset& ds, const double* v, double b) {
  Neighborhood nd;
  const double half = 0.5 * b;
  for (int i = 0; i < ds.n(); ++i) {
    const double* p = ds.point(i);
    bool in = true;
    for (int c = 0; c < ds.d; ++c)
      if (std::fabs(p[c] - v[c]) > half) {
        in = false;
        break;
      }
    if (in) nd.idx.push_back(i);
  }
  return nd;
}

// Query points (one per stratum; m indexes queries) and the bandwidth set.
struct QueryGrid {
  int d = 0;
  std::vector<double> pts;  // M * d
  std::vector<double> bandwidths;

  int size() const { return d == 0 ? 0 : static_cast<int>(pts.size()) / d; }
  const double* query(int m) const { return pts.data() + static_cast<std::size_t>(m) * d; }
};

// {0.3,0.4,0.5,0.6,0.7}^2 for d=2; {0.3,0.5,0.7}^d for d >= 3; the 1-d slice
// {0.3,...,0.7} for d=1.
inline std::vector<double> default_query_points(int d) {
  std::vector<double> axis;
  if (d <= 2)
    axis = {0.3, 0.4, 0.5, 0.6, 0.7};
  else
    axis = {0.3, 0.5, 0.7};
  std::vector<double> pts;
  std::vector<int> digit(d, 0);
  const int base = static_cast<int>(axis.size());
  for (;;) {
    for (int c = 0; c < d; ++c) pts.push_back(axis[digit[c]]);
    int c = d - 1;
    while (c >= 0 && ++digit[c] == base) digit[c--] = 0;
    if (c < 0) break;
  }
  return pts;
}

inline QueryGrid default_query_grid(int d, std::vector<double> bandwidths) {
  QueryGrid g;
  g.d = d;
  g.pts = default_query_points(d);
  g.bandwidths = std::move(bandwidths);
  return g;
}

}  // namespace sils
