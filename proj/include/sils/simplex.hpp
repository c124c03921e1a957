#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace sils {

inline constexpr int kMaxDim = 6;
inline constexpr int kMaxR = kMaxDim + 2;

// Barycentric weights below this are treated as boundary, not interior.
inline constexpr double kInteriorTol = 1e-10;
// Pivot floor, relative to 1 + max coordinate magnitude.
inline constexpr double kPivotRel = 1e-12;
// Pivot-ratio condition cap; beyond it the tuple counts as affinely degenerate.
inline constexpr double kMaxCondition = 1e12;

// Outcome of classifying an r-tuple of covariate points (r = d+2): either no
// point lies strictly inside the simplex of the others, or the unique index j
// that does, together with its positive barycentric weights.
struct SimplexClassification {
  int j = -1;  // -1: not in any simplex
  int r = 0;
  std::array<double, kMaxR> weights{};  // weights[i] for i != j; weights[j] = 0

  bool inside() const { return j >= 0; }
};

namespace detail {

// r points in R^d (r = d+2) always admit an affine dependence
// sum_i lam_i v_i = 0, sum_i lam_i = 0. When the dependence is unique up to
// scale, point j lies strictly inside the simplex of the others exactly when
// lam_j is the single entry whose sign opposes all the rest (Radon partition
// with a singleton side); the weights are a_i = -lam_i / lam_j.
inline void classify_from_dependence(const double* lam, int r, double tol,
                                     SimplexClassification& out) {
  out.j = -1;
  out.r = r;
  int npos = 0, nneg = 0, ipos = -1, ineg = -1;
  for (int i = 0; i < r; ++i) {
    if (lam[i] > 0.0) {
      ++npos;
      ipos = i;
    } else if (lam[i] < 0.0) {
      ++nneg;
      ineg = i;
    }
  }
  int j;
  if (npos == 1 && nneg == r - 1)
    j = ipos;
  else if (nneg == 1 && npos == r - 1)
    j = ineg;
  else
    return;
  const double denom = -lam[j];
  double sum = 0.0;
  for (int i = 0; i < r; ++i) {
    if (i == j) continue;
    const double a = lam[i] / denom;
    if (!(a > tol)) return;  // boundary or outside: not strictly interior
    out.weights[i] = a;
    sum += a;
  }
  // The dependence gives sum a_i = 1 exactly in real arithmetic; renormalize
  // away the elimination round-off.
  const double inv = 1.0 / sum;
  for (int i = 0; i < r; ++i)
    if (i != j) out.weights[i] *= inv;
  out.weights[j] = 0.0;
  out.j = j;
}

inline double max_abs_coord(const double* pts, int count) {
  double m = 0.0;
  for (int i = 0; i < count; ++i) {
    const double a = std::fabs(pts[i]);
    if (a > m) m = a;
  }
  return m;
}

// d = 1: dependence of (x0, x1, x2) via 1x2 cofactors.
inline SimplexClassification classify_1d(const double* p, double tol) {
  SimplexClassification out;
  out.r = 3;
  double lam[3] = {p[1] - p[2], p[2] - p[0], p[0] - p[1]};
  const double s = 1.0 + max_abs_coord(p, 3);
  const double m = std::fmax(std::fmax(std::fabs(lam[0]), std::fabs(lam[1])), std::fabs(lam[2]));
  if (m <= kPivotRel * s) return out;
  classify_from_dependence(lam, 3, tol, out);
  return out;
}

// d = 2: dependence via signed-area cofactors of the 3x4 system.
inline SimplexClassification classify_2d(const double* p, double tol) {
  auto area2 = [&](int a, int b, int c) {
    return (p[2 * b] - p[2 * a]) * (p[2 * c + 1] - p[2 * a + 1]) -
           (p[2 * c] - p[2 * a]) * (p[2 * b + 1] - p[2 * a + 1]);
  };
  SimplexClassification out;
  out.r = 4;
  double lam[4] = {area2(1, 2, 3), -area2(0, 2, 3), area2(0, 1, 3), -area2(0, 1, 2)};
  const double s = 1.0 + max_abs_coord(p, 8);
  double m = 0.0;
  for (double l : lam) m = std::fmax(m, std::fabs(l));
  if (m <= kPivotRel * s * s) return out;  // cofactors scale as length^2
  classify_from_dependence(lam, 4, tol, out);
  return out;
}

}  // namespace detail

// Generic path: Gaussian elimination with full pivoting on the (d+1) x (d+2)
// system [coordinates; ones row], null vector by back substitution. Degenerate
// geometry (tiny pivot, pivot ratio past the condition cap) classifies as
// NotInSimplex, never an error.
inline SimplexClassification classify_simplex_pivoting(const double* pts, int d,
                                                       double tol = kInteriorTol) {
  const int r = d + 2;
  const int rows = d + 1;
  SimplexClassification out;
  out.r = r;

  double A[kMaxR - 1][kMaxR];
  for (int t = 0; t < d; ++t)
    for (int i = 0; i < r; ++i) A[t][i] = pts[i * d + t];
  for (int i = 0; i < r; ++i) A[d][i] = 1.0;

  const double piv_floor = kPivotRel * (1.0 + detail::max_abs_coord(pts, r * d));
  int colperm[kMaxR];
  for (int i = 0; i < r; ++i) colperm[i] = i;

  double piv_max = 0.0, piv_min = 0.0;
  for (int s = 0; s < rows; ++s) {
    int pr = s, pc = s;
    double best = 0.0;
    for (int t = s; t < rows; ++t)
      for (int c = s; c < r; ++c) {
        const double a = std::fabs(A[t][c]);
        if (a > best) {
          best = a;
          pr = t;
          pc = c;
        }
      }
    if (best <= piv_floor) return out;  // rank-deficient: degenerate tuple
    if (s == 0) {
      piv_max = piv_min = best;
    } else {
      piv_max = std::fmax(piv_max, best);
      piv_min = std::fmin(piv_min, best);
    }
    if (pr != s)
      for (int c = 0; c < r; ++c) std::swap(A[s][c], A[pr][c]);
    if (pc != s) {
      for (int t = 0; t < rows; ++t) std::swap(A[t][s], A[t][pc]);
      std::swap(colperm[s], colperm[pc]);
    }
    for (int t = s + 1; t < rows; ++t) {
      const double f = A[t][s] / A[s][s];
      A[t][s] = 0.0;
      if (f == 0.0) continue;
      for (int c = s + 1; c < r; ++c) A[t][c] -= f * A[s][c];
    }
  }
  if (piv_max > kMaxCondition * piv_min) return out;

  // Free variable is the one unpivoted column (position r-1 == rows).
  double lp[kMaxR];
  lp[rows] = 1.0;
  for (int s = rows - 1; s >= 0; --s) {
    double acc = A[s][r - 1];
    for (int t = s + 1; t < rows; ++t) acc += A[s][t] * lp[t];
    lp[s] = -acc / A[s][s];
  }
  double lam[kMaxR];
  for (int c = 0; c < r; ++c) lam[colperm[c]] = lp[c];
  detail::classify_from_dependence(lam, r, tol, out);
  return out;
}

//Erased-dimension entry point with closed-form fast paths for d = 1, 2.
inline SimplexClassification classify_simplex(const double* pts, int d,
                                              double tol = kInteriorTol) {
  if (d == 2) return detail::classify_2d(pts, tol);
  if (d == 1) return detail::classify_1d(pts, tol);
  return classify_simplex_pivoting(pts, d, tol);
}

inline SimplexClassification classify_simplex(const std::vector<double>& pts, int d,
                                              double tol = kInteriorTol) {
  return classify_simplex(pts.data(), d, tol);
}

// Simplex statistic w: the gap sum_{i != j} a_i y_i - y_j for the classified
// interior index j, 0 when no point is interior. Symmetric in its r arguments.
inline double w_identity(const double* pts, const double* ys, int d,
                         double tol = kInteriorTol) {
  const SimplexClassification c = classify_simplex(pts, d, tol);
  if (!c.inside()) return 0.0;
  double acc = -ys[c.j];
  for (int i = 0; i < c.r; ++i)
    if (i != c.j) acc += c.weights[i] * ys[i];
  return acc;
}

inline int w_sign(const double* pts, const double* ys, int d, double tol = kInteriorTol) {
  const double w = w_identity(pts, ys, d, tol);
  return (w > 0.0) - (w < 0.0);
}

}  // namespace sils
