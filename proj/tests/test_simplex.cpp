#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sils/rng.hpp"
#include "sils/simplex.hpp"

using namespace sils;

namespace {

std::vector<double> random_points(int r, int d, Philox& g, double lo = 0.0, double hi = 1.0) {
  std::vector<double> pts(static_cast<std::size_t>(r) * d);
  for (auto& x : pts) x = lo + (hi - lo) * uniform01(g);
  return pts;
}

double reconstruction_error(const std::vector<double>& pts, int d,
                            const SimplexClassification& c) {
  double err = 0.0;
  for (int t = 0; t < d; ++t) {
    double acc = 0.0;
    for (int i = 0; i < c.r; ++i)
      if (i != c.j) acc += c.weights[i] * pts[i * d + t];
    err = std::fmax(err, std::fabs(acc - pts[c.j * d + t]));
  }
  return err;
}

}  // namespace

TEST_CASE("classify_simplex: d=2 reference tuples", "[simplex]") {
  // v4 = 0.5 v1 + 0.25 v2 + 0.25 v3
  std::vector<double> pts = {0, 0, 1, 0, 0, 1, 0.25, 0.25};
  auto c = classify_simplex(pts, 2);
  REQUIRE(c.inside());
  CHECK(c.j == 3);
  CHECK(c.weights[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(c.weights[1] == Catch::Approx(0.25).margin(1e-12));
  CHECK(c.weights[2] == Catch::Approx(0.25).margin(1e-12));
  CHECK(c.weights[0] + c.weights[1] + c.weights[2] == Catch::Approx(1.0).margin(1e-9));

  std::vector<double> outside = {0, 0, 1, 0, 0, 1, 1, 1};
  CHECK_FALSE(classify_simplex(outside, 2).inside());
}

TEST_CASE("classify_simplex: d=1 midpoint", "[simplex]") {
  std::vector<double> pts = {0.0, 1.0, 0.5};
  auto c = classify_simplex(pts, 1);
  REQUIRE(c.inside());
  CHECK(c.j == 2);
  CHECK(c.weights[0] == Catch::Approx(0.5));
  CHECK(c.weights[1] == Catch::Approx(0.5));
}

TEST_CASE("classify_simplex: degenerate geometry maps to NotInSimplex", "[simplex]") {
  // coincident points
  std::vector<double> dup = {0.3, 0.3, 0.3, 0.3, 0.7, 0.1, 0.5, 0.9};
  CHECK_FALSE(classify_simplex(dup, 2).inside());
  // all collinear
  std::vector<double> line = {0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75};
  CHECK_FALSE(classify_simplex(line, 2).inside());
  // boundary: v4 on an edge of the triangle
  std::vector<double> edge = {0, 0, 1, 0, 0, 1, 0.5, 0.0};
  CHECK_FALSE(classify_simplex(edge, 2).inside());
  // d=1 tie
  std::vector<double> tie = {0.4, 0.4, 0.8};
  CHECK_FALSE(classify_simplex(tie, 1).inside());
}

TEST_CASE("w_identity: reference values", "[simplex]") {
  std::vector<double> pts = {0.0, 1.0, 0.5};
  std::vector<double> y1 = {0.0, 1.0, 0.4};
  CHECK(w_identity(pts.data(), y1.data(), 1) == Catch::Approx(0.1).margin(1e-12));
  std::vector<double> y2 = {0.0, 1.0, 0.5};  // affine response: exact interpolation
  CHECK(w_identity(pts.data(), y2.data(), 1) == Catch::Approx(0.0).margin(1e-12));
  std::vector<double> out = {0, 0, 1, 0, 0, 1, 1, 1};
  std::vector<double> yo = {1, 2, 3, 4};
  CHECK(w_identity(out.data(), yo.data(), 2) == 0.0);
}

TEST_CASE("w_sign: reference values", "[simplex]") {
  std::vector<double> pts = {0.0, 1.0, 0.5};
  std::vector<double> y1 = {0.0, 1.0, 0.4};
  CHECK(w_sign(pts.data(), y1.data(), 1) == 1);
  std::vector<double> y2 = {0.0, 1.0, 0.5};
  CHECK(w_sign(pts.data(), y2.data(), 1) == 0);
  std::vector<double> y3 = {0.0, 1.0, 0.6};
  CHECK(w_sign(pts.data(), y3.data(), 1) == -1);
}

TEST_CASE("w is invariant under all permutations of the tuple", "[simplex]") {
  for (int d : {1, 2}) {
    const int r = d + 2;
    Philox g(99, stream_id(StreamTag::noise, 0, 0, 0, d));
    for (int trial = 0; trial < 50; ++trial) {
      auto pts = random_points(r, d, g);
      std::vector<double> ys(r);
      for (auto& y : ys) y = uniform01(g);
      const double ref = w_identity(pts.data(), ys.data(), d);
      std::vector<int> perm(r);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        std::vector<double> ppts(pts.size()), pys(r);
        for (int i = 0; i < r; ++i) {
          pys[i] = ys[perm[i]];
          for (int c = 0; c < d; ++c) ppts[i * d + c] = pts[perm[i] * d + c];
        }
        REQUIRE(w_identity(ppts.data(), pys.data(), d) == Catch::Approx(ref).margin(1e-10));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST_CASE("classification is invariant under invertible affine maps", "[simplex]") {
  Philox g(7, stream_id(StreamTag::noise, 0, 0, 0, 42));
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto pts = random_points(4, 2, g);
    const auto base = classify_simplex(pts, 2);
    // random invertible affine map
    double A[4], t[2];
    do {
      for (double& a : A) a = 2.0 * uniform01(g) - 1.0;
    } while (std::fabs(A[0] * A[3] - A[1] * A[2]) < 0.1);
    for (double& x : t) x = 2.0 * uniform01(g) - 1.0;
    std::vector<double> mapped(8);
    for (int i = 0; i < 4; ++i) {
      mapped[2 * i] = A[0] * pts[2 * i] + A[1] * pts[2 * i + 1] + t[0];
      mapped[2 * i + 1] = A[2] * pts[2 * i] + A[3] * pts[2 * i + 1] + t[1];
    }
    const auto img = classify_simplex(mapped, 2);
    REQUIRE(base.inside() == img.inside());
    if (base.inside()) {
      ++checked;
      REQUIRE(img.j == base.j);
      for (int i = 0; i < 4; ++i)
        REQUIRE(img.weights[i] == Catch::Approx(base.weights[i]).margin(1e-8));
    }
  }
  REQUIRE(checked > 5);  // uniform square: interior tuples are ~7.6% of draws
}

TEST_CASE("localization scale/shift leaves classification unchanged", "[simplex]") {
  Philox g(11, stream_id(StreamTag::noise, 0, 0, 0, 3));
  for (int trial = 0; trial < 200; ++trial) {
    auto u = random_points(4, 2, g, -0.5, 0.5);
    const double b = 0.1 + uniform01(g);
    const double v[2] = {uniform01(g), uniform01(g)};
    std::vector<double> shifted(8);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 2; ++c) shifted[2 * i + c] = v[c] - b * u[2 * i + c];
    const auto a = classify_simplex(u, 2);
    const auto s = classify_simplex(shifted, 2);
    REQUIRE(a.inside() == s.inside());
    if (a.inside()) {
      REQUIRE(s.j == a.j);
      for (int i = 0; i < 4; ++i)
        REQUIRE(s.weights[i] == Catch::Approx(a.weights[i]).margin(1e-8));
    }
  }
}

TEST_CASE("convex responses give w >= 0, concave w <= 0", "[simplex]") {
  Philox g(5, stream_id(StreamTag::noise, 0, 0, 0, 8));
  for (int d : {1, 2}) {
    const int r = d + 2;
    int interior = 0;
    for (int trial = 0; trial < 10000 && interior < 2000; ++trial) {
      auto pts = random_points(r, d, g);
      const auto c = classify_simplex(pts, d);
      if (!c.inside()) continue;
      ++interior;
      std::vector<double> y_convex(r), y_concave(r);
      for (int i = 0; i < r; ++i) {
        double q = 0.0, lin = 0.0;
        for (int cc = 0; cc < d; ++cc) {
          q += pts[i * d + cc] * pts[i * d + cc];
          lin += pts[i * d + cc];
        }
        y_convex[i] = q;
        y_concave[i] = std::log1p(lin);
      }
      REQUIRE(w_identity(pts.data(), y_convex.data(), d) >= -1e-12);
      REQUIRE(w_identity(pts.data(), y_concave.data(), d) <= 1e-12);
    }
    REQUIRE(interior >= 100);
  }
}

TEST_CASE("weights reconstruct the interior point", "[simplex]") {
  Philox g(13, stream_id(StreamTag::noise, 0, 0, 0, 21));
  for (int d : {1, 2, 3, 4}) {
    const int r = d + 2;
    int interior = 0;
    for (int trial = 0; trial < 3000 && interior < 300; ++trial) {
      auto pts = random_points(r, d, g, -3.0, 5.0);
      const auto c = classify_simplex(pts, d);
      if (!c.inside()) continue;
      ++interior;
      double mx = 0.0;
      for (double x : pts) mx = std::fmax(mx, std::fabs(x));
      REQUIRE(reconstruction_error(pts, d, c) <= 1e-9 * (1.0 + mx));
      double sum = 0.0;
      for (int i = 0; i < r; ++i) sum += c.weights[i];
      REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
      for (int i = 0; i < r; ++i)
        if (i != c.j) REQUIRE(c.weights[i] > 0.0);
    }
    REQUIRE(interior >= 20);
  }
}

TEST_CASE("fast paths agree with the full-pivot elimination", "[simplex]") {
  Philox g(17, stream_id(StreamTag::noise, 0, 0, 0, 33));
  for (int d : {1, 2}) {
    const int r = d + 2;
    for (int trial = 0; trial < 5000; ++trial) {
      auto pts = random_points(r, d, g);
      const auto fast = classify_simplex(pts, d);
      const auto ref = classify_simplex_pivoting(pts.data(), d);
      REQUIRE(fast.inside() == ref.inside());
      if (fast.inside()) {
        REQUIRE(fast.j == ref.j);
        for (int i = 0; i < r; ++i)
          REQUIRE(fast.weights[i] == Catch::Approx(ref.weights[i]).margin(1e-9));
      }
    }
  }
}
