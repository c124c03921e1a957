#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sils/localize.hpp"
#include "sils/rng.hpp"

using namespace sils;

namespace {

Dataset make_1d(std::initializer_list<double> xs) {
  Dataset ds;
  ds.d = 1;
  for (double x : xs) {
    ds.v.push_back(x);
    ds.y.push_back(0.0);
  }
  return ds;
}

}  // namespace

TEST_CASE("kernel_weight: uniform kernel reference values", "[localize]") {
  Kernel uniform;
  {
    const double v = 0.4;
    const double pts[3] = {0.2, 0.6, 0.4};
    CHECK(kernel_weight(uniform, &v, pts, 3, 1, 1.0) == Catch::Approx(1.0));
  }
  {
    const double v = 0.4;
    const double pts[3] = {0.0, 1.0, 0.5};  // |1 - 0.4| = 0.6 >= 0.5
    CHECK(kernel_weight(uniform, &v, pts, 3, 1, 1.0) == 0.0);
  }
  {
    // d=2, b=0.5, all four points inside the box: 0.5^{1-8} = 128
    const double v[2] = {0.5, 0.5};
    const double pts[8] = {0.45, 0.5, 0.55, 0.5, 0.5, 0.45, 0.5, 0.55};
    CHECK(kernel_weight(uniform, v, pts, 4, 2, 0.5) == Catch::Approx(128.0));
  }
}

TEST_CASE("kernel_weight: uniform equals closed form on random inputs", "[localize]") {
  Kernel uniform;
  Philox g(3, stream_id(StreamTag::noise, 0, 0, 0, 1));
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(uniform_below(g, 3));
    const int r = d + 2;
    const double b = 0.2 + uniform01(g);
    double v[kMaxDim];
    for (int c = 0; c < d; ++c) v[c] = uniform01(g);
    std::vector<double> pts(static_cast<std::size_t>(r) * d);
    for (auto& x : pts) x = uniform01(g);
    bool in_box = true;
    for (int i = 0; i < r && in_box; ++i)
      for (int c = 0; c < d; ++c)
        if (!(std::fabs(v[c] - pts[i * d + c]) < 0.5 * b)) {
          in_box = false;
          break;
        }
    const double expect = in_box ? std::pow(b, 0.5 * d - static_cast<double>(d) * r) : 0.0;
    REQUIRE(kernel_weight(uniform, v, pts.data(), r, d, b) ==
            Catch::Approx(expect).margin(1e-9 * (1.0 + expect)));
  }
}

TEST_CASE("h_value: reference values and short-circuit", "[localize]") {
  Kernel uniform;
  const double v = 0.4;
  const double pts[3] = {0.2, 0.6, 0.4};
  const double ys[3] = {0.0, 1.0, 0.55};
  CHECK(h_value(KernelVariant::identity, uniform, &v, pts, ys, 3, 1, 1.0) ==
        Catch::Approx(-0.05).margin(1e-12));
  CHECK(h_value(KernelVariant::sign, uniform, &v, pts, ys, 3, 1, 1.0) == Catch::Approx(-1.0));
  const double far[3] = {0.2, 0.95, 0.4};  // one point outside the box
  CHECK(h_value(KernelVariant::identity, uniform, &v, far, ys, 3, 1, 1.0) == 0.0);
}

TEST_CASE("h_value vanishes whenever a point leaves the neighborhood", "[localize]") {
  Kernel uniform;
  Philox g(23, stream_id(StreamTag::noise, 0, 0, 0, 5));
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2, r = 4;
    const double b = 0.3 + 0.5 * uniform01(g);
    double v[2] = {uniform01(g), uniform01(g)};
    std::vector<double> pts(8), ys(4);
    for (auto& x : pts) x = uniform01(g);
    for (auto& y : ys) y = uniform01(g);
    Dataset ds;
    ds.d = d;
    ds.v = pts;
    ds.y = ys;
    const Neighborhood nd = neighborhood(ds, v, b);
    bool all_in = nd.size() == 4;
    const double h = h_value(KernelVariant::identity, uniform, v, pts.data(), ys.data(), r, d, b);
    if (!all_in) REQUIRE(h == 0.0);
  }
}

TEST_CASE("neighborhood: reference sets and boundary convention", "[localize]") {
  auto ds = make_1d({0.1, 0.5, 0.9});
  const double v = 0.5;
  auto nd = neighborhood(ds, &v, 0.5);
  REQUIRE(nd.idx == std::vector<int>{1});

  auto all = neighborhood(ds, &v, 2.0);
  REQUIRE(all.idx == std::vector<int>{0, 1, 2});

  Dataset empty;
  empty.d = 1;
  REQUIRE(neighborhood(empty, &v, 0.5).idx.empty());

  // A point exactly at distance b/2 belongs to ND but carries kernel weight 0.
  auto edge = make_1d({0.75});
  auto nd_edge = neighborhood(edge, &v, 0.5);
  REQUIRE(nd_edge.idx == std::vector<int>{0});
  Kernel uniform;
  const double pts[1] = {0.75};
  const double z[1] = {(v - pts[0]) / 0.5};
  CHECK(kernel_L(uniform, z, 1) == 0.0);
}

TEST_CASE("neighborhood: indexed lookup matches the plain scan", "[localize]") {
  Philox g(29, stream_id(StreamTag::noise, 0, 0, 0, 6));
  Dataset ds;
  ds.d = 3;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) ds.v.push_back(uniform01(g));
    ds.y.push_back(0.0);
  }
  const CoordIndex ix = build_coord_index(ds);
  for (int trial = 0; trial < 100; ++trial) {
    double v[3] = {uniform01(g), uniform01(g), uniform01(g)};
    const double b = 0.1 + 0.6 * uniform01(g);
    REQUIRE(neighborhood(ds, ix, v, b).idx == neighborhood(ds, v, b).idx);
  }
}

TEST_CASE("default query grids", "[localize]") {
  auto g2 = default_query_points(2);
  REQUIRE(g2.size() == 25 * 2);
  CHECK(g2[0] == 0.3);
  CHECK(g2[1] == 0.3);
  CHECK(g2[g2.size() - 2] == 0.7);
  auto g3 = default_query_points(3);
  REQUIRE(g3.size() == 27 * 3);
  auto g4 = default_query_points(4);
  REQUIRE(g4.size() == 81 * 4);
  auto g1 = default_query_points(1);
  REQUIRE(g1.size() == 5);
}
