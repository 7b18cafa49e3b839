#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "starpoly/geometry.hpp"

using namespace starpoly;

namespace {

VertexRing rect(double r0, double c0, double r1, double c1) {
  // positive orientation in (row, col)
  return {{r0, c0}, {r0, c1}, {r1, c1}, {r1, c0}};
}

VertexRing reversed(VertexRing r) {
  std::reverse(r.begin(), r.end());
  return r;
}

double rings_area(const std::vector<VertexRing>& rings) {
  double s = 0.0;
  for (const auto& r : rings) s += area(r);
  return s;
}

}  // namespace

TEST(Area, Basics) {
  EXPECT_DOUBLE_EQ(area(rect(0, 0, 3, 4)), 12.0);
  EXPECT_DOUBLE_EQ(signed_area(rect(0, 0, 3, 4)), -signed_area(reversed(rect(0, 0, 3, 4))));
  const VertexRing tri{{0, 0}, {0, 4}, {3, 0}};
  EXPECT_DOUBLE_EQ(area(tri), 6.0);
  EXPECT_EQ(area(VertexRing{{0, 0}, {1, 1}}), 0.0);
}

TEST(Vertices, FollowRayConventionAndSnap) {
  const RadialGeometry g(4);
  const auto ring = vertices(Pixel{10, 20}, std::vector<double>{1, 2, 3, 4}, g);
  ASSERT_EQ(ring.size(), 4u);
  EXPECT_EQ(ring[0], (Point{10, 21}));
  EXPECT_EQ(ring[1], (Point{12, 20}));
  EXPECT_EQ(ring[2], (Point{10, 17}));
  EXPECT_EQ(ring[3], (Point{6, 20}));
  const auto odd = vertices(Pixel{0, 0}, std::vector<double>{1.1, 1.3, 1.7}, RadialGeometry(3));
  for (const auto& p : odd) {
    EXPECT_EQ(p.row * kSnapScale, std::round(p.row * kSnapScale));
    EXPECT_EQ(p.col * kSnapScale, std::round(p.col * kSnapScale));
  }
}

TEST(Intersection, AxisAlignedCases) {
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(5, 5, 15, 15)), 25.0);
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(2, 3, 4, 8)), 10.0);
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(20, 20, 30, 30)), 0.0);
  // shared edge only, shared corner only
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(0, 10, 10, 20)), 0.0);
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(10, 10, 20, 20)), 0.0);
  // identical, and identical with opposite orientation
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(0, 0, 10, 10)), 100.0);
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), reversed(rect(0, 0, 10, 10))), 100.0);
  // partially shared edges
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(0, 5, 10, 15)), 50.0);
  EXPECT_DOUBLE_EQ(intersection_area(rect(0, 0, 10, 10), rect(2, 0, 6, 10)), 40.0);
}

TEST(Intersection, CrossShapeHasOneRing) {
  const auto rings = clip_intersection(rect(0, 4, 12, 8), rect(4, 0, 8, 12));
  ASSERT_EQ(rings.size(), 1u);
  EXPECT_DOUBLE_EQ(area(rings[0]), 16.0);
}

TEST(Intersection, NonConvexGivesSeveralRings) {
  // U shape cut by a bar across both arms
  const VertexRing u{{0, 0}, {0, 3}, {7, 3}, {7, 6}, {0, 6}, {0, 9}, {10, 9}, {10, 0}};
  const auto bar = rect(2, -1, 4, 10);
  const auto rings = clip_intersection(u, bar);
  EXPECT_EQ(rings.size(), 2u);
  EXPECT_DOUBLE_EQ(rings_area(rings), 12.0);
  EXPECT_DOUBLE_EQ(intersection_area(u, bar), 12.0);
}

TEST(Intersection, DegenerateInputsAreEmpty) {
  EXPECT_EQ(intersection_area(VertexRing{{0, 0}, {1, 1}, {2, 2}}, rect(0, 0, 3, 3)), 0.0);
  EXPECT_TRUE(clip_intersection(VertexRing{}, rect(0, 0, 3, 3)).empty());
}

TEST(Intersection, AgreesWithSupersamplingOnRandomStars) {
  oracle::Rng rng(21);
  int checked = 0;
  while (checked < 150) {
    const int n = oracle::randint(rng, 0, 1) ? 32 : oracle::randint(rng, 3, 64);
    const auto a = oracle::random_star(rng, n, 30.3, 30.7, 8, 16);
    const auto b = oracle::random_star(rng, n, oracle::randreal(rng, 22, 38),
                                       oracle::randreal(rng, 22, 38), 8, 16);
    const double exact = intersection_area(a, b);
    if (exact < 200) continue;
    ++checked;
    const double ref = oracle::supersampled_intersection(a, b);
    EXPECT_LE(std::abs(exact - ref) / exact, 0.02) << "pair " << checked;
    EXPECT_NEAR(exact, intersection_area(b, a), 1e-7 * exact);
    EXPECT_NEAR(exact, rings_area(clip_intersection(a, b)), 1e-7 * exact);
    // inputs are snapped to the 2^-20 grid first
    EXPECT_LE(exact, std::min(area(a), area(b)) * (1 + 1e-6));
  }
}

TEST(Intersection, SharedVerticesAndEdgesAreRobust) {
  // polygons built from the same ray geometry share many collinear edges
  oracle::Rng rng(22);
  const RadialGeometry g(16);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> ra, rb;
    for (int k = 0; k < 16; ++k) {
      ra.push_back(oracle::randint(rng, 3, 8));
      rb.push_back(oracle::randint(rng, 0, 1) ? ra.back() : oracle::randint(rng, 3, 8));
    }
    const auto a = vertices(Pixel{20, 20}, ra, g);
    const auto b = vertices(Pixel{20, 20}, rb, g);
    const double exact = intersection_area(a, b);
    const double ref = oracle::supersampled_intersection(a, b, 16);
    EXPECT_NEAR(exact, ref, 0.02 * std::max(1.0, ref)) << "case " << t;
    EXPECT_NEAR(intersection_area(a, a), area(a), 1e-9 * area(a));
  }
}

TEST(Intersection, TranslationInvariant) {
  oracle::Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    auto a = oracle::random_star(rng, 32, 10, 10, 4, 9);
    auto b = oracle::random_star(rng, 32, 13, 12, 4, 9);
    const double base = intersection_area(a, b);
    for (auto* ring : {&a, &b}) {
      for (auto& p : *ring) p = {p.row + 100, p.col - 37};
    }
    EXPECT_NEAR(intersection_area(a, b), base, 1e-9 * std::max(1.0, base));
  }
}

TEST(Iou, RangeAndMeasures) {
  const auto a = rect(0, 0, 10, 10), b = rect(5, 0, 15, 10);
  EXPECT_DOUBLE_EQ(polygon_iou(a, b), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(polygon_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(overlap_score(25.0, 100.0, 25.0, OverlapMeasure::kIntersectionOverSmaller), 1.0);
  EXPECT_DOUBLE_EQ(overlap_score(25.0, 100.0, 25.0, OverlapMeasure::kIoU), 0.25);
  EXPECT_EQ(overlap_score(0.0, 0.0, 0.0, OverlapMeasure::kIoU), 0.0);
}

TEST(Rasterize, TopLeftRule) {
  // [1,4) x [2,5) in pixel-center terms: rows 1..3, cols 2..4
  const auto m = rasterize(rect(1, 2, 4, 5), 8, 8);
  EXPECT_EQ(m.count(), 9u);
  EXPECT_TRUE(m.at(1, 2));
  EXPECT_FALSE(m.at(4, 2));
  EXPECT_FALSE(m.at(1, 5));
  EXPECT_TRUE(contains_center(rect(1, 2, 4, 5), 1, 2));
  EXPECT_FALSE(contains_center(rect(1, 2, 4, 5), 4, 4));
}

TEST(Rasterize, ClipsToImage) {
  const auto m = rasterize(rect(-5, -5, 3.5, 100), 6, 10);
  EXPECT_EQ(m.count(), 40u);
}

TEST(Rasterize, MatchesPerPixelContainment) {
  oracle::Rng rng(24);
  for (int t = 0; t < 100; ++t) {
    const auto ring = oracle::random_star(rng, oracle::randint(rng, 3, 40),
                                          oracle::randint(rng, 0, 30), oracle::randint(rng, 0, 30),
                                          2, 12);
    const auto m = rasterize(ring, 30, 30);
    for (int r = 0; r < 30; ++r) {
      for (int c = 0; c < 30; ++c) ASSERT_EQ(m.at(r, c), contains_center(ring, r, c));
    }
  }
}

TEST(Rasterize, AdjacentPolygonsNeverDoubleClaim) {
  // a square cut into fans around an interior point with integer vertices,
  // so many edges pass through pixel centers
  const Point mid{6, 6};
  const std::vector<Point> corners{{0, 0}, {0, 12}, {12, 12}, {12, 0}};
  std::vector<int> hits(14 * 14, 0);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const VertexRing tri{mid, corners[i], corners[(i + 1) % 4]};
    const auto m = rasterize(tri, 14, 14);
    for (std::size_t p = 0; p < m.data.size(); ++p) hits[p] += m.data[p];
  }
  const auto whole = rasterize(VertexRing(corners.begin(), corners.end()), 14, 14);
  for (std::size_t p = 0; p < hits.size(); ++p) EXPECT_EQ(hits[p], whole.data[p]) << p;
}

TEST(Rasterize, CountApproximatesArea) {
  oracle::Rng rng(25);
  for (int t = 0; t < 20; ++t) {
    const auto ring = oracle::random_star(rng, 32, 50.4, 49.8, 20, 35);
    const double a = area(ring);
    EXPECT_NEAR(static_cast<double>(rasterize(ring, 100, 100).count()), a, 0.05 * a);
  }
}
