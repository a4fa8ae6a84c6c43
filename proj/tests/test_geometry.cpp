#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cadkit/geometry.hpp"

using namespace cadkit;

namespace {

Contour regular_polygon(std::size_t sides, double radius, double phase = 0.0, Point2 c = {0, 0}) {
  std::vector<Point2> pts;
  for (std::size_t k = 0; k < sides; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sides);
    pts.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t)});
  }
  return Contour(std::move(pts));
}

Contour ellipse(double a, double b, std::size_t sides) {
  std::vector<Point2> pts;
  for (std::size_t k = 0; k < sides; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sides);
    pts.push_back({a * std::cos(t), b * std::sin(t)});
  }
  return Contour(std::move(pts));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Centroid, UnitSquare) {
  const Contour sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto g = centroid(sq);
  EXPECT_DOUBLE_EQ(g.x, 0.5);
  EXPECT_DOUBLE_EQ(g.y, 0.5);
}

TEST(Centroid, TriangleIsVertexMean) {
  const Contour tri({{0, 0}, {3, 0}, {0, 3}});
  const auto g = centroid(tri);
  EXPECT_NEAR(g.x, 1.0, 1e-12);
  EXPECT_NEAR(g.y, 1.0, 1e-12);
}

TEST(Centroid, CollinearIsDegenerate) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_EQ(code_of([&] { centroid(std::span<const Point2>(pts)); }), ErrorCode::DegeneratePolygon);
}

TEST(Centroid, OrientationIndependent) {
  const Contour ccw({{0, 0}, {4, 0}, {4, 2}, {0, 2}});
  const Contour cw({{0, 2}, {4, 2}, {4, 0}, {0, 0}});
  EXPECT_NEAR(centroid(ccw).x, centroid(cw).x, 1e-12);
  EXPECT_NEAR(centroid(ccw).y, centroid(cw).y, 1e-12);
}

TEST(ContourValidation, RejectsBadInput) {
  EXPECT_EQ(code_of([] { Contour({{0, 0}, {1, 0}}); }), ErrorCode::InvalidContour);
  EXPECT_EQ(code_of([] { Contour({{0, 0}, {1, 0}, {1, 0}, {0, 1}}); }), ErrorCode::InvalidContour);
  EXPECT_EQ(code_of([] { Contour({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }), ErrorCode::InvalidContour);
  EXPECT_EQ(code_of([] { Contour({{0, 0}, {NAN, 0}, {0, 1}}); }), ErrorCode::InvalidContour);
}

TEST(RadialSignal, CircleIsConstant) {
  const auto s = radial_distance_signal(regular_polygon(64, 1.0), 8);
  ASSERT_EQ(s.size(), 8u);
  for (double v : s.samples) EXPECT_NEAR(v, 1.0, 0.01);
}

TEST(RadialSignal, SquareAxisAndDiagonal) {
  const Contour sq({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto s = radial_distance_signal(sq, 8);
  EXPECT_NEAR(s.samples[0], 1.0, 1e-12);
  EXPECT_NEAR(s.samples[1], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.samples[2], 1.0, 1e-12);
}

TEST(RadialSignal, EllipseSemiAxes) {
  const auto s = radial_distance_signal(ellipse(2.0, 1.0, 256), 8);
  EXPECT_NEAR(s.samples[0], 2.0, 1e-9);
  EXPECT_NEAR(s.samples[2], 1.0, 1e-9);
}

TEST(RadialSignal, RejectsNonPowerOfTwo) {
  EXPECT_EQ(code_of([] { radial_distance_signal(regular_polygon(16, 1.0), 12); }),
            ErrorCode::LengthNotPowerOfTwo);
}

TEST(RadialSignal, CentroidOutsideCrescent) {
  // Thin C shape: its area centroid falls in the notch.
  std::vector<Point2> pts;
  const std::size_t m = 40;
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = 0.3 + (2 * std::numbers::pi - 0.6) * static_cast<double>(k) / m;
    pts.push_back({std::cos(t), std::sin(t)});
  }
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = 2 * std::numbers::pi - 0.3 - (2 * std::numbers::pi - 0.6) * static_cast<double>(k) / m;
    pts.push_back({0.9 * std::cos(t), 0.9 * std::sin(t)});
  }
  const Contour c(std::move(pts));
  EXPECT_EQ(code_of([&] { radial_distance_signal(c, 16); }), ErrorCode::CentroidOutside);
}

TEST(RadialSignal, NonConvexTakesFarthestHit) {
  // Star polygon: rays through the concave notches cross the boundary three times.
  std::vector<Point2> pts;
  for (int k = 0; k < 10; ++k) {
    const double r = k % 2 == 0 ? 2.0 : 0.8;
    const double t = std::numbers::pi * k / 5.0 + 0.01;
    pts.push_back({r * std::cos(t), r * std::sin(t)});
  }
  const Contour star(pts);
  const auto g = centroid(star);
  const auto s = radial_distance_signal(star, 64);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double th = 2 * std::numbers::pi * static_cast<double>(k) / 64.0;
    EXPECT_NEAR(s.samples[k], farthest_ray_hit(star.points(), g, std::cos(th), std::sin(th)), 0);
    EXPECT_LE(s.samples[k], 2.0 + 1e-9);
  }
}

TEST(RadialSignal, RotationShiftsSamples) {
  const std::size_t n = 64;
  // An irregular convex-ish polygon centred on its own centroid.
  std::vector<Point2> base;
  for (int k = 0; k < 37; ++k) {
    const double t = 2 * std::numbers::pi * k / 37.0;
    const double r = 1.0 + 0.2 * std::cos(3 * t) + 0.1 * std::sin(5 * t);
    base.push_back({r * std::cos(t), r * std::sin(t)});
  }
  const Contour c0(base);
  const auto g = centroid(c0);
  const auto s0 = radial_distance_signal(c0, n);
  for (std::size_t j : {1u, 5u, 17u}) {
    const double a = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    std::vector<Point2> rot;
    for (const auto& p : base) {
      const double x = p.x - g.x, y = p.y - g.y;
      rot.push_back({g.x + x * std::cos(a) - y * std::sin(a), g.y + x * std::sin(a) + y * std::cos(a)});
    }
    const auto s1 = radial_distance_signal(Contour(rot), n);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(s1.samples[(k + j) % n], s0.samples[k], 1e-6);
  }
}

TEST(RadialSignal, ScalingIsLinearAndNormalizedInvariant) {
  const auto c = ellipse(3.0, 1.5, 128);
  std::vector<Point2> scaled;
  for (const auto& p : c.points()) scaled.push_back({2.5 * p.x, 2.5 * p.y});
  const auto s0 = radial_distance_signal(c, 32);
  const auto s1 = radial_distance_signal(Contour(scaled), 32);
  const auto n0 = normalize_signal(s0), n1 = normalize_signal(s1);
  for (std::size_t k = 0; k < 32; ++k) {
    EXPECT_NEAR(s1.samples[k], 2.5 * s0.samples[k], 1e-12);
    EXPECT_NEAR(n1.samples[k], n0.samples[k], 1e-12);
  }
}

TEST(Normalize, Examples) {
  const auto a = normalize_signal({{2, 2, 2, 2}, false});
  for (double v : a.samples) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_TRUE(a.normalized);
  const auto b = normalize_signal({{1, 3}, false});
  EXPECT_DOUBLE_EQ(b.samples[0], 0.5);
  EXPECT_DOUBLE_EQ(b.samples[1], 1.5);
  const auto c = normalize_signal(b);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(c.samples[i], b.samples[i], 1e-9);
}
