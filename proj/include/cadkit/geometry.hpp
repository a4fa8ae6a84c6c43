#pragma once

// Closed mass contours and their centroid-to-boundary radial distance signal.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cadkit/core.hpp"

namespace cadkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

namespace detail {

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

inline int orientation(const Point2& o, const Point2& a, const Point2& b) {
  const double c = cross(o, a, b);
  return (c > 0) - (c < 0);
}

inline bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                               const Point2& q2) {
  const int d1 = orientation(q1, q2, p1);
  const int d2 = orientation(q1, q2, p2);
  const int d3 = orientation(p1, p2, q1);
  const int d4 = orientation(p1, p2, q2);
  if (d1 != d2 && d3 != d4) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

}  // namespace detail

/// True when no two non-adjacent edges of the closed polygon touch.
inline bool is_simple_polygon(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a1 = pts[i];
    const Point2& a2 = pts[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // shared vertex
      if (detail::segments_intersect(a1, a2, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Closed polygon with at least three distinct consecutive vertices and no
/// self-intersections. The last vertex connects back to the first.
class Contour {
 public:
  explicit Contour(std::vector<Point2> points) : points_(std::move(points)) {
    require(points_.size() >= 3, ErrorCode::InvalidContour, "contour needs at least 3 vertices");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Point2& p = points_[i];
      require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::InvalidContour,
              "non-finite vertex " + std::to_string(i));
      require(!(p == points_[(i + 1) % points_.size()]), ErrorCode::InvalidContour,
              "repeated consecutive vertex " + std::to_string(i));
    }
    require(is_simple_polygon(points_), ErrorCode::InvalidContour,
            "contour is self-intersecting");
  }

  const std::vector<Point2>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<Point2> points_;
};

/// Signed shoelace area (positive for counter-clockwise traversal).
inline double signed_area(std::span<const Point2> pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2& p = pts[i];
    const Point2& q = pts[(i + 1) % pts.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

namespace detail {

inline Point2 polygon_centroid(std::span<const Point2> pts) {
  const double area = signed_area(pts);
  require(std::abs(area) > 1e-12, ErrorCode::DegeneratePolygon, "polygon area is zero");
  // Shift to the first vertex so large pixel coordinates do not cancel.
  const Point2 o = pts[0];
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double px = pts[i].x - o.x, py = pts[i].y - o.y;
    const Point2& qn = pts[(i + 1) % pts.size()];
    const double qx = qn.x - o.x, qy = qn.y - o.y;
    const double c = px * qy - qx * py;
    cx += (px + qx) * c;
    cy += (py + qy) * c;
  }
  return {o.x + cx / (6.0 * area), o.y + cy / (6.0 * area)};
}

}  // namespace detail

/// Area-weighted centroid. Throws DegeneratePolygon for zero-area input.
inline Point2 centroid(const Contour& c) { return detail::polygon_centroid(c.points()); }

/// Area-weighted centroid of a raw vertex list; lets degenerate input (which
/// Contour rejects up front) reach the DegeneratePolygon check.
inline Point2 centroid(std::span<const Point2> pts) {
  require(pts.size() >= 3, ErrorCode::InvalidContour, "contour needs at least 3 vertices");
  return detail::polygon_centroid(pts);
}

/// Strict interior test: false on the boundary.
inline bool strictly_inside(const Contour& c, const Point2& p) {
  const auto& pts = c.points();
  const std::size_t n = pts.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = pts[i];
    const Point2& b = pts[j];
    if (detail::orientation(a, b, p) == 0 && detail::on_segment(p, a, b)) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

struct RadialSignal {
  std::vector<double> samples;
  bool normalized = false;

  std::size_t size() const noexcept { return samples.size(); }
};

inline constexpr std::size_t kDefaultRadialSamples = 256;

/// Distance along the ray origin + t*dir to the farthest edge hit, or a
/// negative value when the ray misses every edge.
inline double farthest_ray_hit(std::span<const Point2> pts, const Point2& origin, double dx,
                               double dy) {
  double best = -1.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = pts[i];
    const Point2& q = pts[(i + 1) % n];
    const double ex = q.x - p.x, ey = q.y - p.y;
    const double denom = dx * ey - dy * ex;
    if (denom == 0.0) continue;  // parallel; collinear overlap is covered by adjacent edges
    const double wx = p.x - origin.x, wy = p.y - origin.y;
    const double t = (wx * ey - wy * ex) / denom;
    const double u = (wx * dy - wy * dx) / denom;
    if (t > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::max(best, t);
  }
  return best;
}

/// Centroid-to-boundary distance sampled at angles 2*pi*k/n. When a ray
/// crosses the boundary more than once the farthest crossing is kept.
inline RadialSignal radial_distance_signal(const Contour& c,
                                           std::size_t n = kDefaultRadialSamples) {
  require(is_power_of_two(n) && n >= 8, ErrorCode::LengthNotPowerOfTwo,
          "radial sample count must be a power of two >= 8, got " + std::to_string(n));
  const Point2 g = centroid(c);
  require(strictly_inside(c, g), ErrorCode::CentroidOutside,
          "centroid is not strictly inside the contour");
  RadialSignal out;
  out.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const double t = farthest_ray_hit(c.points(), g, std::cos(theta), std::sin(theta));
    require(t > 0.0, ErrorCode::NoIntersection, "ray " + std::to_string(k) + " missed the boundary");
    out.samples[k] = t;
  }
  return out;
}

/// Divides every sample by the signal mean.
inline RadialSignal normalize_signal(const RadialSignal& s) {
  require(!s.samples.empty(), ErrorCode::InvalidArgument, "empty signal");
  const double mean =
      std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / static_cast<double>(s.size());
  require(mean > 0.0, ErrorCode::InvalidArgument, "signal mean must be positive");
  RadialSignal out{s.samples, true};
  for (double& v : out.samples) v /= mean;
  return out;
}

}  // namespace cadkit
