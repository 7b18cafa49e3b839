#pragma once

// Polygon kernel: vertex rings, area, exact intersection, IoU, rasterization.

#include <cstdint>
#include <span>
#include <vector>

#include "starpoly/model.hpp"

namespace starpoly {

struct Point {
  double row = 0.0;
  double col = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using VertexRing = std::vector<Point>;

struct BoundingBox {
  double row_min = 0.0;
  double col_min = 0.0;
  double row_max = 0.0;
  double col_max = 0.0;

  /// Closed-box overlap test; boxes that only touch count as intersecting.
  bool intersects(const BoundingBox& o) const {
    return row_min <= o.row_max && o.row_min <= row_max && col_min <= o.col_max &&
           o.col_min <= col_max;
  }
};

/// Vertex coordinates are snapped to this grid before any clipping.
inline constexpr double kSnapScale = 1048576.0;  // 2^20
double snap(double v);

/// Vertex k = center + r_k * (sin phi_k, cos phi_k), snapped to the 2^-20 grid.
VertexRing vertices(Pixel center, std::span<const double> radii, const RadialGeometry& geometry);
VertexRing vertices(const StarPolygon& poly, const RadialGeometry& geometry);
VertexRing vertices(const StarPolygon& poly);

double signed_area(std::span<const Point> ring);
double area(std::span<const Point> ring);
BoundingBox bounding_box(std::span<const Point> ring);

/// Intersection of two simple polygons as zero or more rings. Degenerate
/// (zero-area) inputs give an empty result.
std::vector<VertexRing> clip_intersection(std::span<const Point> a, std::span<const Point> b);

/// Area of the intersection region; 0 when bounding boxes are disjoint.
double intersection_area(std::span<const Point> a, std::span<const Point> b);

/// inter / (area(a) + area(b) - inter); 0 when both areas are 0.
double polygon_iou(std::span<const Point> a, std::span<const Point> b);

/// Overlap score from precomputed areas under the chosen measure.
double overlap_score(double inter, double area_a, double area_b, OverlapMeasure measure);

struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  bool at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t count() const;
};

/// Pixel-center containment under the even-odd rule with a top-left tie rule:
/// centers on a left or top edge are inside, on a right or bottom edge outside.
bool contains_center(std::span<const Point> ring, int row, int col);

/// Scanline fill of the pixels whose centers lie inside the ring.
Mask rasterize(std::span<const Point> ring, int height, int width);

/// Calls fn(row, col_begin, col_end) for each covered span, clipped to the image.
template <typename Fn>
void for_each_span(std::span<const Point> ring, int height, int width, Fn&& fn);

}  // namespace starpoly

#include "starpoly/detail/raster_spans.hpp"
