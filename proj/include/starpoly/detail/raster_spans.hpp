#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace starpoly {

namespace detail {

// Column where edge (r0,c0)-(r1,c1) crosses the horizontal line through row.
inline double edge_crossing(const Point& p0, const Point& p1, double row) {
  return p0.col + (row - p0.row) * (p1.col - p0.col) / (p1.row - p0.row);
}

// Half-open row span: an edge covers rows in [min_row, max_row).
inline bool edge_spans_row(const Point& p0, const Point& p1, double row) {
  return (p0.row <= row && row < p1.row) || (p1.row <= row && row < p0.row);
}

}  // namespace detail

template <typename Fn>
void for_each_span(std::span<const Point> ring, int height, int width, Fn&& fn) {
  if (ring.size() < 3 || height <= 0 || width <= 0) return;
  const auto box = bounding_box(ring);
  const int row_begin = std::max(0, static_cast<int>(std::ceil(box.row_min)));
  const int row_end = std::min(height - 1, static_cast<int>(std::floor(box.row_max)));
  std::vector<double> xs;
  for (int row = row_begin; row <= row_end; ++row) {
    xs.clear();
    const double y = row;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point& p0 = ring[i];
      const Point& p1 = ring[(i + 1) % ring.size()];
      if (detail::edge_spans_row(p0, p1, y)) xs.push_back(detail::edge_crossing(p0, p1, y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const double lo = std::ceil(xs[i]);
      const double hi = std::ceil(xs[i + 1]);
      const int c0 = static_cast<int>(std::clamp(lo, 0.0, static_cast<double>(width)));
      const int c1 = static_cast<int>(std::clamp(hi, 0.0, static_cast<double>(width)));
      if (c0 < c1) fn(row, c0, c1);
    }
  }
}

}  // namespace starpoly
