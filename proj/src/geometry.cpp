#include "starpoly/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace starpoly {

double snap(double v) { return std::round(v * kSnapScale) / kSnapScale; }

VertexRing vertices(Pixel center, std::span<const double> radii, const RadialGeometry& geometry) {
  if (static_cast<int>(radii.size()) != geometry.n_rays()) {
    throw std::invalid_argument("radius count does not match ray geometry");
  }
  VertexRing ring(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const auto& d = geometry.direction(static_cast<int>(k));
    ring[k] = {snap(center.row + radii[k] * d.drow), snap(center.col + radii[k] * d.dcol)};
  }
  return ring;
}

VertexRing vertices(const StarPolygon& poly, const RadialGeometry& geometry) {
  return vertices(poly.center, poly.radii, geometry);
}

VertexRing vertices(const StarPolygon& poly) {
  return vertices(poly, RadialGeometry(poly.n_rays()));
}

double signed_area(std::span<const Point> ring) {
  if (ring.size() < 3) return 0.0;
  const Point o = ring[0];
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    const double ar = ring[i].row - o.row, ac = ring[i].col - o.col;
    const double br = ring[i + 1].row - o.row, bc = ring[i + 1].col - o.col;
    sum += ac * br - ar * bc;
  }
  return 0.5 * sum;
}

double area(std::span<const Point> ring) { return std::abs(signed_area(ring)); }

BoundingBox bounding_box(std::span<const Point> ring) {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const auto& p : ring) {
    b.row_min = std::min(b.row_min, p.row);
    b.row_max = std::max(b.row_max, p.row);
    b.col_min = std::min(b.col_min, p.col);
    b.col_max = std::max(b.col_max, p.col);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Intersection of simple polygons.
//
// Both rings are snapped to the integer grid (units of 2^-20 px) and oriented
// positively. Every edge is split at all contacts with the other ring, found
// with exact integer orientation predicates. A sub-segment of A belongs to the
// intersection boundary if it lies inside B, or on an edge of B with the same
// direction; a sub-segment of B belongs if it lies strictly inside A. The
// selected directed segments are chained into rings.
// ---------------------------------------------------------------------------

namespace {

using i128 = __int128;

struct GridPt {
  std::int64_t r;
  std::int64_t c;
  friend bool operator==(const GridPt&, const GridPt&) = default;
};

i128 cross(std::int64_t ar, std::int64_t ac, std::int64_t br, std::int64_t bc) {
  return static_cast<i128>(ac) * br - static_cast<i128>(ar) * bc;
}

int orient(const GridPt& a, const GridPt& b, const GridPt& p) {
  const i128 v = cross(b.r - a.r, b.c - a.c, p.r - a.r, p.c - a.c);
  return (v > 0) - (v < 0);
}

i128 dot(std::int64_t ar, std::int64_t ac, std::int64_t br, std::int64_t bc) {
  return static_cast<i128>(ar) * br + static_cast<i128>(ac) * bc;
}

Point to_point(const GridPt& g) {
  return {static_cast<double>(g.r) / kSnapScale, static_cast<double>(g.c) / kSnapScale};
}

struct GridBox {
  std::int64_t r_min, r_max, c_min, c_max;
  bool disjoint(const GridBox& o) const {
    return r_max < o.r_min || o.r_max < r_min || c_max < o.c_min || o.c_max < c_min;
  }
};

// Edges are grouped in runs of kBlock consecutive edges with a shared box;
// consecutive edges of a star polygon are spatially coherent.
constexpr std::size_t kBlock = 8;

struct GridRing {
  std::vector<GridPt> pts;
  std::int64_t r_min, r_max, c_min, c_max;
  std::vector<GridBox> blocks;  // block b covers edges [b*kBlock, (b+1)*kBlock)
};

// Snap, drop repeated vertices, orient positively. Empty if degenerate.
GridRing to_grid(std::span<const Point> ring) {
  GridRing out{};
  for (const auto& p : ring) {
    const GridPt g{std::llround(p.row * kSnapScale), std::llround(p.col * kSnapScale)};
    if (out.pts.empty() || !(out.pts.back() == g)) out.pts.push_back(g);
  }
  while (out.pts.size() > 1 && out.pts.front() == out.pts.back()) out.pts.pop_back();
  if (out.pts.size() < 3) {
    out.pts.clear();
    return out;
  }
  i128 twice_area = 0;
  for (std::size_t i = 1; i + 1 < out.pts.size(); ++i) {
    const auto& o = out.pts[0];
    twice_area += cross(out.pts[i].r - o.r, out.pts[i].c - o.c, out.pts[i + 1].r - o.r,
                        out.pts[i + 1].c - o.c);
  }
  if (twice_area == 0) {
    out.pts.clear();
    return out;
  }
  if (twice_area < 0) std::reverse(out.pts.begin(), out.pts.end());
  out.r_min = out.r_max = out.pts[0].r;
  out.c_min = out.c_max = out.pts[0].c;
  for (const auto& g : out.pts) {
    out.r_min = std::min(out.r_min, g.r);
    out.r_max = std::max(out.r_max, g.r);
    out.c_min = std::min(out.c_min, g.c);
    out.c_max = std::max(out.c_max, g.c);
  }
  const std::size_t n = out.pts.size();
  for (std::size_t b = 0; b * kBlock < n; ++b) {
    const auto& first = out.pts[b * kBlock];
    GridBox box{first.r, first.r, first.c, first.c};
    for (std::size_t i = b * kBlock + 1; i <= std::min(n, (b + 1) * kBlock); ++i) {
      const auto& g = out.pts[i % n];
      box.r_min = std::min(box.r_min, g.r);
      box.r_max = std::max(box.r_max, g.r);
      box.c_min = std::min(box.c_min, g.c);
      box.c_max = std::max(box.c_max, g.c);
    }
    out.blocks.push_back(box);
  }
  return out;
}

struct SplitPoint {
  double t;
  Point p;
};

struct CollinearSpan {
  double t_lo, t_hi;  // along the edge being split
  bool same_direction;
};

struct EdgeContacts {
  std::vector<SplitPoint> splits;
  std::vector<CollinearSpan> shared;
};

// Parameter of grid point q projected on segment p0->p1, as a double.
double param_on(const GridPt& p0, const GridPt& p1, const GridPt& q) {
  const i128 num = dot(q.r - p0.r, q.c - p0.c, p1.r - p0.r, p1.c - p0.c);
  const i128 den = dot(p1.r - p0.r, p1.c - p0.c, p1.r - p0.r, p1.c - p0.c);
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// Exact test that q lies strictly between p0 and p1, given collinearity.
bool strictly_inside_collinear(const GridPt& p0, const GridPt& p1, const GridPt& q) {
  const i128 num = dot(q.r - p0.r, q.c - p0.c, p1.r - p0.r, p1.c - p0.c);
  const i128 den = dot(p1.r - p0.r, p1.c - p0.c, p1.r - p0.r, p1.c - p0.c);
  return num > 0 && num < den;
}

// Even-odd containment of a point given in pixel units; boundary points are
// never queried (every boundary contact is a split point).
// Blocks whose rows miss `row`, or that lie entirely left of `col`, contain no
// edge that can toggle the crossing parity.
bool point_in_ring(const std::vector<Point>& ring, const std::vector<GridBox>& blocks, double row,
                   double col) {
  bool inside = false;
  const std::size_t n = ring.size();
  const double grid_row = row * kSnapScale, grid_col = col * kSnapScale;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& box = blocks[b];
    if (grid_row < static_cast<double>(box.r_min) || grid_row > static_cast<double>(box.r_max) ||
        grid_col > static_cast<double>(box.c_max)) {
      continue;
    }
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const Point& a = ring[i];
      const Point& c = ring[(i + 1) % n];
      if ((a.row > row) != (c.row > row)) {
        const double x = a.col + (row - a.row) * (c.col - a.col) / (c.row - a.row);
        if (col < x) inside = !inside;
      }
    }
  }
  return inside;
}

struct Segment {
  Point from, to;
};

class Clipper {
 public:
  Clipper(GridRing a, GridRing b) : a_(std::move(a)), b_(std::move(b)) {
    for (const auto& g : a_.pts) a_pts_.push_back(to_point(g));
    for (const auto& g : b_.pts) b_pts_.push_back(to_point(g));
    a_contacts_.resize(a_.pts.size());
    b_contacts_.resize(b_.pts.size());
    find_contacts();
    select(a_, a_pts_, a_contacts_, b_pts_, b_.blocks, true);
    select(b_, b_pts_, b_contacts_, a_pts_, a_.blocks, false);
  }

  const std::vector<Segment>& segments() const { return segments_; }

 private:
  void find_contacts() {
    const std::size_t na = a_.pts.size(), nb = b_.pts.size();
    const GridBox b_box{b_.r_min, b_.r_max, b_.c_min, b_.c_max};
    for (std::size_t ba = 0; ba < a_.blocks.size(); ++ba) {
      if (a_.blocks[ba].disjoint(b_box)) continue;
      for (std::size_t bb = 0; bb < b_.blocks.size(); ++bb) {
        if (a_.blocks[ba].disjoint(b_.blocks[bb])) continue;
        for (std::size_t i = ba * kBlock; i < std::min(na, (ba + 1) * kBlock); ++i) {
          const GridPt& p0 = a_.pts[i];
          const GridPt& p1 = a_.pts[(i + 1) % na];
          const GridBox pe{std::min(p0.r, p1.r), std::max(p0.r, p1.r), std::min(p0.c, p1.c),
                           std::max(p0.c, p1.c)};
          if (pe.disjoint(b_.blocks[bb])) continue;
          for (std::size_t j = bb * kBlock; j < std::min(nb, (bb + 1) * kBlock); ++j) {
            const GridPt& q0 = b_.pts[j];
            const GridPt& q1 = b_.pts[(j + 1) % nb];
            const GridBox qe{std::min(q0.r, q1.r), std::max(q0.r, q1.r), std::min(q0.c, q1.c),
                             std::max(q0.c, q1.c)};
            if (!pe.disjoint(qe)) edge_pair(i, p0, p1, j, q0, q1);
          }
        }
      }
    }
  }

  void edge_pair(std::size_t i, const GridPt& p0, const GridPt& p1, std::size_t j,
                 const GridPt& q0, const GridPt& q1) {
    const int o1 = orient(p0, p1, q0);
    const int o2 = orient(p0, p1, q1);
    const int o3 = orient(q0, q1, p0);
    const int o4 = orient(q0, q1, p1);
    auto& ea = a_contacts_[i];
    auto& eb = b_contacts_[j];

    if (o1 == 0 && o2 == 0) {
      // Collinear: split each edge at the other's interior endpoints and
      // record the shared span, if any.
      for (const GridPt* q : {&q0, &q1}) {
        if (strictly_inside_collinear(p0, p1, *q)) {
          ea.splits.push_back({param_on(p0, p1, *q), to_point(*q)});
        }
      }
      for (const GridPt* p : {&p0, &p1}) {
        if (strictly_inside_collinear(q0, q1, *p)) {
          eb.splits.push_back({param_on(q0, q1, *p), to_point(*p)});
        }
      }
      const double tq0 = param_on(p0, p1, q0), tq1 = param_on(p0, p1, q1);
      const double lo = std::max(0.0, std::min(tq0, tq1));
      const double hi = std::min(1.0, std::max(tq0, tq1));
      if (lo < hi) {
        const bool same = dot(p1.r - p0.r, p1.c - p0.c, q1.r - q0.r, q1.c - q0.c) > 0;
        ea.shared.push_back({lo, hi, same});
        const double tp0 = param_on(q0, q1, p0), tp1 = param_on(q0, q1, p1);
        eb.shared.push_back({std::max(0.0, std::min(tp0, tp1)),
                             std::min(1.0, std::max(tp0, tp1)), same});
      }
      return;
    }

    if (o1 * o2 < 0 && o3 * o4 < 0) {
      // Proper crossing; the point is computed once and shared by both edges.
      const i128 den = cross(p1.r - p0.r, p1.c - p0.c, q1.r - q0.r, q1.c - q0.c);
      const i128 num_a = cross(q0.r - p0.r, q0.c - p0.c, q1.r - q0.r, q1.c - q0.c);
      const i128 num_b = cross(q0.r - p0.r, q0.c - p0.c, p1.r - p0.r, p1.c - p0.c);
      const long double ta = static_cast<long double>(num_a) / static_cast<long double>(den);
      const long double tb = static_cast<long double>(num_b) / static_cast<long double>(den);
      const long double row =
          (static_cast<long double>(p0.r) + ta * static_cast<long double>(p1.r - p0.r)) /
          kSnapScale;
      const long double col =
          (static_cast<long double>(p0.c) + ta * static_cast<long double>(p1.c - p0.c)) /
          kSnapScale;
      const Point x{static_cast<double>(row), static_cast<double>(col)};
      ea.splits.push_back({static_cast<double>(ta), x});
      eb.splits.push_back({static_cast<double>(tb), x});
      return;
    }

    // Touching contacts: an endpoint of one edge in the interior of the other.
    if (o1 == 0 && strictly_inside_collinear(p0, p1, q0)) {
      ea.splits.push_back({param_on(p0, p1, q0), to_point(q0)});
    }
    if (o2 == 0 && strictly_inside_collinear(p0, p1, q1)) {
      ea.splits.push_back({param_on(p0, p1, q1), to_point(q1)});
    }
    if (o3 == 0 && strictly_inside_collinear(q0, q1, p0)) {
      eb.splits.push_back({param_on(q0, q1, p0), to_point(p0)});
    }
    if (o4 == 0 && strictly_inside_collinear(q0, q1, p1)) {
      eb.splits.push_back({param_on(q0, q1, p1), to_point(p1)});
    }
  }

  void select(const GridRing& ring, const std::vector<Point>& pts,
              std::vector<EdgeContacts>& contacts, const std::vector<Point>& other,
              const std::vector<GridBox>& other_blocks, bool keep_same_direction_shared) {
    const std::size_t n = ring.pts.size();
    std::vector<SplitPoint> chain;
    for (std::size_t i = 0; i < n; ++i) {
      auto& ec = contacts[i];
      chain.clear();
      chain.push_back({0.0, pts[i]});
      std::sort(ec.splits.begin(), ec.splits.end(),
                [](const SplitPoint& x, const SplitPoint& y) { return x.t < y.t; });
      for (const auto& s : ec.splits) chain.push_back(s);
      chain.push_back({1.0, pts[(i + 1) % n]});
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const auto& u = chain[k];
        const auto& v = chain[k + 1];
        if (u.p == v.p) continue;
        const double tm = 0.5 * (u.t + v.t);
        const CollinearSpan* on = nullptr;
        for (const auto& sp : ec.shared) {
          if (sp.t_lo < tm && tm < sp.t_hi) {
            on = &sp;
            break;
          }
        }
        bool keep;
        if (on != nullptr) {
          keep = keep_same_direction_shared && on->same_direction;
        } else {
          keep = point_in_ring(other, other_blocks, 0.5 * (u.p.row + v.p.row),
                               0.5 * (u.p.col + v.p.col));
        }
        if (keep) segments_.push_back({u.p, v.p});
      }
    }
  }

  GridRing a_, b_;
  std::vector<Point> a_pts_, b_pts_;
  std::vector<EdgeContacts> a_contacts_, b_contacts_;
  std::vector<Segment> segments_;
};

bool grid_boxes_disjoint(const GridRing& a, const GridRing& b) {
  return a.r_max < b.r_min || b.r_max < a.r_min || a.c_max < b.c_min || b.c_max < a.c_min;
}

struct PointLess {
  bool operator()(const Point& x, const Point& y) const {
    return x.row < y.row || (x.row == y.row && x.col < y.col);
  }
};

// Chains directed segments into closed rings. At a vertex with several
// outgoing segments the sharpest left turn is taken, which separates rings
// that touch at a single point.
std::vector<VertexRing> chain_rings(const std::vector<Segment>& segs) {
  std::multimap<Point, std::size_t, PointLess> outgoing;
  for (std::size_t i = 0; i < segs.size(); ++i) outgoing.emplace(segs[i].from, i);
  std::vector<bool> used(segs.size(), false);
  std::vector<VertexRing> rings;
  for (std::size_t start = 0; start < segs.size(); ++start) {
    if (used[start]) continue;
    VertexRing ring;
    std::size_t cur = start;
    used[cur] = true;
    ring.push_back(segs[cur].from);
    while (!(segs[cur].to == segs[start].from)) {
      const Point at = segs[cur].to;
      const double in_r = at.row - segs[cur].from.row, in_c = at.col - segs[cur].from.col;
      auto [lo, hi] = outgoing.equal_range(at);
      std::size_t best = segs.size();
      double best_angle = 0.0;
      for (auto it = lo; it != hi; ++it) {
        if (used[it->second]) continue;
        const auto& s = segs[it->second];
        const double out_r = s.to.row - s.from.row, out_c = s.to.col - s.from.col;
        // Turn angle in (-pi, pi]; larger is further left under positive orientation.
        const double turn = std::atan2(in_c * out_r - in_r * out_c, in_r * out_r + in_c * out_c);
        if (best == segs.size() || turn > best_angle) {
          best = it->second;
          best_angle = turn;
        }
      }
      if (best == segs.size()) break;  // open chain; close it as is
      ring.push_back(at);
      used[best] = true;
      cur = best;
    }
    if (ring.size() >= 3) rings.push_back(std::move(ring));
  }
  return rings;
}

}  // namespace

std::vector<VertexRing> clip_intersection(std::span<const Point> a, std::span<const Point> b) {
  auto ga = to_grid(a);
  auto gb = to_grid(b);
  if (ga.pts.empty() || gb.pts.empty() || grid_boxes_disjoint(ga, gb)) return {};
  Clipper clipper(std::move(ga), std::move(gb));
  return chain_rings(clipper.segments());
}

double intersection_area(std::span<const Point> a, std::span<const Point> b) {
  auto ga = to_grid(a);
  auto gb = to_grid(b);
  if (ga.pts.empty() || gb.pts.empty() || grid_boxes_disjoint(ga, gb)) return 0.0;
  const double o_row = static_cast<double>(std::min(ga.r_min, gb.r_min)) / kSnapScale;
  const double o_col = static_cast<double>(std::min(ga.c_min, gb.c_min)) / kSnapScale;
  Clipper clipper(std::move(ga), std::move(gb));
  double sum = 0.0;
  for (const auto& s : clipper.segments()) {
    const double ar = s.from.row - o_row, ac = s.from.col - o_col;
    const double br = s.to.row - o_row, bc = s.to.col - o_col;
    sum += ac * br - ar * bc;
  }
  return std::max(0.0, 0.5 * sum);
}

double overlap_score(double inter, double area_a, double area_b, OverlapMeasure measure) {
  if (measure == OverlapMeasure::kIoU) {
    const double uni = area_a + area_b - inter;
    return uni > 0.0 ? inter / uni : 0.0;
  }
  const double smaller = std::min(area_a, area_b);
  return smaller > 0.0 ? inter / smaller : 0.0;
}

double polygon_iou(std::span<const Point> a, std::span<const Point> b) {
  return overlap_score(intersection_area(a, b), area(a), area(b), OverlapMeasure::kIoU);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

bool contains_center(std::span<const Point> ring, int row, int col) {
  if (ring.size() < 3) return false;
  const double y = row;
  int crossings = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point& p0 = ring[i];
    const Point& p1 = ring[(i + 1) % ring.size()];
    if (detail::edge_spans_row(p0, p1, y) && detail::edge_crossing(p0, p1, y) <= col) {
      ++crossings;
    }
  }
  return (crossings % 2) == 1;
}

Mask rasterize(std::span<const Point> ring, int height, int width) {
  Mask m{height, width,
         std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(0, height)) *
                                       static_cast<std::size_t>(std::max(0, width)),
                                   0)};
  for_each_span(ring, height, width, [&](int row, int c0, int c1) {
    std::fill_n(m.data.begin() + static_cast<std::ptrdiff_t>(row) * width + c0, c1 - c0,
                std::uint8_t{1});
  });
  return m;
}

}  // namespace starpoly
