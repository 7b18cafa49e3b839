#include "starpoly/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace starpoly {

void NmsParams::validate() const {
  if (!(prob_thresh > 0.0 && prob_thresh < 1.0)) {
    throw std::invalid_argument("prob_thresh must be in (0,1)");
  }
  if (!(overlap_thresh >= 0.0 && overlap_thresh < 1.0)) {
    throw std::invalid_argument("overlap_thresh must be in [0,1)");
  }
  if (!(min_area >= 0.0)) throw std::invalid_argument("min_area must be >= 0");
  if (grid_cell < 0) throw std::invalid_argument("grid_cell must be >= 0");
}

Candidate make_candidate(StarPolygon poly, const RadialGeometry& geometry) {
  Candidate c;
  c.ring = vertices(poly, geometry);
  c.area = area(c.ring);
  c.box = bounding_box(c.ring);
  c.poly = std::move(poly);
  return c;
}

std::vector<Candidate> collect_candidates(const DenseMaps& maps, const NmsParams& params) {
  params.validate();
  const auto& geometry = maps.geometry();
  std::vector<Candidate> out;
  std::vector<double> radii(static_cast<std::size_t>(geometry.n_rays()));
  for (int r = 0; r < maps.height(); ++r) {
    for (int c = 0; c < maps.width(); ++c) {
      const float p = maps.prob_at(r, c);
      if (!(p > params.prob_thresh)) continue;
      for (int k = 0; k < geometry.n_rays(); ++k) {
        radii[static_cast<std::size_t>(k)] = maps.dist_at(k, r, c);
      }
      auto cand = make_candidate(StarPolygon{{r, c}, p, radii}, geometry);
      if (cand.area >= params.min_area) out.push_back(std::move(cand));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.poly.prob != b.poly.prob) return a.poly.prob > b.poly.prob;
    return a.poly.center < b.poly.center;
  });
  return out;
}

double candidate_overlap(const Candidate& a, const Candidate& b, OverlapMeasure measure) {
  if (!a.box.intersects(b.box)) return 0.0;
  return overlap_score(intersection_area(a.ring, b.ring), a.area, b.area, measure);
}

namespace {

// Uniform grid over accepted detections' bounding boxes. A candidate is only
// compared against detections registered in the cells its box touches; all
// others have disjoint boxes and therefore zero overlap.
class AcceptedGrid {
 public:
  AcceptedGrid(const std::vector<Candidate>& cands, int cell) : cell_(cell) {
    if (cands.empty()) return;
    BoundingBox all = cands.front().box;
    for (const auto& c : cands) {
      all.row_min = std::min(all.row_min, c.box.row_min);
      all.col_min = std::min(all.col_min, c.box.col_min);
      all.row_max = std::max(all.row_max, c.box.row_max);
      all.col_max = std::max(all.col_max, c.box.col_max);
    }
    row0_ = std::floor(all.row_min);
    col0_ = std::floor(all.col_min);
    rows_ = static_cast<int>((all.row_max - row0_) / cell_) + 1;
    cols_ = static_cast<int>((all.col_max - col0_) / cell_) + 1;
    cells_.resize(static_cast<std::size_t>(rows_) * cols_);
    stamp_.assign(cands.size(), 0);
  }

  void insert(const BoundingBox& box, std::size_t id) {
    const auto [r0, r1, c0, c1] = range(box);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) cells_[static_cast<std::size_t>(r) * cols_ + c].push_back(id);
    }
  }

  // Visits each registered id near `box` once, nearest center first. The
  // outcome does not depend on the order; the nearest detection is simply the
  // likeliest to suppress, which ends the query early.
  template <typename Fn>
  bool any_of(const BoundingBox& box, Pixel center, const std::vector<Candidate>& cands, Fn&& fn) {
    ++query_;
    near_.clear();
    const auto [r0, r1, c0, c1] = range(box);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        for (auto id : cells_[static_cast<std::size_t>(r) * cols_ + c]) {
          if (stamp_[id] == query_) continue;
          stamp_[id] = query_;
          if (!cands[id].box.intersects(box)) continue;
          const auto dr = static_cast<std::int64_t>(cands[id].poly.center.row - center.row);
          const auto dc = static_cast<std::int64_t>(cands[id].poly.center.col - center.col);
          near_.emplace_back(dr * dr + dc * dc, id);
        }
      }
    }
    std::sort(near_.begin(), near_.end());
    for (const auto& [d2, id] : near_) {
      if (fn(id)) return true;
    }
    return false;
  }

 private:
  struct Range {
    int r0, r1, c0, c1;
  };
  Range range(const BoundingBox& box) const {
    const auto clamp_idx = [](double v, int n) {
      return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1);
    };
    return {clamp_idx((box.row_min - row0_) / cell_, rows_),
            clamp_idx((box.row_max - row0_) / cell_, rows_),
            clamp_idx((box.col_min - col0_) / cell_, cols_),
            clamp_idx((box.col_max - col0_) / cell_, cols_)};
  }

  int cell_;
  double row0_ = 0.0, col0_ = 0.0;
  int rows_ = 1, cols_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t query_ = 0;
  std::vector<std::pair<std::int64_t, std::size_t>> near_;
};

}  // namespace

std::vector<std::size_t> greedy_nms_indices(const std::vector<Candidate>& cands,
                                            const NmsParams& params) {
  params.validate();
  std::vector<std::size_t> kept;
  const auto suppresses = [&](std::size_t accepted, std::size_t i) {
    return candidate_overlap(cands[accepted], cands[i], params.measure) > params.overlap_thresh;
  };

  if (params.grid_cell == 0) {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const bool hit = std::any_of(kept.begin(), kept.end(),
                                   [&](std::size_t a) { return suppresses(a, i); });
      if (!hit) kept.push_back(i);
    }
    return kept;
  }

  AcceptedGrid grid(cands, params.grid_cell);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const bool hit = grid.any_of(cands[i].box, cands[i].poly.center, cands,
                                 [&](std::size_t a) { return suppresses(a, i); });
    if (!hit) {
      kept.push_back(i);
      grid.insert(cands[i].box, i);
    }
  }
  return kept;
}

DetectionSet greedy_nms(const std::vector<Candidate>& cands, const NmsParams& params, int height,
                        int width, int n_rays) {
  DetectionSet out;
  out.height = height;
  out.width = width;
  out.n_rays = n_rays;
  out.prob_thresh = params.prob_thresh;
  out.nms_thresh = params.overlap_thresh;
  out.measure = params.measure;
  for (auto i : greedy_nms_indices(cands, params)) out.detections.push_back(cands[i].poly);
  return out;
}

DetectionSet detect(const DenseMaps& maps, const NmsParams& params) {
  const auto cands = collect_candidates(maps, params);
  return greedy_nms(cands, params, maps.height(), maps.width(), maps.n_rays());
}

}  // namespace starpoly
