#pragma once

// Candidate collection and greedy polygon non-maximum suppression.

#include <vector>

#include "starpoly/geometry.hpp"
#include "starpoly/model.hpp"

namespace starpoly {

struct NmsParams {
  double prob_thresh = 0.5;
  double overlap_thresh = 0.4;
  OverlapMeasure measure = OverlapMeasure::kIoU;
  double min_area = 1.0;
  /// Cell size of the spatial prefilter grid; 0 disables the prefilter.
  int grid_cell = 64;

  /// Throws std::invalid_argument on out-of-range thresholds.
  void validate() const;
};

struct Candidate {
  StarPolygon poly;
  VertexRing ring;
  double area = 0.0;
  BoundingBox box;
};

Candidate make_candidate(StarPolygon poly, const RadialGeometry& geometry);

/// Candidates with prob > prob_thresh and area >= min_area, sorted by
/// probability descending, ties by (row, col) ascending.
std::vector<Candidate> collect_candidates(const DenseMaps& maps, const NmsParams& params);

/// Overlap between two candidates under the configured measure.
double candidate_overlap(const Candidate& a, const Candidate& b, OverlapMeasure measure);

/// Greedy NMS over sorted candidates. Returns indices of the survivors.
std::vector<std::size_t> greedy_nms_indices(const std::vector<Candidate>& cands,
                                            const NmsParams& params);

DetectionSet greedy_nms(const std::vector<Candidate>& cands, const NmsParams& params, int height,
                        int width, int n_rays);

DetectionSet detect(const DenseMaps& maps, const NmsParams& params);

}  // namespace starpoly
