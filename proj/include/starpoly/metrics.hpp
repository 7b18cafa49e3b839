#pragma once

// Instance matching by IoU and the AP_tau = TP / (TP + FP + FN) score.

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "starpoly/model.hpp"

namespace starpoly {

struct OverlapEntry {
  std::int32_t pred = 0;
  std::int32_t gt = 0;
  std::int64_t intersection = 0;
};

/// Sparse pixel co-occurrence counts between two label images.
struct OverlapMatrix {
  int num_pred = 0;
  int num_gt = 0;
  /// Nonzero (pred, gt) pairs sorted by (pred, gt).
  std::vector<OverlapEntry> entries;
  /// Pixel counts, indexed by ID (index 0 unused).
  std::vector<std::int64_t> pred_area;
  std::vector<std::int64_t> gt_area;

  double iou(const OverlapEntry& e) const;
};

/// Throws std::invalid_argument on dimension mismatch.
OverlapMatrix overlap_matrix(const LabelImage& pred, const LabelImage& gt);

struct Match {
  std::int32_t pred = 0;
  std::int32_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  double tau = 0.0;
  std::vector<Match> matches;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

/// One-to-one greedy matching over pairs with IoU > tau, in IoU-descending
/// order (ties by pred then gt ID). Optimal for tau >= 0.5.
MatchResult match_at(const OverlapMatrix& m, double tau);

/// TP / (TP + FP + FN); 1 when the denominator is 0 (nothing to find, nothing found).
double average_precision(std::int64_t tp, std::int64_t fp, std::int64_t fn);

/// 0.50, 0.55, ..., 0.90.
std::vector<double> default_taus();

ScoreTable ap_sweep(const std::vector<std::pair<LabelImage, LabelImage>>& pred_gt,
                    const std::vector<double>& taus,
                    Aggregation aggregation = Aggregation::kDataset);

/// Same as ap_sweep but from precomputed overlap matrices.
ScoreTable ap_sweep(const std::vector<OverlapMatrix>& matrices, const std::vector<double>& taus,
                    Aggregation aggregation = Aggregation::kDataset);

/// CSV with header `tau,tp,fp,fn,ap`; floats with 5 decimals.
std::string score_table_csv(const ScoreTable& table);
ScoreTable parse_score_table_csv(const std::string& text);

/// Human-readable table stating the aggregation mode.
void print_score_table(std::ostream& os, const ScoreTable& table);

}  // namespace starpoly
