#pragma once

// Shared domain types for the star-convex polygon toolkit.
//
// Coordinates are (row, col): row grows downward, col grows rightward.
// Ray k points along angle phi_k = 2*pi*k/n and steps by (sin phi_k, cos phi_k)
// in (row, col).

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace starpoly {

/// Raised on malformed input data (bad files, invalid rasters, schema errors).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense instance-label raster. IDs are exactly {1..K}, 0 is background.
class LabelImage {
 public:
  LabelImage() = default;
  LabelImage(int height, int width);
  /// Takes ownership of `labels`; throws FormatError unless IDs are dense 1..K.
  LabelImage(int height, int width, std::vector<std::int32_t> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return labels_.size(); }
  int num_objects() const { return num_objects_; }

  std::int32_t at(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  /// Label at (row, col); pixels outside the image read as background.
  std::int32_t at_or_background(int row, int col) const {
    if (row < 0 || col < 0 || row >= height_ || col >= width_) return 0;
    return at(row, col);
  }
  std::span<const std::int32_t> data() const { return labels_; }

  friend bool operator==(const LabelImage&, const LabelImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int num_objects_ = 0;
  std::vector<std::int32_t> labels_;
};

/// Remaps positive IDs to 1..K in row-major first-occurrence order.
LabelImage relabel_dense(int height, int width, std::span<const std::int64_t> raw);

struct Direction {
  double drow;
  double dcol;
};

/// n equidistant radial directions, phi_0 = 0.
class RadialGeometry {
 public:
  static constexpr int kDefaultRays = 32;

  explicit RadialGeometry(int n_rays = kDefaultRays);

  int n_rays() const { return static_cast<int>(dirs_.size()); }
  double angle(int k) const;
  const Direction& direction(int k) const { return dirs_[static_cast<std::size_t>(k)]; }
  std::span<const Direction> directions() const { return dirs_; }

  friend bool operator==(const RadialGeometry& a, const RadialGeometry& b) {
    return a.n_rays() == b.n_rays();
  }

 private:
  std::vector<Direction> dirs_;
};

/// Probability plane plus n radial distance planes, all height x width.
class DenseMaps {
 public:
  DenseMaps(int height, int width, RadialGeometry geometry);

  int height() const { return height_; }
  int width() const { return width_; }
  const RadialGeometry& geometry() const { return geometry_; }
  int n_rays() const { return geometry_.n_rays(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }

  std::span<float> prob() { return prob_; }
  std::span<const float> prob() const { return prob_; }
  /// Ray plane k.
  std::span<float> dist(int k);
  std::span<const float> dist(int k) const;
  /// All distance planes, ray-major.
  std::span<const float> dist_all() const { return dist_; }
  std::span<float> dist_all() { return dist_; }

  float prob_at(int row, int col) const {
    return prob_[static_cast<std::size_t>(row) * width_ + col];
  }
  float dist_at(int k, int row, int col) const {
    return dist_[static_cast<std::size_t>(k) * plane_size() +
                 static_cast<std::size_t>(row) * width_ + col];
  }

  /// Throws FormatError if prob leaves [0,1] or any distance is negative or non-finite.
  void validate() const;

  friend bool operator==(const DenseMaps&, const DenseMaps&) = default;

 private:
  int height_;
  int width_;
  RadialGeometry geometry_;
  std::vector<float> prob_;
  std::vector<float> dist_;
};

struct Pixel {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// One candidate instance: a center pixel, its probability and n radii.
struct StarPolygon {
  Pixel center;
  double prob = 0.0;
  std::vector<double> radii;

  int n_rays() const { return static_cast<int>(radii.size()); }
  friend bool operator==(const StarPolygon&, const StarPolygon&) = default;
};

enum class OverlapMeasure { kIoU, kIntersectionOverSmaller };

std::string to_string(OverlapMeasure m);
/// Accepts "iou" and "ios"/"intersection-over-smaller".
OverlapMeasure parse_overlap_measure(const std::string& s);

struct DetectionSet {
  int height = 0;
  int width = 0;
  int n_rays = RadialGeometry::kDefaultRays;
  double prob_thresh = 0.5;
  double nms_thresh = 0.4;
  OverlapMeasure measure = OverlapMeasure::kIoU;
  /// Non-increasing in prob.
  std::vector<StarPolygon> detections;

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

enum class Aggregation { kDataset, kImage };

std::string to_string(Aggregation a);
Aggregation parse_aggregation(const std::string& s);

struct ScoreRow {
  double tau = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double ap = 0.0;
};

struct ScoreTable {
  Aggregation aggregation = Aggregation::kDataset;
  std::vector<ScoreRow> rows;

  /// Row for tau (matched to 1e-9); throws std::out_of_range if absent.
  const ScoreRow& at_tau(double tau) const;
};

}  // namespace starpoly
