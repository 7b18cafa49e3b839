#include "starpoly/model.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace starpoly {

LabelImage::LabelImage(int height, int width)
    : height_(height), width_(width),
      labels_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0) {
  if (height < 0 || width < 0) throw FormatError("negative image dimensions");
}

LabelImage::LabelImage(int height, int width, std::vector<std::int32_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height < 0 || width < 0) throw FormatError("negative image dimensions");
  if (labels_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw FormatError("label buffer size does not match " + std::to_string(height) + "x" +
                      std::to_string(width));
  }
  std::int32_t max_id = 0;
  for (auto v : labels_) {
    if (v < 0) throw FormatError("negative label value " + std::to_string(v));
    max_id = std::max(max_id, v);
  }
  std::vector<bool> seen(static_cast<std::size_t>(max_id) + 1, false);
  for (auto v : labels_) seen[static_cast<std::size_t>(v)] = true;
  for (std::int32_t id = 1; id <= max_id; ++id) {
    if (!seen[static_cast<std::size_t>(id)]) {
      throw FormatError("label IDs are not dense: missing " + std::to_string(id));
    }
  }
  num_objects_ = max_id;
}

LabelImage relabel_dense(int height, int width, std::span<const std::int64_t> raw) {
  if (raw.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw FormatError("raster size does not match dimensions");
  }
  std::unordered_map<std::int64_t, std::int32_t> remap;
  std::vector<std::int32_t> out(raw.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto v = raw[i];
    if (v < 0) throw FormatError("negative label value " + std::to_string(v));
    if (v == 0) continue;
    auto [it, inserted] = remap.try_emplace(v, static_cast<std::int32_t>(remap.size() + 1));
    out[i] = it->second;
  }
  return LabelImage(height, width, std::move(out));
}

RadialGeometry::RadialGeometry(int n_rays) {
  if (n_rays < 3) throw std::invalid_argument("n_rays must be >= 3");
  dirs_.resize(static_cast<std::size_t>(n_rays));
  // With n divisible by 4 the table is built from the first quadrant so that
  // quarter-turn rotations map directions onto each other exactly.
  if (n_rays % 4 == 0) {
    const int q = n_rays / 4;
    for (int k = 0; k < q; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / n_rays;
      const Direction d{k == 0 ? 0.0 : std::sin(phi), k == 0 ? 1.0 : std::cos(phi)};
      dirs_[static_cast<std::size_t>(k)] = d;
      dirs_[static_cast<std::size_t>(k + q)] = {d.dcol, -d.drow};
      dirs_[static_cast<std::size_t>(k + 2 * q)] = {-d.drow, -d.dcol};
      dirs_[static_cast<std::size_t>(k + 3 * q)] = {-d.dcol, d.drow};
    }
    for (auto& d : dirs_) {
      if (d.drow == 0.0) d.drow = 0.0;  // drop negative zeros
      if (d.dcol == 0.0) d.dcol = 0.0;
    }
  } else {
    for (int k = 0; k < n_rays; ++k) {
      const double phi = angle(k);
      double s = std::sin(phi);
      double c = std::cos(phi);
      if (std::abs(s) < 1e-15) s = 0.0;
      if (std::abs(c) < 1e-15) c = 0.0;
      dirs_[static_cast<std::size_t>(k)] = {s, c};
    }
  }
}

double RadialGeometry::angle(int k) const {
  return 2.0 * std::numbers::pi * k / static_cast<double>(dirs_.size());
}

DenseMaps::DenseMaps(int height, int width, RadialGeometry geometry)
    : height_(height), width_(width), geometry_(std::move(geometry)),
      prob_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0.0f),
      dist_(prob_.size() * static_cast<std::size_t>(geometry_.n_rays()), 0.0f) {
  if (height < 0 || width < 0) throw std::invalid_argument("negative map dimensions");
}

std::span<float> DenseMaps::dist(int k) {
  return std::span<float>(dist_).subspan(static_cast<std::size_t>(k) * plane_size(),
                                         plane_size());
}

std::span<const float> DenseMaps::dist(int k) const {
  return std::span<const float>(dist_).subspan(static_cast<std::size_t>(k) * plane_size(),
                                               plane_size());
}

void DenseMaps::validate() const {
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    const float p = prob_[i];
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw FormatError("probability out of [0,1] at pixel " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < dist_.size(); ++i) {
    const float d = dist_[i];
    if (!std::isfinite(d) || d < 0.0f) {
      throw FormatError("invalid distance at plane " + std::to_string(i / plane_size()) +
                        ", pixel " + std::to_string(i % plane_size()));
    }
  }
}

std::string to_string(OverlapMeasure m) {
  return m == OverlapMeasure::kIoU ? "iou" : "ios";
}

OverlapMeasure parse_overlap_measure(const std::string& s) {
  if (s == "iou") return OverlapMeasure::kIoU;
  if (s == "ios" || s == "intersection-over-smaller") {
    return OverlapMeasure::kIntersectionOverSmaller;
  }
  throw std::invalid_argument("unknown overlap measure '" + s + "'");
}

std::string to_string(Aggregation a) {
  return a == Aggregation::kDataset ? "dataset" : "image";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "dataset") return Aggregation::kDataset;
  if (s == "image") return Aggregation::kImage;
  throw std::invalid_argument("unknown aggregation '" + s + "'");
}

const ScoreRow& ScoreTable::at_tau(double tau) const {
  for (const auto& r : rows) {
    if (std::abs(r.tau - tau) < 1e-9) return r;
  }
  throw std::out_of_range("no score row for tau " + std::to_string(tau));
}

}  // namespace starpoly
