#pragma once

// Synthetic dataset of touching half-ellipse pairs with blur and noise.

#include <cstdint>
#include <random>
#include <vector>

#include "starpoly/model.hpp"

namespace starpoly::toy {

using Rng = std::mt19937_64;

struct ToyConfig {
  int size = 256;
  int count = 1000;
  int pairs_min = 4;
  int pairs_max = 8;
  // Semi-major axis (half the contact length) and semi-minor axis (depth of each half).
  double major_min = 12.0, major_max = 32.0;
  double minor_min = 8.0, minor_max = 22.0;
  // Accepted minor/major ratio; keeps oblique pairs' boxes heavily overlapping.
  double aspect_min = 0.5, aspect_max = 0.65;
  double oblique_prob = 0.5;
  double blur_min = 1.0, blur_max = 2.0;
  double noise_min = 0.03, noise_max = 0.08;
  double fg_min = 0.5, fg_max = 0.9;
  double background = 0.1;
  int max_attempts = 100;
  int margin = 2;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on empty ranges or size < 64.
  void validate() const;
};

enum class PairMode { kAxisAligned, kOblique };

/// Axis-aligned pairs must stay below this bbox IoU, oblique pairs above the other.
inline constexpr double kAxisAlignedMaxBoxIoU = 0.3;
inline constexpr double kObliqueMinBoxIoU = 0.55;

struct HalfEllipsePair {
  PairMode mode = PairMode::kAxisAligned;
  double theta = 0.0;  // major-axis angle, radians, from +col toward +row
  double major = 0.0;
  double minor = 0.0;
  /// Pixel offsets relative to the pair's anchor pixel.
  std::vector<Pixel> first;
  std::vector<Pixel> second;
};

/// Rasterizes an ellipse centered at (center_row, center_col) and splits it
/// along its major axis: pixels with minor-axis coordinate >= 0 go to `first`.
HalfEllipsePair rasterize_pair(double major, double minor, double theta, double center_row,
                               double center_col);

/// IoU of the axis-aligned pixel bounding boxes of two pixel sets.
double bbox_iou(const std::vector<Pixel>& a, const std::vector<Pixel>& b);

/// True if the pixel set is non-empty and 4-connected.
bool is_four_connected(const std::vector<Pixel>& pixels);

/// Draws one pair honoring the mode's bbox-IoU bound, relative to a local anchor.
HalfEllipsePair generate_pair(Rng& rng, const ToyConfig& config);

struct ToyImage {
  int index = 0;
  std::vector<float> intensity;  // size x size, in [0,1]
  LabelImage labels;
  std::vector<HalfEllipsePair> pairs;
  int skipped_pairs = 0;
};

/// Per-image generator stream derived from (seed, index).
Rng image_rng(std::uint64_t seed, int index);

ToyImage generate_image(const ToyConfig& config, int index);

/// All images of the dataset; `threads` workers, output independent of it.
std::vector<ToyImage> generate_dataset(const ToyConfig& config, int threads = 1);

/// Deterministic split: the first 90% of indices train, the rest test.
struct Split {
  std::vector<int> train;
  std::vector<int> test;
};
Split train_test_split(int count);

}  // namespace starpoly::toy
