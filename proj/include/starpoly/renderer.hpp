#pragma once

#include "starpoly/model.hpp"

namespace starpoly {

/// Paints detections from lowest to highest probability so that the more
/// confident polygon owns shared pixels. Detection d (0-based, in the set's
/// probability-descending order) gets ID d+1; detections left with no pixels
/// are dropped and the remaining IDs compacted in order.
LabelImage render_labels(const DetectionSet& dets, int height, int width);

inline LabelImage render_labels(const DetectionSet& dets) {
  return render_labels(dets, dets.height, dets.width);
}

}  // namespace starpoly
