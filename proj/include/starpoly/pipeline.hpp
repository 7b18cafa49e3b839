#pragma once

// End-to-end helpers shared by the CLI, the Python module and the tests.

#include <vector>

#include "starpoly/detector.hpp"
#include "starpoly/metrics.hpp"
#include "starpoly/model.hpp"

namespace starpoly {

/// encode -> detect -> render for one ground-truth image.
LabelImage roundtrip_labels(const LabelImage& gt, const RadialGeometry& geometry,
                            const NmsParams& params);

/// Round trip of every image, scored against itself.
ScoreTable roundtrip_scores(const std::vector<LabelImage>& gts, int n_rays,
                            const NmsParams& params, const std::vector<double>& taus,
                            Aggregation aggregation = Aggregation::kDataset, int threads = 1);

}  // namespace starpoly
