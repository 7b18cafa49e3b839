#include "starpoly/pipeline.hpp"

#include "starpoly/encoder.hpp"
#include "starpoly/parallel.hpp"
#include "starpoly/renderer.hpp"

namespace starpoly {

LabelImage roundtrip_labels(const LabelImage& gt, const RadialGeometry& geometry,
                            const NmsParams& params) {
  const auto maps = encode(gt, geometry);
  return render_labels(detect(maps, params), gt.height(), gt.width());
}

ScoreTable roundtrip_scores(const std::vector<LabelImage>& gts, int n_rays,
                            const NmsParams& params, const std::vector<double>& taus,
                            Aggregation aggregation, int threads) {
  const RadialGeometry geometry(n_rays);
  std::vector<OverlapMatrix> matrices(gts.size());
  parallel_for(gts.size(), threads, [&](std::size_t i) {
    matrices[i] = overlap_matrix(roundtrip_labels(gts[i], geometry, params), gts[i]);
  });
  return ap_sweep(matrices, taus, aggregation);
}

}  // namespace starpoly
