#include "starpoly/renderer.hpp"

#include <algorithm>

#include "starpoly/geometry.hpp"

namespace starpoly {

LabelImage render_labels(const DetectionSet& dets, int height, int width) {
  std::vector<std::int32_t> raster(static_cast<std::size_t>(height) * width, 0);
  if (dets.detections.empty()) return LabelImage(height, width, std::move(raster));

  const RadialGeometry geometry(dets.n_rays);
  for (std::size_t d = dets.detections.size(); d-- > 0;) {
    const auto ring = vertices(dets.detections[d], geometry);
    const auto id = static_cast<std::int32_t>(d + 1);
    for_each_span(ring, height, width, [&](int row, int c0, int c1) {
      std::fill_n(raster.begin() + static_cast<std::ptrdiff_t>(row) * width + c0, c1 - c0, id);
    });
  }

  std::vector<std::int32_t> remap(dets.detections.size() + 1, 0);
  for (auto v : raster) remap[static_cast<std::size_t>(v)] = 1;
  remap[0] = 0;
  std::int32_t next = 0;
  for (std::size_t id = 1; id < remap.size(); ++id) {
    remap[id] = remap[id] != 0 ? ++next : 0;
  }
  for (auto& v : raster) v = remap[static_cast<std::size_t>(v)];
  return LabelImage(height, width, std::move(raster));
}

}  // namespace starpoly
