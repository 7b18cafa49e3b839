#pragma once

// Hand-emitted SVG figures: AP-vs-tau charts and candidate/NMS overlays.

#include <string>
#include <utility>
#include <vector>

#include "starpoly/model.hpp"

namespace starpoly::svg {

struct Series {
  std::string label;
  ScoreTable table;
};

/// Line chart of AP over tau, one polyline per series, labeled axes and legend.
std::string ap_chart(const std::vector<Series>& series, const std::string& title);

/// Two panels over the probability map: `sampled` candidates on the left,
/// NMS `survivors` on the right. Each polygon shares the color of its center pixel.
std::string candidates_overlay(const DenseMaps& maps, const std::vector<StarPolygon>& sampled,
                               const std::vector<StarPolygon>& survivors);

}  // namespace starpoly::svg
