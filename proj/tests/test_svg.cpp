#include <gtest/gtest.h>

#include "starpoly/svg.hpp"

using namespace starpoly;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

ScoreTable table(double drop) {
  ScoreTable t;
  for (int i = 0; i < 9; ++i) {
    const double tau = 0.5 + 0.05 * i;
    t.rows.push_back({tau, 10, 0, 0, 1.0 - drop * i});
  }
  return t;
}

}  // namespace

TEST(ApChart, OnePolylinePerSeriesWithLabels) {
  const std::vector<svg::Series> series{{"n = 8", table(0.1)}, {"n = 32 <x>", table(0.02)}};
  const auto s = svg::ap_chart(series, "AP & friends");
  EXPECT_EQ(count(s, "<polyline"), 2u);
  EXPECT_NE(s.find("IoU threshold"), std::string::npos);
  EXPECT_NE(s.find("Average precision (AP)"), std::string::npos);
  EXPECT_NE(s.find("n = 32 &lt;x&gt;"), std::string::npos);
  EXPECT_NE(s.find("AP &amp; friends"), std::string::npos);
  EXPECT_EQ(s, svg::ap_chart(series, "AP & friends"));
}

TEST(ApChart, SinglePointDoesNotDivideByZero) {
  ScoreTable t;
  t.rows = {{0.5, 1, 0, 0, 1.0}};
  const auto s = svg::ap_chart({{"one", t}}, "x");
  EXPECT_EQ(s.find("nan"), std::string::npos);
  EXPECT_EQ(s.find("inf"), std::string::npos);
}

TEST(CandidatesOverlay, PanelsAndColors) {
  DenseMaps maps(10, 12, RadialGeometry(4));
  const std::vector<StarPolygon> sampled{{{2, 3}, 0.9, {1, 1, 1, 1}}, {{5, 5}, 0.8, {2, 2, 2, 2}}};
  const std::vector<StarPolygon> kept{sampled[1]};
  const auto s = svg::candidates_overlay(maps, sampled, kept);
  EXPECT_EQ(count(s, "<polygon"), 3u);
  EXPECT_EQ(count(s, "<image"), 2u);
  EXPECT_NE(s.find("data:image/png;base64,iVBORw0KGgo"), std::string::npos);
  // a survivor is drawn in the color of its sampled twin
  const auto color_of = [&](std::size_t nth) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i <= nth; ++i) pos = s.find("<polygon", pos + 1);
    const auto c = s.find("stroke=\"", pos) + 8;
    return s.substr(c, s.find('"', c) - c);
  };
  EXPECT_EQ(color_of(1), color_of(2));
  EXPECT_NE(color_of(0), color_of(1));
}
