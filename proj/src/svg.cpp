#include "starpoly/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "starpoly/geometry.hpp"
#include "starpoly/io.hpp"

namespace starpoly::svg {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string base64(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) v |= bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kAlphabet[v & 63] : '=';
  }
  return out;
}

// Stable color for a center pixel.
std::string pixel_color(Pixel p) {
  std::uint64_t h = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.row)) << 32) |
                    static_cast<std::uint32_t>(p.col);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  const double hue = static_cast<double>(h % 360);
  return fmt::format("hsl({:.0f},85%,55%)", hue);
}

}  // namespace

std::string ap_chart(const std::vector<Series>& series, const std::string& title) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;

  double tau_min = 1.0, tau_max = 0.0;
  for (const auto& s : series) {
    for (const auto& r : s.table.rows) {
      tau_min = std::min(tau_min, r.tau);
      tau_max = std::max(tau_max, r.tau);
    }
  }
  if (!(tau_min < tau_max)) {
    tau_min = 0.5;
    tau_max = 0.9;
  }
  const auto x = [&](double tau) { return kLeft + (tau - tau_min) / (tau_max - tau_min) * plot_w; };
  const auto y = [&](double ap) { return kTop + (1.0 - ap) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kW, kH, kW, kH);
  out += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kW, kH);
  out += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + plot_w / 2, escape(title));

  for (int i = 0; i <= 5; ++i) {
    const double ap = i / 5.0;
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n",
        kLeft, y(ap), kLeft + plot_w, y(ap), kLeft - 6, y(ap) + 4, ap);
  }
  const int n_ticks = static_cast<int>(std::lround((tau_max - tau_min) / 0.05));
  for (int i = 0; i <= n_ticks; ++i) {
    const double tau = tau_min + (tau_max - tau_min) * i / std::max(1, n_ticks);
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#333333\"/>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.2f}</text>\n",
        x(tau), kTop + plot_h, x(tau), kTop + plot_h + 5, x(tau), kTop + plot_h + 19, tau);
  }
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#333333\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  out += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">IoU threshold \xcf\x84</text>\n",
      kLeft + plot_w / 2, kH - 18);
  out += fmt::format(
      "<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">"
      "Average precision (AP)</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string pts;
    for (const auto& r : series[s].table.rows) pts += fmt::format("{:.2f},{:.2f} ", x(r.tau), y(r.ap));
    if (!pts.empty()) pts.pop_back();
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, pts);
    for (const auto& r : series[s].table.rows) {
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", x(r.tau),
                         y(r.ap), color);
    }
    const double ly = kTop + 12 + 20.0 * static_cast<double>(s);
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
        kLeft + plot_w + 12, ly, kLeft + plot_w + 36, ly, color, kLeft + plot_w + 42, ly + 4,
        escape(series[s].label));
  }
  out += "</svg>\n";
  return out;
}

std::string candidates_overlay(const DenseMaps& maps, const std::vector<StarPolygon>& sampled,
                               const std::vector<StarPolygon>& survivors) {
  const int h = maps.height(), w = maps.width();
  const int gap = 16;
  const auto prob = maps.prob();
  const std::string png =
      base64(io::encode_intensity_png(std::vector<float>(prob.begin(), prob.end()), h, w));
  const RadialGeometry geometry(maps.n_rays());

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      2 * w + gap, h, 2 * w + gap, h);
  const auto panel = [&](int x0, const std::vector<StarPolygon>& polys) {
    // Pixel (r, c) is drawn as the unit square centered at (c + 0.5, r + 0.5).
    out += fmt::format(
        "<g transform=\"translate({} 0)\">\n<image width=\"{}\" height=\"{}\" "
        "preserveAspectRatio=\"none\" style=\"image-rendering:pixelated\" "
        "href=\"data:image/png;base64,{}\"/>\n",
        x0, w, h, png);
    for (const auto& p : polys) {
      const auto ring = vertices(p, geometry);
      const auto color = pixel_color(p.center);
      std::string pts;
      for (const auto& v : ring) pts += fmt::format("{:.3f},{:.3f} ", v.col + 0.5, v.row + 0.5);
      if (!pts.empty()) pts.pop_back();
      out += fmt::format(
          "<polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.6\"/>\n"
          "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"1.2\" fill=\"{}\"/>\n",
          pts, color, p.center.col + 0.5, p.center.row + 0.5, color);
    }
    out += "</g>\n";
  };
  panel(0, sampled);
  panel(w + gap, survivors);
  out += "</svg>\n";
  return out;
}

}  // namespace starpoly::svg
