#include "starpoly/toygen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "starpoly/parallel.hpp"

namespace starpoly::toy {

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void check_range(double lo, double hi, const char* name) {
  if (!(lo <= hi)) throw std::invalid_argument(std::string("empty range: ") + name);
}

}  // namespace

void ToyConfig::validate() const {
  if (size < 64) throw std::invalid_argument("image size must be >= 64");
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  if (pairs_min < 0 || pairs_min > pairs_max) throw std::invalid_argument("empty range: pairs");
  check_range(major_min, major_max, "major axis");
  check_range(minor_min, minor_max, "minor axis");
  check_range(aspect_min, aspect_max, "aspect");
  check_range(blur_min, blur_max, "blur sigma");
  check_range(noise_min, noise_max, "noise std");
  check_range(fg_min, fg_max, "foreground intensity");
  if (!(oblique_prob >= 0.0 && oblique_prob <= 1.0)) {
    throw std::invalid_argument("oblique_prob must be in [0,1]");
  }
  if (major_min <= 0.0 || minor_min <= 0.0) throw std::invalid_argument("axes must be positive");
  if (minor_max < aspect_min * major_min || minor_min > aspect_max * major_max) {
    throw std::invalid_argument("axis ranges cannot satisfy the aspect constraint");
  }
  if (2.0 * major_max + 2.0 * margin + 4.0 > size) {
    throw std::invalid_argument("ellipses do not fit in the image");
  }
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (margin < 0) throw std::invalid_argument("margin must be >= 0");
}

HalfEllipsePair rasterize_pair(double major, double minor, double theta, double center_row,
                               double center_col) {
  HalfEllipsePair pair;
  pair.theta = theta;
  pair.major = major;
  pair.minor = minor;
  const double ct = std::cos(theta), st = std::sin(theta);
  const int reach = static_cast<int>(std::ceil(std::max(major, minor))) + 2;
  const int r0 = static_cast<int>(std::floor(center_row)) - reach;
  const int c0 = static_cast<int>(std::floor(center_col)) - reach;
  for (int r = r0; r <= r0 + 2 * reach + 1; ++r) {
    for (int c = c0; c <= c0 + 2 * reach + 1; ++c) {
      const double y = r - center_row, x = c - center_col;
      const double u = x * ct + y * st;
      const double v = -x * st + y * ct;
      if ((u / major) * (u / major) + (v / minor) * (v / minor) > 1.0) continue;
      (v >= 0.0 ? pair.first : pair.second).push_back({r, c});
    }
  }
  return pair;
}

double bbox_iou(const std::vector<Pixel>& a, const std::vector<Pixel>& b) {
  if (a.empty() || b.empty()) return 0.0;
  struct Box {
    int r0, r1, c0, c1;
  };
  const auto box = [](const std::vector<Pixel>& px) {
    Box bx{px[0].row, px[0].row, px[0].col, px[0].col};
    for (const auto& p : px) {
      bx.r0 = std::min(bx.r0, p.row);
      bx.r1 = std::max(bx.r1, p.row);
      bx.c0 = std::min(bx.c0, p.col);
      bx.c1 = std::max(bx.c1, p.col);
    }
    return bx;
  };
  const Box x = box(a), y = box(b);
  const auto ih = std::max(0, std::min(x.r1, y.r1) - std::max(x.r0, y.r0) + 1);
  const auto iw = std::max(0, std::min(x.c1, y.c1) - std::max(x.c0, y.c0) + 1);
  const double inter = static_cast<double>(ih) * iw;
  const double ax = static_cast<double>(x.r1 - x.r0 + 1) * (x.c1 - x.c0 + 1);
  const double ay = static_cast<double>(y.r1 - y.r0 + 1) * (y.c1 - y.c0 + 1);
  return inter / (ax + ay - inter);
}

bool is_four_connected(const std::vector<Pixel>& pixels) {
  if (pixels.empty()) return false;
  std::vector<Pixel> sorted = pixels;
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> seen(sorted.size(), false);
  const auto find = [&](Pixel p) -> std::ptrdiff_t {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), p);
    return (it != sorted.end() && *it == p) ? it - sorted.begin() : -1;
  };
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t visited = 0;
  while (!stack.empty()) {
    const Pixel p = sorted[stack.back()];
    stack.pop_back();
    ++visited;
    for (const Pixel q : {Pixel{p.row - 1, p.col}, Pixel{p.row + 1, p.col},
                          Pixel{p.row, p.col - 1}, Pixel{p.row, p.col + 1}}) {
      const auto i = find(q);
      if (i >= 0 && !seen[static_cast<std::size_t>(i)]) {
        seen[static_cast<std::size_t>(i)] = true;
        stack.push_back(static_cast<std::size_t>(i));
      }
    }
  }
  return visited == sorted.size();
}

HalfEllipsePair generate_pair(Rng& rng, const ToyConfig& config) {
  // Every draw satisfies the bounds for the configured ranges; the loop guards
  // against pixelization outliers.
  for (int tries = 0; tries < 1000; ++tries) {
    const bool oblique = uniform(rng, 0.0, 1.0) < config.oblique_prob;
    double major = 0.0, minor = 0.0;
    do {
      major = uniform(rng, config.major_min, config.major_max);
      minor = uniform(rng, config.minor_min, config.minor_max);
    } while (minor < config.aspect_min * major || minor > config.aspect_max * major);
    double theta;
    if (oblique) {
      theta = deg(uniform(rng, 30.0, 60.0));
      if (uniform(rng, 0.0, 1.0) < 0.5) theta += deg(90.0);
    } else {
      theta = uniform(rng, 0.0, 1.0) < 0.5 ? 0.0 : deg(90.0);
    }
    const double sub_row = uniform(rng, 0.0, 1.0);
    const double sub_col = uniform(rng, 0.0, 1.0);
    auto pair = rasterize_pair(major, minor, theta, sub_row, sub_col);
    pair.mode = oblique ? PairMode::kOblique : PairMode::kAxisAligned;
    const double iou = bbox_iou(pair.first, pair.second);
    const bool mode_ok = oblique ? iou > kObliqueMinBoxIoU : iou < kAxisAlignedMaxBoxIoU;
    if (mode_ok && is_four_connected(pair.first) && is_four_connected(pair.second)) return pair;
  }
  throw std::logic_error("toy pair generation did not converge; check ToyConfig ranges");
}

Rng image_rng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  return Rng(seq);
}

namespace {

// Separable Gaussian blur with edge clamping.
std::vector<float> gaussian_blur(const std::vector<float>& img, int size, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += kernel[static_cast<std::size_t>(i + radius)];
  }
  for (auto& k : kernel) k /= norm;
  const auto at = [size](int r, int c) { return static_cast<std::size_t>(r) * size + c; };
  std::vector<float> tmp(img.size()), out(img.size());
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * img[at(r, std::clamp(c + i, 0, size - 1))];
      }
      tmp[at(r, c)] = static_cast<float>(acc);
    }
  }
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[at(std::clamp(r + i, 0, size - 1), c)];
      }
      out[at(r, c)] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

ToyImage generate_image(const ToyConfig& config, int index) {
  config.validate();
  Rng rng = image_rng(config.seed, index);
  const int size = config.size;
  const auto at = [size](int r, int c) { return static_cast<std::size_t>(r) * size + c; };

  ToyImage image;
  image.index = index;
  const int n_pairs = std::uniform_int_distribution<int>(config.pairs_min, config.pairs_max)(rng);
  const double sigma = uniform(rng, config.blur_min, config.blur_max);
  const double noise_std = uniform(rng, config.noise_min, config.noise_max);

  std::vector<std::int32_t> labels(static_cast<std::size_t>(size) * size, 0);
  std::vector<std::uint8_t> blocked(labels.size(), 0);
  std::vector<double> fg_values;

  for (int p = 0; p < n_pairs; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
      auto pair = generate_pair(rng, config);
      const int reach = static_cast<int>(std::ceil(pair.major)) + 2;
      const int lo = reach, hi = size - 1 - reach;
      const int row = std::uniform_int_distribution<int>(lo, hi)(rng);
      const int col = std::uniform_int_distribution<int>(lo, hi)(rng);
      const auto free = [&](const std::vector<Pixel>& px) {
        return std::all_of(px.begin(), px.end(), [&](Pixel q) {
          const int r = q.row + row, c = q.col + col;
          return r >= 0 && c >= 0 && r < size && c < size && !blocked[at(r, c)];
        });
      };
      if (!free(pair.first) || !free(pair.second)) continue;
      for (auto* half : {&pair.first, &pair.second}) {
        const auto id = static_cast<std::int32_t>(fg_values.size() + 1);
        fg_values.push_back(uniform(rng, config.fg_min, config.fg_max));
        for (auto& q : *half) {
          q = {q.row + row, q.col + col};
          labels[at(q.row, q.col)] = id;
        }
      }
      for (const auto* half : {&pair.first, &pair.second}) {
        for (const auto& q : *half) {
          for (int dr = -config.margin; dr <= config.margin; ++dr) {
            for (int dc = -config.margin; dc <= config.margin; ++dc) {
              const int r = q.row + dr, c = q.col + dc;
              if (r >= 0 && c >= 0 && r < size && c < size) blocked[at(r, c)] = 1;
            }
          }
        }
      }
      image.pairs.push_back(std::move(pair));
      placed = true;
    }
    if (!placed) ++image.skipped_pairs;
  }

  std::vector<float> intensity(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    intensity[i] = static_cast<float>(
        config.background +
        (labels[i] != 0 ? fg_values[static_cast<std::size_t>(labels[i] - 1)] : 0.0));
  }
  intensity = gaussian_blur(intensity, size, sigma);
  std::normal_distribution<double> noise(0.0, noise_std);
  for (auto& v : intensity) {
    v = static_cast<float>(std::clamp(static_cast<double>(v) + noise(rng), 0.0, 1.0));
  }

  image.intensity = std::move(intensity);
  image.labels = LabelImage(size, size, std::move(labels));
  return image;
}

std::vector<ToyImage> generate_dataset(const ToyConfig& config, int threads) {
  config.validate();
  std::vector<ToyImage> images(static_cast<std::size_t>(config.count));
  parallel_for(images.size(), threads,
               [&](std::size_t i) { images[i] = generate_image(config, static_cast<int>(i)); });
  return images;
}

Split train_test_split(int count) {
  Split s;
  const int n_train = static_cast<int>(std::floor(0.9 * count));
  for (int i = 0; i < count; ++i) (i < n_train ? s.train : s.test).push_back(i);
  return s;
}

}  // namespace starpoly::toy
