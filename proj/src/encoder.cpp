#include "starpoly/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starpoly {

namespace {

// Meijster et al. separable exact EDT: squared distance from every cell of an
// h x w grid to the nearest seed cell, in integer arithmetic. Every column must
// contain at least one seed.
std::vector<std::int64_t> meijster_edt(const std::vector<std::uint8_t>& seed, int h, int w) {
  const auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

  // Phase 1: per-column distance to the nearest seed row.
  std::vector<std::int64_t> g(static_cast<std::size_t>(h) * w);
  const std::int64_t inf = static_cast<std::int64_t>(h) + w;
  for (int c = 0; c < w; ++c) {
    g[idx(0, c)] = seed[idx(0, c)] ? 0 : inf;
    for (int r = 1; r < h; ++r) g[idx(r, c)] = seed[idx(r, c)] ? 0 : g[idx(r - 1, c)] + 1;
    for (int r = h - 2; r >= 0; --r) {
      if (g[idx(r + 1, c)] < g[idx(r, c)]) g[idx(r, c)] = g[idx(r + 1, c)] + 1;
    }
  }

  // Phase 2: lower envelope of parabolas along each row.
  std::vector<std::int64_t> dt(g.size());
  std::vector<int> s(static_cast<std::size_t>(w));
  std::vector<int> t(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    const std::int64_t* row = &g[idx(r, 0)];
    const auto f = [row](std::int64_t x, int i) { return (x - i) * (x - i) + row[i] * row[i]; };
    const auto sep = [row](int i, int u) {
      const std::int64_t num = static_cast<std::int64_t>(u) * u -
                               static_cast<std::int64_t>(i) * i + row[u] * row[u] -
                               row[i] * row[i];
      return num / (2 * static_cast<std::int64_t>(u - i));
    };
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (int u = 1; u < w; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t wpos = 1 + sep(s[q], u);
        if (wpos < w) {
          ++q;
          s[q] = u;
          t[q] = static_cast<int>(wpos);
        }
      }
    }
    for (int u = w - 1; u >= 0; --u) {
      dt[idx(r, u)] = f(u, s[q]);
      if (u == t[q]) --q;
    }
  }
  return dt;
}

struct ObjectBox {
  int r0 = std::numeric_limits<int>::max(), r1 = -1;
  int c0 = std::numeric_limits<int>::max(), c1 = -1;
};

}  // namespace

std::vector<std::int64_t> squared_distance_to_background(const LabelImage& labels) {
  const int h = labels.height();
  const int w = labels.width();
  std::vector<std::int64_t> out(labels.size(), 0);

  std::vector<ObjectBox> boxes(static_cast<std::size_t>(labels.num_objects()) + 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto id = labels.at(r, c);
      if (id == 0) continue;
      auto& b = boxes[static_cast<std::size_t>(id)];
      b.r0 = std::min(b.r0, r);
      b.r1 = std::max(b.r1, r);
      b.c0 = std::min(b.c0, c);
      b.c1 = std::max(b.c1, c);
    }
  }

  // Each object is transformed inside its bounding box grown by one pixel. The
  // added ring holds no pixel of the object, so it bounds the nearest pixel
  // of any other ID (pixels outside the image included).
  std::vector<std::uint8_t> seed;
  for (std::int32_t id = 1; id <= labels.num_objects(); ++id) {
    const auto& b = boxes[static_cast<std::size_t>(id)];
    const int bh = b.r1 - b.r0 + 3;
    const int bw = b.c1 - b.c0 + 3;
    seed.assign(static_cast<std::size_t>(bh) * bw, 1);
    for (int r = 1; r < bh - 1; ++r) {
      for (int c = 1; c < bw - 1; ++c) {
        seed[static_cast<std::size_t>(r) * bw + c] = labels.at(b.r0 + r - 1, b.c0 + c - 1) != id;
      }
    }
    const auto dt = meijster_edt(seed, bh, bw);
    for (int r = 1; r < bh - 1; ++r) {
      for (int c = 1; c < bw - 1; ++c) {
        if (seed[static_cast<std::size_t>(r) * bw + c]) continue;
        out[static_cast<std::size_t>(b.r0 + r - 1) * w + (b.c0 + c - 1)] =
            dt[static_cast<std::size_t>(r) * bw + c];
      }
    }
  }
  return out;
}

std::vector<double> distance_to_background(const LabelImage& labels) {
  const auto sq = squared_distance_to_background(labels);
  std::vector<double> out(sq.size());
  std::transform(sq.begin(), sq.end(), out.begin(),
                 [](std::int64_t v) { return std::sqrt(static_cast<double>(v)); });
  return out;
}

std::vector<float> object_probabilities(const LabelImage& labels) {
  const auto dist = distance_to_background(labels);
  std::vector<double> obj_max(static_cast<std::size_t>(labels.num_objects()) + 1, 0.0);
  const auto ids = labels.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& m = obj_max[static_cast<std::size_t>(ids[i])];
    m = std::max(m, dist[i]);
  }
  std::vector<float> prob(ids.size(), 0.0f);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == 0) continue;
    prob[i] = static_cast<float>(dist[i] / obj_max[static_cast<std::size_t>(ids[i])]);
  }
  return prob;
}

int cast_ray(const LabelImage& labels, int row, int col, const Direction& dir) {
  const auto id = labels.at_or_background(row, col);
  if (id == 0) return 0;
  for (int step = 1;; ++step) {
    const int r = row + static_cast<int>(std::lround(step * dir.drow));
    const int c = col + static_cast<int>(std::lround(step * dir.dcol));
    if (labels.at_or_background(r, c) != id) return step;
  }
}

std::vector<float> star_distances(const LabelImage& labels, const RadialGeometry& geometry) {
  const int h = labels.height();
  const int w = labels.width();
  const std::size_t plane = labels.size();
  std::vector<float> out(plane * static_cast<std::size_t>(geometry.n_rays()), 0.0f);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (labels.at(r, c) == 0) continue;
      const std::size_t p = static_cast<std::size_t>(r) * w + c;
      for (int k = 0; k < geometry.n_rays(); ++k) {
        out[static_cast<std::size_t>(k) * plane + p] =
            static_cast<float>(cast_ray(labels, r, c, geometry.direction(k)));
      }
    }
  }
  return out;
}

DenseMaps encode(const LabelImage& labels, const RadialGeometry& geometry) {
  DenseMaps maps(labels.height(), labels.width(), geometry);
  const auto prob = object_probabilities(labels);
  std::copy(prob.begin(), prob.end(), maps.prob().begin());
  const auto dist = star_distances(labels, geometry);
  std::copy(dist.begin(), dist.end(), maps.dist_all().begin());
  return maps;
}

}  // namespace starpoly
