#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "starpoly/parallel.hpp"
#include "starpoly/toygen.hpp"

using namespace starpoly;
using namespace starpoly::toy;

namespace {

ToyConfig small_config() {
  ToyConfig c;
  c.size = 128;
  c.count = 6;
  c.pairs_min = 2;
  c.pairs_max = 4;
  c.seed = 99;
  return c;
}

}  // namespace

TEST(ToyConfig, Validation) {
  ToyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.size = 32;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.pairs_min = 5;
  c.pairs_max = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.aspect_min = 0.9;
  c.aspect_max = 0.95;
  c.minor_max = 10;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RasterizePair, HalvesTouchAlongMajorAxis) {
  const auto p = rasterize_pair(20, 12, 0.0, 0.3, 0.6);
  ASSERT_FALSE(p.first.empty());
  ASSERT_FALSE(p.second.empty());
  // theta = 0: the cut runs along +col, so halves split by row
  int max_second = -1000, min_first = 1000;
  for (const auto& q : p.first) min_first = std::min(min_first, q.row);
  for (const auto& q : p.second) max_second = std::max(max_second, q.row);
  EXPECT_EQ(min_first, max_second + 1);
  EXPECT_NEAR(static_cast<double>(p.first.size() + p.second.size()), std::numbers::pi * 240,
              0.05 * std::numbers::pi * 240);
}

TEST(BboxIou, Basics) {
  const std::vector<Pixel> a{{0, 0}, {1, 1}};
  const std::vector<Pixel> b{{1, 1}, {2, 2}};
  EXPECT_DOUBLE_EQ(bbox_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(bbox_iou(a, b), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(bbox_iou(a, {}), 0.0);
}

TEST(FourConnected, Basics) {
  EXPECT_TRUE(is_four_connected({{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_FALSE(is_four_connected({{0, 0}, {1, 1}}));
  EXPECT_FALSE(is_four_connected({}));
}

TEST(GeneratePair, ModesAreSeparated) {
  Rng rng(5);
  const ToyConfig c;
  int aligned = 0, oblique = 0;
  for (int i = 0; i < 300; ++i) {
    const auto p = generate_pair(rng, c);
    const double iou = bbox_iou(p.first, p.second);
    if (p.mode == PairMode::kAxisAligned) {
      ++aligned;
      EXPECT_LT(iou, kAxisAlignedMaxBoxIoU);
    } else {
      ++oblique;
      EXPECT_GT(iou, kObliqueMinBoxIoU);
    }
    EXPECT_TRUE(is_four_connected(p.first));
    EXPECT_TRUE(is_four_connected(p.second));
  }
  EXPECT_GT(aligned, 100);
  EXPECT_GT(oblique, 100);
}

TEST(GenerateImage, DeterministicAndIndependentOfThreads) {
  const auto c = small_config();
  const auto seq = generate_dataset(c, 1);
  const auto par = generate_dataset(c, 3);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].labels, par[i].labels);
    EXPECT_EQ(seq[i].intensity, par[i].intensity);
  }
  EXPECT_EQ(generate_image(c, 3).labels, seq[3].labels);
  auto other = c;
  other.seed = 100;
  EXPECT_NE(generate_image(other, 3).labels, seq[3].labels);
}

TEST(GenerateImage, InstancesComeInTouchingPairs) {
  const auto c = small_config();
  for (int i = 0; i < c.count; ++i) {
    const auto img = generate_image(c, i);
    const int placed = static_cast<int>(img.pairs.size());
    EXPECT_EQ(img.labels.num_objects(), 2 * placed);
    EXPECT_GE(placed + img.skipped_pairs, c.pairs_min);
    EXPECT_LE(placed + img.skipped_pairs, c.pairs_max);
    // IDs 2k-1 and 2k share an edge; different pairs keep the margin
    const auto& L = img.labels;
    std::set<std::pair<int, int>> contacts;
    for (int r = 0; r < L.height(); ++r) {
      for (int col = 0; col < L.width(); ++col) {
        for (auto [a, b] : {std::pair{L.at(r, col), L.at_or_background(r, col + 1)},
                            std::pair{L.at(r, col), L.at_or_background(r + 1, col)}}) {
          if (a != 0 && b != 0 && a != b) contacts.insert({std::min(a, b), std::max(a, b)});
        }
      }
    }
    for (const auto& [a, b] : contacts) {
      EXPECT_EQ(b, a + 1);
      EXPECT_EQ(a % 2, 1);
    }
    EXPECT_EQ(static_cast<int>(contacts.size()), placed);
    for (float v : img.intensity) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
}

TEST(GenerateImage, IntensityIsBrighterOnObjects) {
  const auto img = generate_image(small_config(), 0);
  double fg = 0, bg = 0;
  std::size_t nf = 0, nb = 0;
  for (std::size_t i = 0; i < img.intensity.size(); ++i) {
    if (img.labels.data()[i] != 0) {
      fg += img.intensity[i];
      ++nf;
    } else {
      bg += img.intensity[i];
      ++nb;
    }
  }
  EXPECT_GT(fg / nf, bg / nb + 0.3);
}

TEST(Split, NinetyTen) {
  const auto s = train_test_split(1000);
  EXPECT_EQ(s.train.size(), 900u);
  EXPECT_EQ(s.test.size(), 100u);
  EXPECT_EQ(s.test.front(), 900);
  const auto tiny = train_test_split(3);
  EXPECT_EQ(tiny.train.size() + tiny.test.size(), 3u);
}

TEST(Parallel, PropagatesExceptionsAndCoversRange) {
  std::vector<int> seen(100, 0);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i] += 1; });
  EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), 100);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_GE(worker_count(), 1);
}
