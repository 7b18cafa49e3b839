#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "starpoly/metrics.hpp"

using namespace starpoly;

namespace {

LabelImage shifted(const LabelImage& img, int dc) {
  std::vector<std::int64_t> raw(img.size(), 0);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      raw[static_cast<std::size_t>(r) * img.width() + c] = img.at_or_background(r, c - dc);
    }
  }
  return relabel_dense(img.height(), img.width(), raw);
}

// Ground truth with pixel dropout and random relabeling.
LabelImage perturbed(oracle::Rng& rng, const LabelImage& gt) {
  std::vector<std::int64_t> raw(gt.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = gt.data()[i];
    if (oracle::randint(rng, 0, 9) == 0) raw[i] = 0;
    if (oracle::randint(rng, 0, 19) == 0) raw[i] = oracle::randint(rng, 1, 8);
  }
  return relabel_dense(gt.height(), gt.width(), raw);
}

}  // namespace

TEST(AveragePrecision, Formula) {
  EXPECT_NEAR(average_precision(9, 1, 0), 0.9, 5e-5);
  EXPECT_DOUBLE_EQ(average_precision(1, 1, 2), 0.25);
  EXPECT_DOUBLE_EQ(average_precision(0, 3, 0), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(0, 0, 0), 1.0);
}

TEST(DefaultTaus, Grid) {
  const auto t = default_taus();
  ASSERT_EQ(t.size(), 9u);
  EXPECT_DOUBLE_EQ(t.front(), 0.5);
  EXPECT_DOUBLE_EQ(t.back(), 0.9);
}

TEST(OverlapMatrix, CountsAndIou) {
  const LabelImage gt(1, 6, {1, 1, 1, 1, 0, 2});
  const LabelImage pred(1, 6, {0, 1, 1, 1, 1, 2});
  const auto m = overlap_matrix(pred, gt);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].intersection, 3);
  EXPECT_DOUBLE_EQ(m.iou(m.entries[0]), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.iou(m.entries[1]), 1.0);
  EXPECT_THROW(overlap_matrix(LabelImage(2, 3), LabelImage(3, 2)), std::invalid_argument);
}

TEST(Matching, IdenticalImagesMatchFully) {
  oracle::Rng rng(41);
  const auto gt = oracle::random_labels(rng, 32, 32, 6);
  const auto table = ap_sweep({{gt, gt}}, default_taus());
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.tp, gt.num_objects());
    EXPECT_EQ(r.fp, 0);
    EXPECT_DOUBLE_EQ(r.ap, 1.0);
  }
}

TEST(Matching, ThresholdIsStrict) {
  // prediction covers half of the object: IoU is exactly 0.5
  const LabelImage gt(1, 4, {1, 1, 0, 0});
  const LabelImage pred(1, 4, {1, 0, 0, 0});
  const auto m = overlap_matrix(pred, gt);
  EXPECT_EQ(match_at(m, 0.5).tp, 0);
  EXPECT_EQ(match_at(m, 0.49).tp, 1);
}

TEST(Matching, ShiftLowersHighThresholdsOnly) {
  std::vector<std::int32_t> px(20 * 20, 0);
  for (int r = 5; r < 15; ++r) {
    for (int c = 5; c < 15; ++c) px[r * 20 + c] = 1;
  }
  const LabelImage gt(20, 20, px);
  const auto pred = shifted(gt, 1);  // IoU = 90 / 110
  const auto m = overlap_matrix(pred, gt);
  EXPECT_EQ(match_at(m, 0.8).tp, 1);
  EXPECT_EQ(match_at(m, 0.85).tp, 0);
}

TEST(Matching, GreedyEqualsExhaustive) {
  oracle::Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    const auto gt = oracle::random_labels(rng, 16, 16, 6);
    const auto pred = oracle::randint(rng, 0, 1) ? perturbed(rng, gt)
                                                 : oracle::random_labels(rng, 16, 16, 6);
    const auto m = overlap_matrix(pred, gt);
    for (double tau : {0.5, 0.7, 0.9}) {
      const auto r = match_at(m, tau);
      ASSERT_EQ(r.tp, oracle::max_matching(m, tau)) << t << " " << tau;
      ASSERT_EQ(r.tp + r.fp, pred.num_objects());
      ASSERT_EQ(r.tp + r.fn, gt.num_objects());
    }
  }
}

TEST(Sweep, ApIsNonIncreasingInTau) {
  oracle::Rng rng(43);
  std::vector<std::pair<LabelImage, LabelImage>> pairs;
  for (int i = 0; i < 10; ++i) {
    auto gt = oracle::random_labels(rng, 24, 24, 6);
    auto pred = perturbed(rng, gt);
    pairs.emplace_back(std::move(pred), std::move(gt));
  }
  for (auto agg : {Aggregation::kDataset, Aggregation::kImage}) {
    const auto table = ap_sweep(pairs, default_taus(), agg);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      EXPECT_LE(table.rows[i].ap, table.rows[i - 1].ap);
    }
  }
}

TEST(Sweep, AggregationModesDiffer) {
  // three perfect images and one with 1 TP, 3 FN
  const LabelImage one(1, 8, {1, 0, 0, 0, 0, 0, 0, 0});
  const LabelImage four(1, 8, {1, 0, 2, 0, 3, 0, 4, 0});
  const std::vector<std::pair<LabelImage, LabelImage>> pairs{
      {one, one}, {one, one}, {one, one}, {one, four}};
  EXPECT_DOUBLE_EQ(ap_sweep(pairs, {0.5}, Aggregation::kDataset).rows[0].ap, 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(ap_sweep(pairs, {0.5}, Aggregation::kImage).rows[0].ap, 3.25 / 4.0);
  EXPECT_THROW(ap_sweep(std::vector<OverlapMatrix>{}, {0.5}), std::invalid_argument);
}

TEST(ScoreCsv, RoundTripAndErrors) {
  ScoreTable t;
  t.rows = {{0.5, 10, 1, 2, 10.0 / 13.0}, {0.55, 9, 2, 3, 9.0 / 14.0}};
  const auto csv = score_table_csv(t);
  EXPECT_EQ(csv.substr(0, 16), "tau,tp,fp,fn,ap\n");
  EXPECT_NE(csv.find("0.50000,10,1,2,0.76923"), std::string::npos);
  const auto back = parse_score_table_csv(csv);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[1].fn, 3);
  EXPECT_NEAR(back.rows[1].ap, 9.0 / 14.0, 1e-5);
  EXPECT_THROW(parse_score_table_csv("tau,ap\n"), FormatError);
  EXPECT_THROW(parse_score_table_csv("tau,tp,fp,fn,ap\n0.5,1,2\n"), FormatError);
}

TEST(ScoreTable, PrintNamesAggregation) {
  ScoreTable t;
  t.aggregation = Aggregation::kImage;
  t.rows = {{0.5, 1, 0, 0, 1.0}};
  std::ostringstream os;
  print_score_table(os, t);
  EXPECT_NE(os.str().find("aggregation: image"), std::string::npos);
  EXPECT_NE(os.str().find("1.00000"), std::string::npos);
}
