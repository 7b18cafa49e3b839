#include "starpoly/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace starpoly {

double OverlapMatrix::iou(const OverlapEntry& e) const {
  const auto uni = pred_area[static_cast<std::size_t>(e.pred)] +
                   gt_area[static_cast<std::size_t>(e.gt)] - e.intersection;
  return uni > 0 ? static_cast<double>(e.intersection) / static_cast<double>(uni) : 0.0;
}

OverlapMatrix overlap_matrix(const LabelImage& pred, const LabelImage& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: pred {}x{} vs gt {}x{}",
                                            pred.height(), pred.width(), gt.height(),
                                            gt.width()));
  }
  OverlapMatrix m;
  m.num_pred = pred.num_objects();
  m.num_gt = gt.num_objects();
  m.pred_area.assign(static_cast<std::size_t>(m.num_pred) + 1, 0);
  m.gt_area.assign(static_cast<std::size_t>(m.num_gt) + 1, 0);

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++m.pred_area[static_cast<std::size_t>(p[i])];
    ++m.gt_area[static_cast<std::size_t>(g[i])];
    if (p[i] != 0 && g[i] != 0) {
      ++counts[(static_cast<std::uint64_t>(p[i]) << 32) | static_cast<std::uint32_t>(g[i])];
    }
  }
  m.pred_area[0] = 0;
  m.gt_area[0] = 0;
  m.entries.reserve(counts.size());
  for (const auto& [key, n] : counts) {
    m.entries.push_back({static_cast<std::int32_t>(key >> 32),
                         static_cast<std::int32_t>(key & 0xffffffffu), n});
  }
  std::sort(m.entries.begin(), m.entries.end(), [](const OverlapEntry& a, const OverlapEntry& b) {
    return a.pred != b.pred ? a.pred < b.pred : a.gt < b.gt;
  });
  return m;
}

MatchResult match_at(const OverlapMatrix& m, double tau) {
  std::vector<Match> pairs;
  for (const auto& e : m.entries) {
    const double v = m.iou(e);
    if (v > tau) pairs.push_back({e.pred, e.gt, v});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Match& a, const Match& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  std::vector<bool> pred_used(static_cast<std::size_t>(m.num_pred) + 1, false);
  std::vector<bool> gt_used(static_cast<std::size_t>(m.num_gt) + 1, false);
  MatchResult r;
  r.tau = tau;
  for (const auto& pm : pairs) {
    if (pred_used[static_cast<std::size_t>(pm.pred)] || gt_used[static_cast<std::size_t>(pm.gt)]) {
      continue;
    }
    pred_used[static_cast<std::size_t>(pm.pred)] = true;
    gt_used[static_cast<std::size_t>(pm.gt)] = true;
    r.matches.push_back(pm);
  }
  r.tp = static_cast<std::int64_t>(r.matches.size());
  r.fp = m.num_pred - r.tp;
  r.fn = m.num_gt - r.tp;
  return r;
}

double average_precision(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const auto den = tp + fp + fn;
  return den > 0 ? static_cast<double>(tp) / static_cast<double>(den) : 1.0;
}

std::vector<double> default_taus() {
  std::vector<double> taus;
  for (int i = 50; i <= 90; i += 5) taus.push_back(i / 100.0);
  return taus;
}

ScoreTable ap_sweep(const std::vector<OverlapMatrix>& matrices, const std::vector<double>& taus,
                    Aggregation aggregation) {
  if (matrices.empty()) throw std::invalid_argument("ap_sweep needs at least one image");
  ScoreTable table;
  table.aggregation = aggregation;
  for (double tau : taus) {
    ScoreRow row;
    row.tau = tau;
    double ap_sum = 0.0;
    for (const auto& m : matrices) {
      const auto r = match_at(m, tau);
      row.tp += r.tp;
      row.fp += r.fp;
      row.fn += r.fn;
      ap_sum += average_precision(r.tp, r.fp, r.fn);
    }
    row.ap = aggregation == Aggregation::kDataset
                 ? average_precision(row.tp, row.fp, row.fn)
                 : ap_sum / static_cast<double>(matrices.size());
    table.rows.push_back(row);
  }
  return table;
}

ScoreTable ap_sweep(const std::vector<std::pair<LabelImage, LabelImage>>& pred_gt,
                    const std::vector<double>& taus, Aggregation aggregation) {
  std::vector<OverlapMatrix> matrices;
  matrices.reserve(pred_gt.size());
  for (const auto& [pred, gt] : pred_gt) matrices.push_back(overlap_matrix(pred, gt));
  return ap_sweep(matrices, taus, aggregation);
}

std::string score_table_csv(const ScoreTable& table) {
  std::string out = "tau,tp,fp,fn,ap\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{:.5f},{},{},{},{:.5f}\n", r.tau, r.tp, r.fp, r.fn, r.ap);
  }
  return out;
}

ScoreTable parse_score_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "tau,tp,fp,fn,ap") {
    throw FormatError("score CSV: expected header 'tau,tp,fp,fn,ap'");
  }
  ScoreTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ScoreRow r;
    char c1, c2, c3, c4;
    if (!(ls >> r.tau >> c1 >> r.tp >> c2 >> r.fp >> c3 >> r.fn >> c4 >> r.ap) || c1 != ',' ||
        c2 != ',' || c3 != ',' || c4 != ',') {
      throw FormatError(fmt::format("score CSV: malformed row at line {}", line_no));
    }
    table.rows.push_back(r);
  }
  return table;
}

void print_score_table(std::ostream& os, const ScoreTable& table) {
  os << fmt::format("aggregation: {}\n", to_string(table.aggregation));
  os << fmt::format("{:>6} {:>7} {:>7} {:>7} {:>8}\n", "tau", "TP", "FP", "FN", "AP");
  for (const auto& r : table.rows) {
    os << fmt::format("{:>6.2f} {:>7} {:>7} {:>7} {:>8.5f}\n", r.tau, r.tp, r.fp, r.fn, r.ap);
  }
}

}  // namespace starpoly
