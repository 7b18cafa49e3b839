// starpoly: synthetic data, encode/decode, scoring and plots.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "starpoly/detector.hpp"
#include "starpoly/encoder.hpp"
#include "starpoly/io.hpp"
#include "starpoly/metrics.hpp"
#include "starpoly/parallel.hpp"
#include "starpoly/pipeline.hpp"
#include "starpoly/renderer.hpp"
#include "starpoly/svg.hpp"
#include "starpoly/toygen.hpp"

namespace fs = std::filesystem;
using namespace starpoly;

namespace {

// Bad invocations that CLI11 cannot catch itself (empty inputs, etc).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw UsageError(fmt::format("{}: '{}' is not a number", flag, text));
  }
  return v;
}

std::vector<double> parse_taus(const std::string& text) {
  if (text.empty()) return default_taus();
  std::vector<double> taus;
  for (const auto& t : split_list(text, ',')) {
    const double v = parse_number("--taus", t);
    if (!(v >= 0.0 && v < 1.0)) throw UsageError(fmt::format("--taus: {} outside [0,1)", t));
    taus.push_back(v);
  }
  if (taus.empty()) throw UsageError("--taus: empty list");
  return taus;
}

std::vector<int> parse_rays(const std::string& text) {
  std::vector<int> out;
  for (const auto& t : split_list(text, ',')) {
    const double v = parse_number("--rays", t);
    if (v != static_cast<int>(v) || v < 3) {
      throw UsageError(fmt::format("--rays: {} is not an integer >= 3", t));
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw UsageError("--rays: empty list");
  return out;
}

fs::path stem_of(const fs::path& p) {
  // "0007.sdt" -> "0007"; also strips only the last extension.
  return p.stem();
}

void ensure_dir(const fs::path& dir) { fs::create_directories(dir); }

std::vector<fs::path> require_files(const fs::path& dir, const std::string& ext,
                                    const std::string& flag) {
  if (!fs::is_directory(dir)) throw UsageError(fmt::format("{}: {} is not a directory", flag, dir.string()));
  auto files = io::list_files(dir, ext);
  if (files.empty()) {
    throw UsageError(fmt::format("{}: no *{} files in {}", flag, ext, dir.string()));
  }
  return files;
}

struct DecodeFlags {
  double prob_thresh = 0.5;
  double nms_thresh = 0.4;
  std::string measure = "iou";

  NmsParams params() const {
    NmsParams p;
    p.prob_thresh = prob_thresh;
    p.overlap_thresh = nms_thresh;
    p.measure = parse_overlap_measure(measure);
    p.validate();
    return p;
  }
};

void add_decode_flags(CLI::App* cmd, DecodeFlags& f) {
  cmd->add_option("--prob-thresh", f.prob_thresh, "Candidate probability threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--nms-thresh", f.nms_thresh, "Maximum overlap between kept detections")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--measure", f.measure, "Overlap measure: iou or ios")
      ->capture_default_str()
      ->check(CLI::IsMember({"iou", "ios", "intersection-over-smaller"}));
}

struct EvalFlags {
  std::string taus;
  std::string agg = "dataset";
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f) {
  cmd->add_option("--taus", f.taus, "Comma-separated IoU thresholds (default 0.50..0.90 step 0.05)");
  cmd->add_option("--agg", f.agg, "Aggregation: dataset or image")
      ->capture_default_str()
      ->check(CLI::IsMember({"dataset", "image"}));
}

// --- toygen -------------------------------------------------------------

struct ToygenFlags {
  fs::path out;
  int count = 1000;
  int size = 256;
  std::uint64_t seed = 0;
  std::string pairs = "4:8";
};

int run_toygen(const ToygenFlags& f) {
  toy::ToyConfig cfg;
  cfg.count = f.count;
  cfg.size = f.size;
  cfg.seed = f.seed;
  const auto range = split_list(f.pairs, ':');
  if (range.size() != 2) throw UsageError("--pairs: expected MIN:MAX");
  cfg.pairs_min = static_cast<int>(parse_number("--pairs", range[0]));
  cfg.pairs_max = static_cast<int>(parse_number("--pairs", range[1]));
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  ensure_dir(f.out / "images");
  ensure_dir(f.out / "labels");
  std::vector<int> instances(static_cast<std::size_t>(cfg.count));
  std::vector<int> skipped(instances.size());
  parallel_for(instances.size(), worker_count(), [&](std::size_t i) {
    const auto img = toy::generate_image(cfg, static_cast<int>(i));
    const auto stem = io::index_stem(static_cast<int>(i)) + ".png";
    io::write_intensity_png(f.out / "images" / stem, img.intensity, cfg.size, cfg.size);
    io::write_label_png(f.out / "labels" / stem, img.labels);
    instances[i] = img.labels.num_objects();
    skipped[i] = img.skipped_pairs;
  });

  const auto split = toy::train_test_split(cfg.count);
  nlohmann::json js{{"train", split.train}, {"test", split.test}};
  io::write_file_atomic(f.out / "split.json", js.dump() + "\n");

  long total = 0;
  for (int n : instances) total += n;
  long total_skipped = 0;
  for (int n : skipped) total_skipped += n;
  const auto [mn, mx] = std::minmax_element(instances.begin(), instances.end());
  fmt::print("toygen: {} images, {} instances (min {}, max {} per image), {} pairs skipped\n",
             cfg.count, total, *mn, *mx, total_skipped);
  return 0;
}

// --- encode -------------------------------------------------------------

int run_encode(const fs::path& labels_dir, const fs::path& out, int rays) {
  const auto files = require_files(io::resolve_subdir(labels_dir, "labels"), ".png", "--labels");
  const RadialGeometry geometry(rays);
  ensure_dir(out / "maps");
  parallel_for(files.size(), worker_count(), [&](std::size_t i) {
    const auto labels = io::read_label_png(files[i]);
    io::write_maps(out / "maps" / (stem_of(files[i]).string() + ".sdt"), encode(labels, geometry));
  });
  fmt::print("encode: {} label images -> {} (n = {})\n", files.size(), (out / "maps").string(),
             rays);
  return 0;
}

// --- decode -------------------------------------------------------------

std::vector<StarPolygon> sample_candidates(const std::vector<Candidate>& cands, int n,
                                           std::uint64_t seed, std::size_t index) {
  std::vector<std::size_t> idx(cands.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0xc0ffeeu};
  std::mt19937_64 rng(seq);
  // Partial Fisher-Yates; std::sample's draw order is library-specific.
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), idx.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<StarPolygon> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(cands[idx[i]].poly);
  return out;
}

int run_decode(const fs::path& maps_dir, const fs::path& out, const DecodeFlags& flags,
               int dump_candidates, std::uint64_t seed) {
  const auto files = require_files(io::resolve_subdir(maps_dir, "maps"), ".sdt", "--maps");
  const auto params = flags.params();
  ensure_dir(out / "detections");
  ensure_dir(out / "labels");
  if (dump_candidates > 0) ensure_dir(out / "candidates");
  std::vector<std::size_t> counts(files.size());
  parallel_for(files.size(), worker_count(), [&](std::size_t i) {
    const auto maps = io::read_maps(files[i]);
    const auto cands = collect_candidates(maps, params);
    const auto dets = greedy_nms(cands, params, maps.height(), maps.width(), maps.n_rays());
    const auto stem = stem_of(files[i]).string();
    io::write_detections(out / "detections" / (stem + ".json"), dets);
    io::write_label_png(out / "labels" / (stem + ".png"), render_labels(dets));
    if (dump_candidates > 0) {
      const auto sampled = sample_candidates(cands, dump_candidates, seed, i);
      io::write_file_atomic(out / "candidates" / (stem + ".svg"),
                            svg::candidates_overlay(maps, sampled, dets.detections));
    }
    counts[i] = dets.detections.size();
  });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  fmt::print("decode: {} maps, {} detections\n", files.size(), total);
  return 0;
}

// --- eval ---------------------------------------------------------------

int run_eval(const fs::path& pred_dir, const fs::path& gt_dir, const EvalFlags& flags,
             const fs::path& out) {
  const auto taus = parse_taus(flags.taus);
  const auto agg = parse_aggregation(flags.agg);
  const auto gt_files = require_files(io::resolve_subdir(gt_dir, "labels"), ".png", "--gt");
  const auto pred_root = io::resolve_subdir(pred_dir, "labels");
  std::vector<fs::path> pred_files;
  for (const auto& g : gt_files) {
    auto p = pred_root / g.filename();
    if (!fs::is_regular_file(p)) {
      throw UsageError(fmt::format("--pred: missing prediction {}", p.string()));
    }
    pred_files.push_back(std::move(p));
  }
  std::vector<OverlapMatrix> matrices(gt_files.size());
  parallel_for(gt_files.size(), worker_count(), [&](std::size_t i) {
    matrices[i] = overlap_matrix(io::read_label_png(pred_files[i]), io::read_label_png(gt_files[i]));
  });
  const auto table = ap_sweep(matrices, taus, agg);
  print_score_table(std::cout, table);
  if (!out.empty()) {
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    io::write_file_atomic(out, score_table_csv(table));
  }
  return 0;
}

// --- roundtrip ----------------------------------------------------------

int run_roundtrip(const fs::path& labels_dir, const std::string& rays_text,
                  const DecodeFlags& dflags, const EvalFlags& eflags, const fs::path& out) {
  const auto rays = parse_rays(rays_text);
  const auto params = dflags.params();
  const auto taus = parse_taus(eflags.taus);
  const auto agg = parse_aggregation(eflags.agg);
  const auto files = require_files(io::resolve_subdir(labels_dir, "labels"), ".png", "--labels");

  std::vector<LabelImage> gts(files.size());
  parallel_for(files.size(), worker_count(),
               [&](std::size_t i) { gts[i] = io::read_label_png(files[i]); });

  ensure_dir(out);
  std::vector<svg::Series> series;
  for (int n : rays) {
    const auto table = roundtrip_scores(gts, n, params, taus, agg, worker_count());
    fmt::print("n = {}\n", n);
    print_score_table(std::cout, table);
    io::write_file_atomic(out / fmt::format("scores_n{}.csv", n), score_table_csv(table));
    series.push_back({fmt::format("n = {}", n), table});
  }
  io::write_file_atomic(out / "ap_vs_tau.svg",
                        svg::ap_chart(series, fmt::format("Round trip on {} images", gts.size())));
  return 0;
}

// --- plot ---------------------------------------------------------------

int run_plot(const std::vector<fs::path>& csvs, const fs::path& out, const std::string& title) {
  std::vector<svg::Series> series;
  for (const auto& p : csvs) {
    const auto bytes = io::read_file(p);
    series.push_back({p.stem().string(),
                      parse_score_table_csv(std::string(bytes.begin(), bytes.end()))});
  }
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  io::write_file_atomic(out, svg::ap_chart(series, title));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-convex polygon toolkit: toy data, encoding, NMS decoding and AP scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "starpoly 0.1.0");

  ToygenFlags tg;
  auto* toygen = app.add_subcommand("toygen", "Generate the synthetic half-ellipse dataset");
  toygen->add_option("--out", tg.out, "Output dataset directory")->required();
  toygen->add_option("--count", tg.count, "Number of images")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  toygen->add_option("--size", tg.size, "Image side length in pixels")
      ->capture_default_str()
      ->check(CLI::Range(64, 8192));
  toygen->add_option("--seed", tg.seed, "Random seed")->capture_default_str();
  toygen->add_option("--pairs", tg.pairs, "Pairs per image, MIN:MAX")->capture_default_str();

  fs::path enc_labels, enc_out;
  int enc_rays = RadialGeometry::kDefaultRays;
  auto* enc = app.add_subcommand("encode", "Encode label images into dense maps (SDT)");
  enc->add_option("--labels", enc_labels, "Label directory (or dataset root)")->required();
  enc->add_option("--out", enc_out, "Output directory; maps go to OUT/maps")->required();
  enc->add_option("--rays", enc_rays, "Number of radial directions")
      ->capture_default_str()
      ->check(CLI::Range(3, 4096));

  fs::path dec_maps, dec_out;
  DecodeFlags dec_flags;
  int dec_dump = 0;
  std::uint64_t dec_seed = 0;
  auto* dec = app.add_subcommand("decode", "Detect instances in dense maps via polygon NMS");
  dec->add_option("--maps", dec_maps, "Map directory (or its parent)")->required();
  dec->add_option("--out", dec_out, "Output directory")->required();
  add_decode_flags(dec, dec_flags);
  dec->add_option("--dump-candidates", dec_dump,
                  "Write an SVG with N random candidates and the survivors per image")
      ->check(CLI::NonNegativeNumber);
  dec->add_option("--seed", dec_seed, "Seed for candidate sampling")->capture_default_str();

  fs::path ev_pred, ev_gt, ev_out;
  EvalFlags ev_flags;
  auto* ev = app.add_subcommand("eval", "Score predicted label images against ground truth");
  ev->add_option("--pred", ev_pred, "Predicted label directory (or its parent)")->required();
  ev->add_option("--gt", ev_gt, "Ground-truth label directory (or dataset root)")->required();
  add_eval_flags(ev, ev_flags);
  ev->add_option("--out", ev_out, "CSV output path")->capture_default_str();

  fs::path rt_labels, rt_out = "roundtrip";
  std::string rt_rays = "32";
  DecodeFlags rt_dflags;
  EvalFlags rt_eflags;
  auto* rt = app.add_subcommand("roundtrip", "Encode, decode and score labels against themselves");
  rt->add_option("--labels", rt_labels, "Label directory (or dataset root)")->required();
  rt->add_option("--rays", rt_rays, "Comma-separated ray counts, one curve each")
      ->capture_default_str();
  add_decode_flags(rt, rt_dflags);
  add_eval_flags(rt, rt_eflags);
  rt->add_option("--out", rt_out, "Output directory for CSVs and the chart")->capture_default_str();

  std::vector<fs::path> pl_scores;
  fs::path pl_out;
  std::string pl_title = "Average precision vs IoU threshold";
  auto* pl = app.add_subcommand("plot", "Plot AP-vs-tau curves from score CSVs");
  pl->add_option("--scores", pl_scores, "Score CSV files")->required()->check(CLI::ExistingFile);
  pl->add_option("--out", pl_out, "Output SVG")->required();
  pl->add_option("--title", pl_title, "Chart title")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*toygen) return run_toygen(tg);
    if (*enc) return run_encode(enc_labels, enc_out, enc_rays);
    if (*dec) return run_decode(dec_maps, dec_out, dec_flags, dec_dump, dec_seed);
    if (*ev) return run_eval(ev_pred, ev_gt, ev_flags, ev_out);
    if (*rt) return run_roundtrip(rt_labels, rt_rays, rt_dflags, rt_eflags, rt_out);
    if (*pl) return run_plot(pl_scores, pl_out, pl_title);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
