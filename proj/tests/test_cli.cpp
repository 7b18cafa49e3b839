#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>

#include "starpoly/io.hpp"
#include "starpoly/metrics.hpp"

namespace fs = std::filesystem;
using namespace starpoly;

namespace {

struct Result {
  int code;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(STARPOLY_CLI) + " " + args + " 2>&1";
  Result r{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  const auto bytes = io::read_file(p);
  return {bytes.begin(), bytes.end()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("starpoly_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  fs::path dir_;
};

// Non-touching disks on a 64x64 canvas.
void write_disk_labels(const fs::path& dir) {
  for (int i = 0; i < 3; ++i) {
    std::vector<std::int32_t> px(64 * 64, 0);
    int id = 0;
    for (auto [cr, cc, rad] : {std::array{16, 16, 8 + i}, std::array{44, 40, 12}}) {
      ++id;
      for (int r = 0; r < 64; ++r) {
        for (int c = 0; c < 64; ++c) {
          if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= rad * rad) px[r * 64 + c] = id;
        }
      }
    }
    io::write_label_png(dir / (io::index_stem(i) + ".png"), LabelImage(64, 64, px));
  }
}

}  // namespace

TEST_F(Cli, HelpForEverySubcommand) {
  EXPECT_EQ(run("--help").code, 0);
  for (const char* sub : {"toygen", "encode", "decode", "eval", "roundtrip", "plot"}) {
    const auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.output.find("--"), std::string::npos) << sub;
  }
}

TEST_F(Cli, InvalidFlagsFailNamingTheFlag) {
  auto r = run("toygen --out " + path("x") + " --frobnicate 3");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--frobnicate"), std::string::npos) << r.output;
  r = run("decode --maps " + path("m") + " --out " + path("o") + " --nms-thresh 7");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--nms-thresh"), std::string::npos) << r.output;
  r = run("eval --pred a --gt b --agg mean");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--agg"), std::string::npos) << r.output;
  r = run("roundtrip --labels " + path("") + " --rays 2");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--rays"), std::string::npos) << r.output;
  r = run("toygen --out " + path("x") + " --pairs 3");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--pairs"), std::string::npos) << r.output;
  EXPECT_NE(run("").code, 0);
}

TEST_F(Cli, ToygenIsDeterministic) {
  ASSERT_EQ(run("toygen --out " + path("a") + " --count 2 --seed 7 --size 96").code, 0);
  ASSERT_EQ(run("toygen --out " + path("b") + " --count 2 --seed 7 --size 96").code, 0);
  for (const char* rel : {"images/0000.png", "images/0001.png", "labels/0000.png",
                          "labels/0001.png", "split.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / rel), slurp(dir_ / "b" / rel)) << rel;
  }
}

TEST_F(Cli, ToygenSinglePairGivesTwoInstances) {
  const auto r = run("toygen --out " + path("d") + " --count 4 --pairs 1:1 --size 96");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("8 instances"), std::string::npos) << r.output;
  for (const auto& f : io::list_files(dir_ / "d" / "labels", ".png")) {
    EXPECT_EQ(io::read_label_png(f).num_objects(), 2);
  }
}

TEST_F(Cli, PipelineReproducesRoundtrip) {
  ASSERT_EQ(run("toygen --out " + path("ds") + " --count 3 --seed 5 --size 128").code, 0);
  ASSERT_EQ(run("encode --labels " + path("ds") + " --out " + path("w") + " --rays 16").code, 0);
  const auto dec = run("decode --maps " + path("w") + " --out " + path("w") +
                       " --nms-thresh 0.3 --dump-candidates 50 --seed 3");
  ASSERT_EQ(dec.code, 0) << dec.output;
  ASSERT_EQ(run("eval --pred " + path("w") + " --gt " + path("ds") + " --out " +
                path("eval.csv"))
                .code,
            0);
  ASSERT_EQ(run("roundtrip --labels " + path("ds") + " --rays 16 --nms-thresh 0.3 --out " +
                path("rt"))
                .code,
            0);
  EXPECT_EQ(slurp(dir_ / "eval.csv"), slurp(dir_ / "rt" / "scores_n16.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "rt" / "ap_vs_tau.svg"));
  EXPECT_EQ(io::list_files(dir_ / "w" / "detections", ".json").size(), 3u);
  EXPECT_EQ(io::list_files(dir_ / "w" / "candidates", ".svg").size(), 3u);

  // same seed, same overlay
  const auto first = slurp(dir_ / "w" / "candidates" / "0000.svg");
  ASSERT_EQ(run("decode --maps " + path("w") + " --out " + path("w2") +
                " --nms-thresh 0.3 --dump-candidates 50 --seed 3")
                .code,
            0);
  EXPECT_EQ(slurp(dir_ / "w2" / "candidates" / "0000.svg"), first);
}

TEST_F(Cli, RoundtripOnDisks) {
  write_disk_labels(dir_ / "disks");
  const auto r = run("roundtrip --labels " + path("disks") + " --rays 4,32 --out " + path("rt"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto t32 = parse_score_table_csv(slurp(dir_ / "rt" / "scores_n32.csv"));
  const auto t4 = parse_score_table_csv(slurp(dir_ / "rt" / "scores_n4.csv"));
  EXPECT_DOUBLE_EQ(t32.at_tau(0.5).ap, 1.0);
  EXPECT_LT(t4.at_tau(0.9).ap, t32.at_tau(0.9).ap);
}

TEST_F(Cli, RoundtripOnEmptyDirIsUsageError) {
  fs::create_directories(dir_ / "empty");
  const auto r = run("roundtrip --labels " + path("empty"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("--labels"), std::string::npos) << r.output;
}

TEST_F(Cli, EvalMissingPredictionFails) {
  write_disk_labels(dir_ / "gt");
  fs::create_directories(dir_ / "pred");
  EXPECT_NE(run("eval --pred " + path("pred") + " --gt " + path("gt")).code, 0);
}

TEST_F(Cli, EvalImageAggregation) {
  write_disk_labels(dir_ / "gt");
  const auto r = run("eval --pred " + path("gt") + " --gt " + path("gt") +
                     " --agg image --taus 0.5,0.75");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("aggregation: image"), std::string::npos);
  EXPECT_NE(r.output.find("0.75"), std::string::npos);
}

TEST_F(Cli, CorruptMapsFail) {
  fs::create_directories(dir_ / "maps");
  io::write_file_atomic(dir_ / "maps" / "0000.sdt", std::string("SDT1\x01"));
  const auto r = run("decode --maps " + path("maps") + " --out " + path("o"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("0000.sdt"), std::string::npos) << r.output;
}

TEST_F(Cli, PlotIsDeterministic) {
  const std::string csv = "tau,tp,fp,fn,ap\n0.50000,9,1,0,0.90000\n0.90000,5,5,4,0.35714\n";
  io::write_file_atomic(dir_ / "a.csv", csv);
  io::write_file_atomic(dir_ / "b.csv", csv);
  ASSERT_EQ(run("plot --scores " + path("a.csv") + " " + path("b.csv") + " --out " + path("p1.svg"))
                .code,
            0);
  ASSERT_EQ(run("plot --scores " + path("a.csv") + " " + path("b.csv") + " --out " + path("p2.svg"))
                .code,
            0);
  EXPECT_EQ(slurp(dir_ / "p1.svg"), slurp(dir_ / "p2.svg"));
  EXPECT_NE(run("plot --scores " + path("nope.csv") + " --out " + path("p3.svg")).code, 0);
}
