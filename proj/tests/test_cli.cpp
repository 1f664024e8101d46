#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "lv/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Result run(const std::string& args) {
  const std::string cmd = std::string(LVTOOL_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) { return lv::read_text_file(p); }

std::size_t csv_columns(const fs::path& p) {
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("lv_cli_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    const auto r = run("synth --n 40 --defect-frac 0.25 --seed 3 --size 96 --out " + data().string());
    ASSERT_EQ(r.code, 0) << r.output;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path data() { return root_ / "data"; }
  static fs::path manifest() { return data() / "manifest.csv"; }
  static fs::path dir(const std::string& name) { return root_ / name; }

  static inline fs::path root_;
};

}  // namespace

TEST_F(Cli, SynthWritesExactDefectCount) {
  const auto out = dir("synth200");
  const auto r = run("synth --n 200 --defect-frac 0.2 --seed 7 --size 80 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto lines = lv::read_lines(out / "manifest.csv");
  std::size_t defects = 0, rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ++rows;
    defects += lines[i].back() == '1';
  }
  EXPECT_EQ(rows, 200u);
  EXPECT_EQ(defects, 40u);
}

TEST_F(Cli, SynthWithoutOutIsUsageError) {
  const auto r = run("synth --n 10");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("--out"), std::string::npos);
}

TEST_F(Cli, SynthIsReproducible) {
  const auto a = dir("rep_a"), b = dir("rep_b");
  ASSERT_EQ(run("synth --n 12 --seed 11 --size 80 --out " + a.string()).code, 0);
  ASSERT_EQ(run("synth --n 12 --seed 11 --size 80 --out " + b.string()).code, 0);
  EXPECT_EQ(snapshot(a), snapshot(b));
}

TEST_F(Cli, ExtractWidths) {
  const auto edge = dir("f_edge.csv"), lbp = dir("f_lbp.csv"), hog = dir("f_hog.csv");
  auto r = run("extract --manifest " + manifest().string() + " --desc approxcanny --out " + edge.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv_columns(edge), 2u + 1600u);
  EXPECT_EQ(line_count(slurp(edge)), 41u);
  r = run("extract --manifest " + manifest().string() + " --desc lbp --cell 32 --out " + lbp.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv_columns(lbp), 2u + 59u);
  r = run("extract --manifest " + manifest().string() + " --desc hog --cell 10 --out " + hog.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv_columns(hog), 2u + 324u);
}

TEST_F(Cli, ExtractEmptyManifestIsRuntimeError) {
  const auto m = dir("empty.csv");
  std::ofstream(m) << "path,label\n";
  const auto r = run("extract --manifest " + m.string() + " --out " + dir("never.csv").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("empty dataset"), std::string::npos) << r.output;
}

TEST_F(Cli, BadDescriptorOrCellIsUsageError) {
  EXPECT_EQ(run("extract --manifest " + manifest().string() + " --desc sift --out x.csv").code, 2);
  EXPECT_EQ(run("extract --manifest " + manifest().string() + " --desc lbp --cell 12 --out x.csv").code, 2);
}

TEST_F(Cli, CvSingleCellIsDeterministic) {
  const auto a = dir("cv_a"), b = dir("cv_b");
  const std::string common = "cv --manifest " + manifest().string() + " --classifier fine-tree --seed 5 --out ";
  auto r = run(common + a.string());
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_EQ(run(common + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "results.csv"), slurp(b / "results.csv"));
  EXPECT_EQ(slurp(a / "confusion.csv"), slurp(b / "confusion.csv"));
  EXPECT_EQ(line_count(slurp(a / "scores.csv")), 41u);
  EXPECT_TRUE(fs::exists(a / "roc.csv"));

  const auto roc = dir("roc_again.csv");
  r = run("roc --scores " + (a / "scores.csv").string() + " --out " + roc.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(roc), slurp(a / "roc.csv"));
}

TEST_F(Cli, CvUnknownClassifierListsVariants) {
  const auto r = run("cv --manifest " + manifest().string() + " --classifier deep-forest --out " + dir("x").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("fine-gaussian-svm"), std::string::npos);
}

TEST_F(Cli, CvEdgeGridShape) {
  const auto out = dir("grid");
  const auto r = run("cv --grid edge --manifest " + manifest().string() + " --seed 1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto lines = lv::read_lines(out / "results.csv");
  ASSERT_EQ(lines.size(), 22u);  // header, 20 classifiers, Average
  EXPECT_EQ(lines[0], "classifier,Canny,Prewitt,Sobel,Roberts,LoG,ApproxCanny");
  EXPECT_EQ(lines.back().rfind("Average,", 0), 0u);
  EXPECT_EQ(line_count(slurp(out / "confusion.csv")), 1u + 120u);
}

TEST_F(Cli, AnnSingleCellWritesRocFiles) {
  const auto out = dir("ann");
  const auto r = run("ann-sweep --manifest " + manifest().string() + " --g 50 --split 75 --epochs 20 --out " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"sweep.csv", "cells.csv", "confusion.csv", "roc_train.csv", "roc_test.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto lines = lv::read_lines(out / "sweep.csv");
  EXPECT_EQ(lines[0], "neurons,75/25");
  EXPECT_EQ(lines[1].rfind("50,", 0), 0u);
}

TEST_F(Cli, AnnInvalidSplitIsUsageError) {
  const auto r = run("ann-sweep --manifest " + manifest().string() + " --split 60/40 --out " + dir("bad").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("75/25"), std::string::npos);
}

TEST_F(Cli, AnnFullSweepGrid) {
  const auto out = dir("sweep");
  const auto r = run("ann-sweep --manifest " + manifest().string() + " --epochs 2 --desc lbp --cell 32 --out " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto lines = lv::read_lines(out / "sweep.csv");
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0], "neurons,70/30,75/25,80/20,85/15,90/10,95/5");
  for (std::size_t i = 1; i <= 4; ++i)
    EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), ','), 6) << lines[i];
  EXPECT_FALSE(fs::exists(out / "roc_test.csv"));
}

TEST_F(Cli, ConfigFileAndFlagOverride) {
  const auto cfg = dir("exp.conf");
  std::ofstream(cfg) << "# lbp experiment\ndescriptor.name=lbp\ndescriptor.cell=32\nclassifier.name=fine-knn\n";
  const auto out = dir("cfg.csv");
  auto r = run("--config " + cfg.string() + " extract --manifest " + manifest().string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv_columns(out), 2u + 59u);
  // A flag typed on the command line wins over the file.
  r = run("--config " + cfg.string() + " extract --manifest " + manifest().string() + " --desc hpiv --out " +
          out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv_columns(out), 2u + 256u);

  std::ofstream(cfg) << "descriptor.nmae=lbp\n";
  r = run("--config " + cfg.string() + " extract --manifest " + manifest().string() + " --out " + out.string());
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, PrecomputedFeaturesFeedCv) {
  const auto feats = dir("feat.bin");
  ASSERT_EQ(run("extract --manifest " + manifest().string() + " --desc hpiv --out " + feats.string()).code, 0);
  const auto out = dir("cv_bin");
  const auto r = run("cv --features " + feats.string() + " --classifier majority --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(slurp(out / "results.csv").find("75.00"), std::string::npos);
}
