#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "lv/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test, removed on exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("lv_synth_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
}

// Mean of every 6x6 window via a summed-area table.
std::vector<double> window_means(const lv::GrayImage& img, int w) {
  const int n = img.width(), m = img.height();
  std::vector<double> sat(static_cast<std::size_t>(n + 1) * (m + 1), 0.0);
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < n; ++x)
      sat[(y + 1) * (n + 1) + x + 1] =
          img(x, y) + sat[y * (n + 1) + x + 1] + sat[(y + 1) * (n + 1) + x] - sat[y * (n + 1) + x];
  std::vector<double> out;
  for (int y = 0; y + w <= m; ++y)
    for (int x = 0; x + w <= n; ++x)
      out.push_back((sat[(y + w) * (n + 1) + x + w] - sat[y * (n + 1) + x + w] - sat[(y + w) * (n + 1) + x] +
                     sat[y * (n + 1) + x]) /
                    (w * w));
  return out;
}

}  // namespace

TEST(Synth, AreaConversion) {
  EXPECT_NEAR(lv::area_mm2(30), 0.0422, 5e-5);
  EXPECT_NEAR(lv::area_mm2(3195), 4.4930, 5e-5);
  EXPECT_EQ(lv::area_mm2(0), 0.0);
  EXPECT_DOUBLE_EQ(lv::area_mm2(100 + 250), lv::area_mm2(100) + lv::area_mm2(250));
}

TEST(Synth, ExtentQuartilesFollowTheStatistics) {
  lv::Rng rng(123);
  const lv::DefectStats stats;
  std::vector<double> xs, ys;
  for (int i = 0; i < 10000; ++i) {
    const auto e = lv::sample_extent(rng, stats);
    xs.push_back(e.x);
    ys.push_back(e.y);
    ASSERT_GE(e.x * e.y, 30.0);
    ASSERT_LE(e.x * e.y, 3195.0);
    ASSERT_GE(e.x, 6.0);
    ASSERT_LE(e.x, 65.0);
  }
  EXPECT_NEAR(quantile(xs, 0.25), 16.0, 2.0);
  EXPECT_NEAR(quantile(xs, 0.50), 20.0, 2.0);
  EXPECT_NEAR(quantile(xs, 0.75), 26.0, 2.0);
  EXPECT_NEAR(quantile(ys, 0.25), 16.0, 2.0);
  EXPECT_NEAR(quantile(ys, 0.50), 20.0, 2.0);
  EXPECT_NEAR(quantile(ys, 0.75), 25.0, 2.0);
}

TEST(Synth, CleanPatchHasNoDarkRegion) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    lv::Rng rng(seed);
    const auto p = lv::gen_patch(rng, false);
    EXPECT_EQ(p.label, 0);
    EXPECT_TRUE(p.blobs.empty());
    EXPECT_EQ(p.image.width(), 400);
    const auto px = p.image.pixels();
    const double mean = std::accumulate(px.begin(), px.end(), 0.0) / static_cast<double>(px.size());
    EXPECT_NEAR(mean, 140.0, 3.0);
    for (double w : window_means(p.image, 6)) ASSERT_LE(std::abs(w - mean), 25.0) << "seed " << seed;
  }
}

TEST(Synth, DefectPatchCarriesBlobs) {
  lv::Rng rng(5);
  const auto p = lv::gen_patch(rng, true);
  EXPECT_EQ(p.label, 1);
  ASSERT_GE(p.blobs.size(), 1u);
  ASSERT_LE(p.blobs.size(), 3u);
  for (const auto& b : p.blobs) {
    EXPECT_GE(b.dip, 30.0);
    EXPECT_LE(b.dip, 60.0);
    EXPECT_GE(b.cx - b.extent.x / 2, 0.0);
    EXPECT_LE(b.cx + b.extent.x / 2, 400.0);
    // The blob centre sits darker than the background.
    EXPECT_LT(p.image(static_cast<int>(b.cx), static_cast<int>(b.cy)), 125);
  }
}

TEST(Synth, SameSeedSamePatch) {
  lv::Rng a(77), b(77), c(78);
  const auto pa = lv::gen_patch(a, true), pb = lv::gen_patch(b, true), pc = lv::gen_patch(c, true);
  EXPECT_TRUE(std::ranges::equal(pa.image.pixels(), pb.image.pixels()));
  EXPECT_FALSE(std::ranges::equal(pa.image.pixels(), pc.image.pixels()));
}

TEST(Synth, PatchTooSmallForDefects) {
  lv::Rng rng(1);
  lv::GeneratorParams p;
  p.size = 60;
  try {
    lv::gen_patch(rng, true, {}, p);
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::DefectTooLargeForPatch);
  }
}

TEST(Synth, DefectCountIsExact) {
  const auto y = lv::defect_assignment(42, 2378, 0.1997);
  EXPECT_EQ(std::count(y.begin(), y.end(), 1), 475);
  const auto ten = lv::defect_assignment(1, 10, 0.5);
  EXPECT_EQ(std::count(ten.begin(), ten.end(), 1), 5);
  EXPECT_THROW(lv::defect_assignment(1, 1, 0.5), lv::Error);
  EXPECT_THROW(lv::defect_assignment(1, 10, 1.0), lv::Error);
}

TEST(Synth, StatsFileOverridesDefaults) {
  const auto s = lv::DefectStats::parse("# override\nx.q1 = 15\n\narea.max=3000\n");
  EXPECT_EQ(s.x.q1, 15.0);
  EXPECT_EQ(s.area.max, 3000.0);
  EXPECT_EQ(s.y.median, 20.0);
  EXPECT_THROW(lv::DefectStats::parse("x.q9=1\n"), lv::Error);
  EXPECT_THROW(lv::DefectStats::parse("x.q1=40\n"), lv::Error);
}

TEST(Synth, DatasetOnDiskIsReproducible) {
  TempDir a("a"), b("b");
  const auto ma = lv::gen_dataset(9, 10, 0.5, a.path);
  lv::gen_dataset(9, 10, 0.5, b.path);
  ASSERT_EQ(ma.size(), 10u);
  EXPECT_EQ(std::count_if(ma.entries.begin(), ma.entries.end(), [](const auto& e) { return e.label == 1; }), 5);
  for (const auto& entry : fs::directory_iterator(a.path)) {
    const auto other = b.path / entry.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(lv::read_text_file(entry.path()), lv::read_text_file(other)) << entry.path();
  }
  const auto loaded = lv::load_manifest(a.path / "manifest.csv");
  ASSERT_EQ(loaded.images.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(loaded.labels[i], ma.entries[i].label);
    EXPECT_EQ(loaded.ids[i], lv::patch_file_name(i));
  }
}

TEST(Synth, ManifestErrors) {
  TempDir t("m");
  lv::gen_dataset(2, 3, 0.34, t.path);
  auto expect_code = [&](const std::string& body, lv::Errc code) {
    write_text(t.path / "m.csv", body);
    try {
      lv::read_manifest(t.path / "m.csv");
      ADD_FAILURE() << body;
    } catch (const lv::Error& e) {
      EXPECT_EQ(e.code(), code) << body;
    }
  };
  expect_code("file,label\npatch_00000.pgm,0\n", lv::Errc::BadManifest);
  expect_code("path,label\npatch_00000.pgm,2\n", lv::Errc::BadLabel);
  expect_code("path,label\npatch_00000.pgm,0\npatch_00000.pgm,1\n", lv::Errc::BadManifest);
  expect_code("path,label\nnope.pgm,1\n", lv::Errc::MissingFile);

  write_text(t.path / "m.csv", "path,label\npatch_00002.pgm,1\npatch_00000.pgm,0\n");
  const auto m = lv::read_manifest(t.path / "m.csv");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.entries[0].path.filename(), "patch_00002.pgm");
  EXPECT_EQ(m.entries[1].label, 0);
}

TEST(Synth, MissingFileNamesThePath) {
  TempDir t("p");
  write_text(t.path / "m.csv", "path,label\nabsent.pgm,0\n");
  try {
    lv::read_manifest(t.path / "m.csv");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_NE(std::string(e.what()).find("absent.pgm"), std::string::npos);
  }
}
