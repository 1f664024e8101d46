#include <gtest/gtest.h>
#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "lv/image.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / ("lv_image_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

void write_bytes(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

void write_rgb_png(const fs::path& p, int w, int h, const std::vector<unsigned char>& rgb) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = PNG_FORMAT_RGB;
  ASSERT_TRUE(png_image_write_to_file(&img, p.c_str(), 0, rgb.data(), 0, nullptr));
}

lv::GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  lv::GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(u(rng));
  return img;
}

}  // namespace

TEST(GrayImage, RejectsZeroDimensions) {
  EXPECT_THROW(lv::GrayImage(0, 3), lv::Error);
  EXPECT_THROW(lv::GrayImage(2, 2, std::vector<std::uint8_t>(3)), lv::Error);
}

TEST(LoadImage, BinaryPgmPassesBytesThrough) {
  const auto p = temp_dir() / "a.pgm";
  write_bytes(p, std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4));
  const auto img = lv::load_image(p);
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_EQ((std::vector<int>{img(0, 0), img(1, 0), img(0, 1), img(1, 1)}), (std::vector<int>{0, 255, 128, 64}));
}

TEST(LoadImage, AsciiPgmWithComment) {
  const auto p = temp_dir() / "b.pgm";
  write_bytes(p, "P2\n# made by hand\n2 2\n255\n0 255\n128 64\n");
  const auto img = lv::load_image(p);
  EXPECT_EQ((std::vector<int>{img(0, 0), img(1, 0), img(0, 1), img(1, 1)}), (std::vector<int>{0, 255, 128, 64}));
}

TEST(LoadImage, RedPngPixelBecomesLuma76) {
  const auto p = temp_dir() / "red.png";
  write_rgb_png(p, 1, 1, {255, 0, 0});
  const auto img = lv::load_image(p);
  // round(0.299 * 255) = round(76.245)
  EXPECT_EQ(img(0, 0), 76);
}

TEST(LoadImage, GrayPngIsUnchanged) {
  const auto p = temp_dir() / "gray.png";
  std::vector<unsigned char> rgb;
  for (int v : {0, 17, 128, 255}) rgb.insert(rgb.end(), {static_cast<unsigned char>(v), static_cast<unsigned char>(v),
                                                         static_cast<unsigned char>(v)});
  write_rgb_png(p, 2, 2, rgb);
  const auto img = lv::load_image(p);
  EXPECT_EQ((std::vector<int>{img(0, 0), img(1, 0), img(0, 1), img(1, 1)}), (std::vector<int>{0, 17, 128, 255}));
}

TEST(LoadImage, Errors) {
  const auto dir = temp_dir();
  write_bytes(dir / "empty.pgm", "");
  write_bytes(dir / "short.pgm", "P5\n4 4\n255\nab");
  write_bytes(dir / "weird.bmp", "BM not an image");
  try {
    lv::load_image(dir / "empty.pgm");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::CorruptData);
  }
  try {
    lv::load_image(dir / "short.pgm");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::CorruptData);
  }
  try {
    lv::load_image(dir / "weird.bmp");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::UnsupportedFormat);
  }
  try {
    lv::load_image(dir / "absent.pgm");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::NotFound);
  }
}

TEST(LoadImage, PgmRoundTrip) {
  const auto img = random_image(7, 5, 3);
  const auto p = temp_dir() / "rt.pgm";
  lv::write_pgm(img, p);
  EXPECT_EQ(lv::load_image(p), img);
}

TEST(Resize, SameSizeIsIdentity) {
  const auto img = random_image(40, 40, 11);
  EXPECT_EQ(lv::resize_bilinear(img, 40, 40), img);
}

TEST(Resize, ConstantStaysConstant) {
  const lv::GrayImage img(37, 23, 77);
  for (auto [w, h] : {std::pair{40, 40}, std::pair{5, 90}, std::pair{1, 1}, std::pair{400, 3}}) {
    const auto r = lv::resize_bilinear(img, w, h);
    ASSERT_EQ(r.width(), w);
    ASSERT_EQ(r.height(), h);
    for (auto p : r.pixels()) ASSERT_EQ(p, 77);
  }
}

TEST(Resize, TwoPixelsToFourMatchesHandWeights) {
  // Centres map to -0.25, 0.25, 0.75, 1.25 in source coordinates:
  // 0, 0.25*255 = 63.75, 0.75*255 = 191.25, 255.
  const lv::GrayImage img(2, 1, std::vector<std::uint8_t>{0, 255});
  const auto r = lv::resize_bilinear(img, 4, 1);
  EXPECT_EQ((std::vector<int>{r(0, 0), r(1, 0), r(2, 0), r(3, 0)}), (std::vector<int>{0, 64, 191, 255}));
}

TEST(Resize, ZeroTargetThrows) {
  const lv::GrayImage img(4, 4);
  EXPECT_THROW(lv::resize_bilinear(img, 0, 4), lv::Error);
}

TEST(Resize, UpThenDownStaysClose) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const lv::GrayImage c(9, 6, static_cast<std::uint8_t>(seed * 50));
    const auto back = lv::resize_bilinear(lv::resize_bilinear(c, 18, 12), 9, 6);
    EXPECT_EQ(back, c);
  }
  // Smooth ramps survive the round trip within two levels.
  lv::GrayImage ramp(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) ramp(x, y) = static_cast<std::uint8_t>(10 * x + 3 * y);
  const auto back = lv::resize_bilinear(lv::resize_bilinear(ramp, 40, 20), 20, 10);
  for (int y = 1; y < 9; ++y)
    for (int x = 1; x < 19; ++x) EXPECT_LE(std::abs(back(x, y) - ramp(x, y)), 2) << x << "," << y;
}

TEST(Resize, ShrinkAveragesEveryPixel) {
  // A checkerboard halved must come out flat grey rather than aliasing.
  lv::GrayImage board(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) board(x, y) = (x + y) % 2 ? 255 : 0;
  const auto r = lv::resize_bilinear(board, 20, 20);
  for (int y = 1; y < 19; ++y)
    for (int x = 1; x < 19; ++x) EXPECT_NEAR(r(x, y), 128, 1);
}

TEST(Luma, GrayInputsAreFixedPoints) {
  for (int v = 0; v < 256; ++v) {
    const auto u = static_cast<std::uint8_t>(v);
    EXPECT_EQ(lv::luma_bt601(u, u, u), u);
  }
}

TEST(ToU8, RoundsHalfAwayAndClamps) {
  EXPECT_EQ(lv::to_u8(2.5), 3);
  EXPECT_EQ(lv::to_u8(2.49), 2);
  EXPECT_EQ(lv::to_u8(-3.0), 0);
  EXPECT_EQ(lv::to_u8(300.0), 255);
}
