#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lv/error.hpp"

namespace lv {

/// 8-bit single-channel image, row-major.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) fail(Errc::ZeroDimension, "image dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  GrayImage(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) fail(Errc::ZeroDimension, "image dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width) * height)
      fail(Errc::DimensionMismatch, "pixel buffer length does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Real-valued image used for filter responses and gradient components.
class RealImage {
 public:
  RealImage() = default;

  RealImage(int width, int height, double fill = 0.0) : width_(width), height_(height) {
    if (width < 1 || height < 1) fail(Errc::ZeroDimension, "image dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  RealImage(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) fail(Errc::ZeroDimension, "image dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width) * height)
      fail(Errc::DimensionMismatch, "sample buffer length does not match width*height");
  }

  explicit RealImage(const GrayImage& img) : RealImage(img.width(), img.height()) {
    std::copy(img.pixels().begin(), img.pixels().end(), data_.begin());
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  // Clamped access (replicate border).
  double clamped(int x, int y) const noexcept {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
  }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Rounds half away from zero and clamps into [0, 255].
inline std::uint8_t to_u8(double v) noexcept {
  const double r = std::round(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// ITU-R BT.601 luma in exact integer arithmetic, rounded to nearest.
constexpr std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) fail(Errc::NotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::NotFound, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmCursor {
 public:
  explicit PgmCursor(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) fail(Errc::CorruptData, "truncated PGM header");
    if (!std::isdigit(bytes_[pos_])) fail(Errc::CorruptData, "expected integer in PGM");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) fail(Errc::CorruptData, "PGM integer out of range");
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

inline GrayImage decode_pgm(std::span<const unsigned char> bytes) {
  const bool binary = bytes[1] == '5';
  PgmCursor cur(bytes);
  cur.advance(2);
  const long w = cur.read_uint();
  const long h = cur.read_uint();
  const long maxval = cur.read_uint();
  if (w < 1 || h < 1) fail(Errc::CorruptData, "PGM with zero dimension");
  if (maxval < 1) fail(Errc::CorruptData, "PGM maxval must be positive");
  if (maxval > 255) fail(Errc::UnsupportedFormat, "16-bit PGM is not supported");
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> data(n);
  auto rescale = [maxval](long v) -> std::uint8_t {
    if (v > maxval) fail(Errc::CorruptData, "PGM sample exceeds maxval");
    if (maxval == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    cur.advance(1);
    if (cur.pos() + n > bytes.size()) fail(Errc::CorruptData, "truncated PGM raster");
    for (std::size_t i = 0; i < n; ++i) data[i] = rescale(bytes[cur.pos() + i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = rescale(cur.read_uint());
  }
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

inline GrayImage decode_png(std::span<const unsigned char> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(Errc::CorruptData, std::string("PNG header: ") + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(Errc::CorruptData, "PNG payload: " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < gray.size(); ++i)
    gray[i] = luma_bt601(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  return GrayImage(w, h, std::move(gray));
}

}  // namespace detail

/// Reads a PGM (P2/P5) or PNG file. Colour inputs are reduced to BT.601 luma.
inline GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() < 2) fail(Errc::CorruptData, "file too short: " + path.string());
  if (bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return detail::decode_pgm(bytes);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin()))
    return detail::decode_png(bytes);
  if (bytes.size() < 8 && bytes[0] == 0x89) fail(Errc::CorruptData, "truncated PNG signature");
  fail(Errc::UnsupportedFormat, path.string());
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels().data()), img.size());
  return out;
}

inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot open for writing: " + path.string());
  const auto bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::IoError, "write failed: " + path.string());
}

/// Bilinear resampling with pixel-centre alignment. When shrinking, the
/// triangle kernel is widened by the scale factor so every source pixel
/// contributes (antialiasing). Same-size resizing is the identity.
inline GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) fail(Errc::ZeroDimension, "resize target must be >= 1x1");
  if (img.empty()) fail(Errc::ZeroDimension, "resize of empty image");
  if (out_w == img.width() && out_h == img.height()) return img;

  struct Taps {
    int first = 0;
    std::vector<double> weights;
  };
  auto taps = [](int in, int out) {
    std::vector<Taps> t(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    const double support = std::max(1.0, scale);
    for (int o = 0; o < out; ++o) {
      const double centre = (o + 0.5) * scale - 0.5;
      const int lo = std::max(0, static_cast<int>(std::floor(centre - support)) + 1);
      const int hi = std::min(in - 1, static_cast<int>(std::ceil(centre + support)) - 1);
      auto& tap = t[o];
      double total = 0.0;
      for (int i = lo; i <= hi; ++i) {
        const double w = std::max(0.0, 1.0 - std::abs(i - centre) / support);
        tap.weights.push_back(w);
        total += w;
      }
      tap.first = lo;
      if (total <= 0.0) {
        // Centre beyond the outermost pixel: replicate it.
        tap.first = std::clamp(static_cast<int>(std::lround(centre)), 0, in - 1);
        tap.weights.assign(1, 1.0);
        continue;
      }
      // Trim zero-weight ends so the first tap carries weight.
      while (!tap.weights.empty() && tap.weights.front() == 0.0) {
        tap.weights.erase(tap.weights.begin());
        ++tap.first;
      }
      for (double& w : tap.weights) w /= total;
    }
    return t;
  };
  const auto tx = taps(img.width(), out_w);
  const auto ty = taps(img.height(), out_h);

  std::vector<double> rows(static_cast<std::size_t>(out_w) * img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < tx[x].weights.size(); ++k) acc += tx[x].weights[k] * img(tx[x].first + static_cast<int>(k), y);
      rows[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < ty[y].weights.size(); ++k)
        acc += ty[y].weights[k] * rows[static_cast<std::size_t>(ty[y].first + static_cast<int>(k)) * out_w + x];
      out(x, y) = to_u8(acc);
    }
  return out;
}

}  // namespace lv
