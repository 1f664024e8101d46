#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "lv/error.hpp"
#include "lv/feature_vector.hpp"
#include "lv/image.hpp"

namespace lv {

struct CellGrid {
  int cell_w = 0;
  int cell_h = 0;
  int n_cells_x = 0;
  int n_cells_y = 0;

  static CellGrid covering(int img_w, int img_h, int cell) {
    if (cell < 1) fail(Errc::InvalidParams, "cell size must be positive");
    CellGrid g{cell, cell, img_w / cell, img_h / cell};
    if (g.n_cells_x < 1 || g.n_cells_y < 1)
      fail(Errc::IndivisibleCellSize, "cell " + std::to_string(cell) + " larger than image");
    return g;
  }
};

/// Intensity histogram: 256 raw counts.
inline FeatureVector hpiv(const GrayImage& img) {
  FeatureVector fv{Descriptor::Hpiv, std::vector<double>(256, 0.0)};
  for (auto p : img.pixels()) fv.values[p] += 1.0;
  return fv;
}

struct HogParams {
  int cell = 8;
  int block = 2;  // cells per block side, stride one cell
  double epsilon = 1e-5;
};

/// Dalal-Triggs style HOG: centred [-1 0 1] gradients, 9 unsigned bins at
/// 0,20,...,160 degrees with linear vote splitting, 2x2-cell blocks with
/// one-cell stride, each block L2-normalised.
inline FeatureVector hog(const GrayImage& img, const HogParams& params) {
  const int cell = params.cell;
  if (cell < 1) fail(Errc::InvalidParams, "cell size must be positive");
  if (img.width() % cell != 0 || img.height() % cell != 0)
    fail(Errc::IndivisibleCellSize, "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                        " not divisible by cell " + std::to_string(cell));
  constexpr int kBins = 9;
  const int ncx = img.width() / cell, ncy = img.height() / cell;
  const int nbx = ncx - params.block + 1, nby = ncy - params.block + 1;
  if (nbx < 1 || nby < 1) fail(Errc::IndivisibleCellSize, "image holds fewer cells than one block");

  std::vector<double> cells(static_cast<std::size_t>(ncx) * ncy * kBins, 0.0);
  const int w = img.width(), h = img.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = static_cast<double>(img(std::min(x + 1, w - 1), y)) - img(std::max(x - 1, 0), y);
      const double gy = static_cast<double>(img(x, std::min(y + 1, h - 1))) - img(x, std::max(y - 1, 0));
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      deg = std::fmod(deg + 180.0, 180.0);
      const double pos = deg / 20.0;
      const int lo = static_cast<int>(std::floor(pos)) % kBins;
      const int hi = (lo + 1) % kBins;
      const double frac = pos - std::floor(pos);
      double* bins = &cells[(static_cast<std::size_t>(y / cell) * ncx + x / cell) * kBins];
      bins[lo] += mag * (1.0 - frac);
      bins[hi] += mag * frac;
    }

  const int block_len = params.block * params.block * kBins;
  FeatureVector fv{params.cell == 10 ? Descriptor::Hog10 : Descriptor::Hog8, {}};
  fv.values.reserve(static_cast<std::size_t>(nbx) * nby * block_len);
  std::vector<double> block(static_cast<std::size_t>(block_len));
  const double eps2 = params.epsilon * params.epsilon;
  for (int by = 0; by < nby; ++by)
    for (int bx = 0; bx < nbx; ++bx) {
      std::size_t k = 0;
      for (int cy = 0; cy < params.block; ++cy)
        for (int cx = 0; cx < params.block; ++cx) {
          const double* bins = &cells[(static_cast<std::size_t>(by + cy) * ncx + bx + cx) * kBins];
          for (int b = 0; b < kBins; ++b) block[k++] = bins[b];
        }
      double ss = 0.0;
      for (double v : block) ss += v * v;
      const double norm = std::sqrt(ss + eps2);
      for (double v : block) fv.values.push_back(v / norm);
    }
  return fv;
}

inline FeatureVector hog(const GrayImage& img, int cell) { return hog(img, HogParams{cell}); }

struct LbpParams {
  int cell = 8;
  // false: bit set iff centre > neighbour. true: textbook neighbour >= centre.
  bool classic_sign = false;
};

/// Neighbour offsets (dx, dy) with y pointing down: start at the right-hand
/// neighbour and walk counter-clockwise as seen on screen. Bit p has weight 2^p.
inline constexpr std::array<std::array<int, 2>, 8> kLbpNeighbours = {{
    {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

constexpr int circular_transitions(std::uint8_t code) {
  const auto rotated = static_cast<std::uint8_t>((code >> 1) | (code << 7));
  return std::popcount(static_cast<unsigned>(code ^ rotated));
}

constexpr bool is_uniform_pattern(std::uint8_t code) { return circular_transitions(code) <= 2; }

/// Maps an 8-bit code to one of 59 bins: uniform patterns in ascending code
/// order take bins 0..57, every other code shares bin 58.
inline const std::array<std::uint8_t, 256>& uniform_lbp_table() {
  static const auto table = [] {
    std::array<std::uint8_t, 256> t{};
    std::uint8_t next = 0;
    for (int c = 0; c < 256; ++c) t[c] = is_uniform_pattern(static_cast<std::uint8_t>(c)) ? next++ : 58;
    return t;
  }();
  return table;
}

inline std::uint8_t lbp_code(const GrayImage& img, int x, int y, bool classic_sign = false) {
  const int gc = img(x, y);
  unsigned code = 0;
  for (std::size_t p = 0; p < kLbpNeighbours.size(); ++p) {
    const int nx = std::clamp(x + kLbpNeighbours[p][0], 0, img.width() - 1);
    const int ny = std::clamp(y + kLbpNeighbours[p][1], 0, img.height() - 1);
    const int gp = img(nx, ny);
    const bool bit = classic_sign ? gp - gc >= 0 : gc - gp > 0;
    if (bit) code |= 1u << p;
  }
  return static_cast<std::uint8_t>(code);
}

/// Uniform LBP(8,1) cell histograms, each L2-normalised, concatenated row-major.
/// Cells tile the image from the top-left; partial cells at the right and
/// bottom margins are ignored. Border pixels compare against replicated edges.
inline FeatureVector lbp(const GrayImage& img, const LbpParams& params) {
  const auto grid = CellGrid::covering(img.width(), img.height(), params.cell);
  constexpr int kBins = 59;
  const auto& table = uniform_lbp_table();
  Descriptor tag = Descriptor::Lbp8;
  if (params.cell == 16) tag = Descriptor::Lbp16;
  if (params.cell == 32) tag = Descriptor::Lbp32;
  FeatureVector fv{tag, std::vector<double>(static_cast<std::size_t>(grid.n_cells_x) * grid.n_cells_y * kBins, 0.0)};
  for (int cy = 0; cy < grid.n_cells_y; ++cy)
    for (int cx = 0; cx < grid.n_cells_x; ++cx) {
      double* hist = &fv.values[(static_cast<std::size_t>(cy) * grid.n_cells_x + cx) * kBins];
      for (int y = cy * grid.cell_h; y < (cy + 1) * grid.cell_h; ++y)
        for (int x = cx * grid.cell_w; x < (cx + 1) * grid.cell_w; ++x)
          hist[table[lbp_code(img, x, y, params.classic_sign)]] += 1.0;
      double ss = 0.0;
      for (int b = 0; b < kBins; ++b) ss += hist[b] * hist[b];
      const double norm = std::sqrt(ss);
      for (int b = 0; b < kBins; ++b) hist[b] /= norm;
    }
  return fv;
}

inline FeatureVector lbp(const GrayImage& img, int cell) { return lbp(img, LbpParams{cell}); }

}  // namespace lv
