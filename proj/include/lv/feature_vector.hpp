#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lv/error.hpp"

namespace lv {

/// Descriptor tags. Numeric values are the on-disk codes of the binary
/// feature-matrix format and must not change.
enum class Descriptor : std::uint32_t {
  Hpiv = 1,
  Hog8 = 2,
  Hog10 = 3,
  Lbp8 = 4,
  Lbp16 = 5,
  Lbp32 = 6,
  EdgePrewitt = 16,
  EdgeRoberts = 17,
  EdgeSobel = 18,
  EdgeLog = 19,
  EdgeCanny = 20,
  EdgeApproxCanny = 21,
};

inline constexpr Descriptor kAllDescriptors[] = {
    Descriptor::Hpiv,        Descriptor::Hog8,        Descriptor::Hog10,     Descriptor::Lbp8,
    Descriptor::Lbp16,       Descriptor::Lbp32,       Descriptor::EdgePrewitt, Descriptor::EdgeRoberts,
    Descriptor::EdgeSobel,   Descriptor::EdgeLog,     Descriptor::EdgeCanny, Descriptor::EdgeApproxCanny,
};

constexpr std::string_view descriptor_name(Descriptor d) {
  switch (d) {
    case Descriptor::Hpiv: return "hpiv";
    case Descriptor::Hog8: return "hog8";
    case Descriptor::Hog10: return "hog10";
    case Descriptor::Lbp8: return "lbp8";
    case Descriptor::Lbp16: return "lbp16";
    case Descriptor::Lbp32: return "lbp32";
    case Descriptor::EdgePrewitt: return "edge-prewitt";
    case Descriptor::EdgeRoberts: return "edge-roberts";
    case Descriptor::EdgeSobel: return "edge-sobel";
    case Descriptor::EdgeLog: return "edge-log";
    case Descriptor::EdgeCanny: return "edge-canny";
    case Descriptor::EdgeApproxCanny: return "edge-approxcanny";
  }
  return "unknown";
}

inline std::optional<Descriptor> descriptor_from_code(std::uint32_t code) {
  for (auto d : kAllDescriptors)
    if (static_cast<std::uint32_t>(d) == code) return d;
  return std::nullopt;
}

inline std::optional<Descriptor> descriptor_from_name(std::string_view name) {
  for (auto d : kAllDescriptors)
    if (descriptor_name(d) == name) return d;
  return std::nullopt;
}

constexpr bool is_edge_descriptor(Descriptor d) {
  return static_cast<std::uint32_t>(d) >= static_cast<std::uint32_t>(Descriptor::EdgePrewitt);
}

/// Feature length produced for a `width` x `height` input.
inline std::size_t descriptor_length(Descriptor d, int width, int height) {
  auto hog = [&](int cell) {
    const int bx = width / cell - 1, by = height / cell - 1;
    return bx > 0 && by > 0 ? static_cast<std::size_t>(bx) * by * 36 : 0;
  };
  auto lbp = [&](int cell) { return static_cast<std::size_t>(width / cell) * (height / cell) * 59; };
  switch (d) {
    case Descriptor::Hpiv: return 256;
    case Descriptor::Hog8: return hog(8);
    case Descriptor::Hog10: return hog(10);
    case Descriptor::Lbp8: return lbp(8);
    case Descriptor::Lbp16: return lbp(16);
    case Descriptor::Lbp32: return lbp(32);
    default: return static_cast<std::size_t>(width) * height;
  }
}

struct FeatureVector {
  Descriptor descriptor = Descriptor::Hpiv;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  bool all_finite() const noexcept {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace lv
