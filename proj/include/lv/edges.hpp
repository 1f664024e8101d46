#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lv/error.hpp"
#include "lv/feature_vector.hpp"
#include "lv/image.hpp"

namespace lv {

/// Small dense filter kernel with odd side lengths. Weights are row-major.
class Kernel2D {
 public:
  Kernel2D(int rows, int cols, std::vector<double> weights)
      : rows_(rows), cols_(cols), weights_(std::move(weights)) {
    if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
      fail(Errc::InvalidParams, "kernel sides must be odd and positive");
    if (weights_.size() != static_cast<std::size_t>(rows) * cols)
      fail(Errc::InvalidParams, "kernel weight count does not match rows*cols");
  }

  Kernel2D(std::initializer_list<std::initializer_list<double>> rows)
      : Kernel2D(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()), flatten(rows)) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double operator()(int r, int c) const noexcept { return weights_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> weights() const noexcept { return weights_; }

  double sum() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

 private:
  static std::vector<double> flatten(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> out;
    const std::size_t width = rows.begin()->size();
    for (const auto& r : rows) {
      if (r.size() != width) fail(Errc::InvalidParams, "ragged kernel rows");
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  int rows_;
  int cols_;
  std::vector<double> weights_;
};

enum class Border { Replicate, Zero };

/// Same-size 2-D convolution (kernel flipped along both axes).
inline RealImage convolve2d(const RealImage& img, const Kernel2D& k, Border border = Border::Replicate) {
  if (k.rows() > img.height() || k.cols() > img.width())
    fail(Errc::KernelTooLarge, "kernel " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                   " exceeds image " + std::to_string(img.height()) + "x" +
                                   std::to_string(img.width()));
  const int cy = k.rows() / 2, cx = k.cols() / 2;
  const int w = img.width(), h = img.height();
  RealImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int r = 0; r < k.rows(); ++r) {
        const int sy = y - (r - cy);
        for (int c = 0; c < k.cols(); ++c) {
          const int sx = x - (c - cx);
          double v;
          if (sx >= 0 && sx < w && sy >= 0 && sy < h)
            v = img(sx, sy);
          else if (border == Border::Replicate)
            v = img.clamped(sx, sy);
          else
            continue;
          acc += k(r, c) * v;
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

enum class GradientOperator { Prewitt, Roberts, Sobel };

namespace kernels {

inline Kernel2D prewitt_x() { return {{1, 0, -1}, {1, 0, -1}, {1, 0, -1}}; }
inline Kernel2D prewitt_y() { return {{1, 1, 1}, {0, 0, 0}, {-1, -1, -1}}; }
// Axis-aligned 3x3 Roberts masks; the classic diagonal cross is embedded in 3x3 below.
inline Kernel2D roberts_x() { return {{0, 0, 0}, {-1, 1, 0}, {0, 0, 0}}; }
inline Kernel2D roberts_y() { return {{0, 0, 0}, {0, 1, 0}, {0, -1, 0}}; }
inline Kernel2D roberts_classic_x() { return {{0, 0, 0}, {0, 1, 0}, {0, 0, -1}}; }
inline Kernel2D roberts_classic_y() { return {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}}; }
inline Kernel2D sobel_x() { return {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}; }
inline Kernel2D sobel_y() { return {{1, 2, 1}, {0, 0, 0}, {-1, -2, -1}}; }

inline int gaussian_side(double sigma) { return 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1; }

/// Normalised (unit-sum) isotropic Gaussian.
inline Kernel2D gaussian(double sigma) {
  const int side = gaussian_side(sigma), half = side / 2;
  std::vector<double> w(static_cast<std::size_t>(side) * side);
  double total = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const double d2 = static_cast<double>((r - half) * (r - half) + (c - half) * (c - half));
      total += w[r * side + c] = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  for (double& v : w) v /= total;
  return Kernel2D(side, side, std::move(w));
}

/// Laplacian of Gaussian, mean-subtracted so the weights sum to zero.
inline Kernel2D laplacian_of_gaussian(double sigma) {
  const int side = gaussian_side(sigma), half = side / 2;
  const double s2 = sigma * sigma;
  std::vector<double> w(static_cast<std::size_t>(side) * side);
  double total = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const double d2 = static_cast<double>((r - half) * (r - half) + (c - half) * (c - half));
      const double q = d2 / (2.0 * s2);
      total += w[r * side + c] = -1.0 / (std::numbers::pi * s2 * s2) * (1.0 - q) * std::exp(-q);
    }
  const double mean = total / static_cast<double>(w.size());
  for (double& v : w) v -= mean;
  return Kernel2D(side, side, std::move(w));
}

inline Kernel2D box(int side) {
  return Kernel2D(side, side, std::vector<double>(static_cast<std::size_t>(side) * side, 1.0 / (side * side)));
}

}  // namespace kernels

struct GradientField {
  RealImage gx;
  RealImage gy;
  RealImage magnitude;  // rho
  RealImage direction;  // theta, radians in (-pi, pi]
};

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += two_pi;
  while (a > std::numbers::pi) a -= two_pi;
  return a;
}

namespace detail {

inline GradientField gradient_from(const RealImage& img, const Kernel2D& kx, const Kernel2D& ky,
                                   double angle_offset) {
  GradientField g{convolve2d(img, kx), convolve2d(img, ky), RealImage(img.width(), img.height()),
                  RealImage(img.width(), img.height())};
  auto gx = g.gx.values(), gy = g.gy.values();
  auto mag = g.magnitude.values(), dir = g.direction.values();
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    dir[i] = wrap_angle(std::atan2(gy[i], gx[i]) + angle_offset);
  }
  return g;
}

}  // namespace detail

/// Gradient magnitude and direction for one of the three derivative operators.
/// Sobel directions carry the fixed -3*pi/4 offset; all angles are wrapped.
inline GradientField gradient(const GrayImage& img, GradientOperator op, bool roberts_classic = false) {
  if (img.width() < 3 || img.height() < 3) fail(Errc::ImageTooSmall, "gradient needs at least 3x3");
  const RealImage src(img);
  switch (op) {
    case GradientOperator::Prewitt:
      return detail::gradient_from(src, kernels::prewitt_x(), kernels::prewitt_y(), 0.0);
    case GradientOperator::Roberts:
      return roberts_classic
                 ? detail::gradient_from(src, kernels::roberts_classic_x(), kernels::roberts_classic_y(), 0.0)
                 : detail::gradient_from(src, kernels::roberts_x(), kernels::roberts_y(), 0.0);
    case GradientOperator::Sobel:
      return detail::gradient_from(src, kernels::sobel_x(), kernels::sobel_y(), -0.75 * std::numbers::pi);
  }
  fail(Errc::InvalidParams, "unknown gradient operator");
}

enum class EdgeMethod { Prewitt, Roberts, Sobel, Log, Canny, ApproxCanny };

inline constexpr EdgeMethod kAllEdgeMethods[] = {EdgeMethod::Canny,   EdgeMethod::Prewitt, EdgeMethod::Sobel,
                                                 EdgeMethod::Roberts, EdgeMethod::Log,     EdgeMethod::ApproxCanny};

constexpr std::string_view edge_method_name(EdgeMethod m) {
  switch (m) {
    case EdgeMethod::Prewitt: return "prewitt";
    case EdgeMethod::Roberts: return "roberts";
    case EdgeMethod::Sobel: return "sobel";
    case EdgeMethod::Log: return "log";
    case EdgeMethod::Canny: return "canny";
    case EdgeMethod::ApproxCanny: return "approxcanny";
  }
  return "unknown";
}

inline std::optional<EdgeMethod> edge_method_from_name(std::string_view name) {
  for (auto m : kAllEdgeMethods)
    if (edge_method_name(m) == name) return m;
  return std::nullopt;
}

constexpr Descriptor edge_descriptor(EdgeMethod m) {
  switch (m) {
    case EdgeMethod::Prewitt: return Descriptor::EdgePrewitt;
    case EdgeMethod::Roberts: return Descriptor::EdgeRoberts;
    case EdgeMethod::Sobel: return Descriptor::EdgeSobel;
    case EdgeMethod::Log: return Descriptor::EdgeLog;
    case EdgeMethod::Canny: return Descriptor::EdgeCanny;
    case EdgeMethod::ApproxCanny: return Descriptor::EdgeApproxCanny;
  }
  return Descriptor::EdgeCanny;
}

/// Tuning knobs of the six detectors. Unset optionals select the automatic rule.
struct EdgeParams {
  // Prewitt / Roberts / Sobel: threshold on rho, default auto_scale * mean(rho).
  std::optional<double> gradient_threshold;
  double gradient_auto_scale = 4.0;
  bool thinning = true;
  bool roberts_classic = false;

  // LoG: zero crossings whose contrast exceeds the threshold, default log_auto_scale * mean(|response|).
  double log_sigma = 2.0;
  std::optional<double> log_threshold;
  double log_auto_scale = 0.75;

  // Canny: high = percentile of nonzero rho, low = low_ratio * high.
  double canny_sigma = std::numbers::sqrt2;
  double canny_percentile = 0.7;
  double canny_low_ratio = 0.4;

  // ApproxCanny: absolute thresholds on rho of the box-smoothed image.
  double approx_high = 16.0;
  double approx_low = 8.0;

  // Canny / ApproxCanny override: thresholds as fractions of max(rho).
  std::optional<double> high_fraction;
  std::optional<double> low_fraction;

  // Emit the response magnitude instead of the binary map from edge_features.
  bool raw_magnitude = false;

  void validate() const {
    auto frac_ok = [](const std::optional<double>& f) { return !f || (*f >= 0.0 && *f <= 1.0); };
    if (!(log_sigma > 0.0) || !(canny_sigma > 0.0)) fail(Errc::InvalidParams, "sigma must be positive");
    if (!frac_ok(high_fraction) || !frac_ok(low_fraction))
      fail(Errc::InvalidParams, "threshold fractions must lie in [0,1]");
    if (high_fraction && low_fraction && *low_fraction >= *high_fraction)
      fail(Errc::InvalidParams, "low threshold must be below high threshold");
    if (low_fraction && !high_fraction) fail(Errc::InvalidParams, "low fraction given without high fraction");
    if (!(canny_percentile > 0.0 && canny_percentile < 1.0))
      fail(Errc::InvalidParams, "canny percentile must lie in (0,1)");
    if (!(canny_low_ratio > 0.0 && canny_low_ratio < 1.0))
      fail(Errc::InvalidParams, "canny low ratio must lie in (0,1)");
    if (!(approx_low >= 0.0 && approx_low < approx_high))
      fail(Errc::InvalidParams, "approxcanny thresholds need 0 <= low < high");
    if ((gradient_threshold && *gradient_threshold < 0.0) || (log_threshold && *log_threshold < 0.0))
      fail(Errc::InvalidParams, "thresholds must be non-negative");
  }
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  EdgeMap() = default;
  EdgeMap(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t operator()(int x, int y) const noexcept { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& operator()(int x, int y) noexcept { return bits[static_cast<std::size_t>(y) * width + x]; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  GrayImage to_image() const {
    GrayImage img(width, height);
    for (std::size_t i = 0; i < bits.size(); ++i) img.pixels()[i] = bits[i] ? 255 : 0;
    return img;
  }

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;
};

/// Intermediate products of the Canny family, exposed for inspection.
struct CannyStages {
  RealImage magnitude;
  EdgeMap suppressed;  // survivors of non-maximum suppression
  EdgeMap strong;
  EdgeMap weak;
  EdgeMap edges;
  double high = 0.0;
  double low = 0.0;
};

namespace detail {

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double neighbour_or_zero(const RealImage& m, int x, int y) {
  if (x < 0 || y < 0 || x >= m.width() || y >= m.height()) return 0.0;
  return m(x, y);
}

/// Keeps pixels above `t` that are local maxima across the dominant gradient
/// axis. The strict/non-strict pair keeps exactly one pixel of a 2-wide plateau.
inline EdgeMap threshold_and_thin(const GradientField& g, double t, bool thin) {
  const auto& mag = g.magnitude;
  EdgeMap out(mag.width(), mag.height());
  for (int y = 0; y < mag.height(); ++y)
    for (int x = 0; x < mag.width(); ++x) {
      const double m = mag(x, y);
      if (!(m > t)) continue;
      if (thin) {
        const bool horizontal = std::abs(g.gx(x, y)) >= std::abs(g.gy(x, y));
        const int dx = horizontal ? 1 : 0, dy = horizontal ? 0 : 1;
        if (!(neighbour_or_zero(mag, x - dx, y - dy) < m && neighbour_or_zero(mag, x + dx, y + dy) <= m)) continue;
      }
      out(x, y) = 1;
    }
  return out;
}

inline EdgeMap zero_crossings(const RealImage& r, double t) {
  EdgeMap out(r.width(), r.height());
  const int w = r.width(), h = r.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = r(x, y);
      if (v < 0.0) {
        static constexpr int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : nb) {
          const int nx = x + d[0], ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const double u = r(nx, ny);
          if (u > 0.0 && u - v > t) {
            out(x, y) = 1;
            break;
          }
        }
      } else if (v == 0.0 && x > 0 && x + 1 < w && y > 0 && y + 1 < h) {
        const double l = r(x - 1, y), rr = r(x + 1, y), u = r(x, y - 1), d = r(x, y + 1);
        if ((l * rr < 0.0 && std::abs(l - rr) > 2.0 * t) || (u * d < 0.0 && std::abs(u - d) > 2.0 * t))
          out(x, y) = 1;
      }
    }
  return out;
}

/// Four-direction non-maximum suppression on the Sobel gradient.
inline EdgeMap non_maximum_suppression(const GradientField& g) {
  const auto& mag = g.magnitude;
  EdgeMap out(mag.width(), mag.height());
  for (int y = 0; y < mag.height(); ++y)
    for (int x = 0; x < mag.width(); ++x) {
      const double m = mag(x, y);
      if (!(m > 0.0)) continue;
      double deg = std::atan2(g.gy(x, y), g.gx(x, y)) * 180.0 / std::numbers::pi;
      if (deg < 0.0) deg += 180.0;
      int dx, dy;
      if (deg < 22.5 || deg >= 157.5) {
        dx = 1, dy = 0;
      } else if (deg < 67.5) {
        dx = 1, dy = 1;
      } else if (deg < 112.5) {
        dx = 0, dy = 1;
      } else {
        dx = -1, dy = 1;
      }
      if (m > neighbour_or_zero(mag, x - dx, y - dy) && m >= neighbour_or_zero(mag, x + dx, y + dy)) out(x, y) = 1;
    }
  return out;
}

/// Nearest-rank percentile of the strictly positive entries; 0 when none.
inline double positive_percentile(std::span<const double> v, double q) {
  std::vector<double> pos;
  for (double x : v)
    if (x > 0.0) pos.push_back(x);
  if (pos.empty()) return 0.0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(pos.size())));
  rank = std::clamp<std::size_t>(rank, 1, pos.size());
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(rank - 1), pos.end());
  return pos[rank - 1];
}

inline void hysteresis_flood(CannyStages& s) {
  const int w = s.edges.width, h = s.edges.height;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (s.strong(x, y)) {
        s.edges(x, y) = 1;
        queue.emplace_back(x, y);
      }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        if (s.weak(nx, ny) && !s.edges(nx, ny)) {
          s.edges(nx, ny) = 1;
          queue.emplace_back(nx, ny);
        }
      }
  }
}

// One raster pass: a weak pixel survives only if an already-accepted pixel
// touches it at the moment it is visited.
inline void hysteresis_single_pass(CannyStages& s) {
  const int w = s.edges.width, h = s.edges.height;
  s.edges.bits = s.strong.bits;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!s.weak(x, y)) continue;
      bool linked = false;
      for (int dy = -1; dy <= 1 && !linked; ++dy)
        for (int dx = -1; dx <= 1 && !linked; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((dx || dy) && nx >= 0 && ny >= 0 && nx < w && ny < h && s.edges(nx, ny)) linked = true;
        }
      if (linked) s.edges(x, y) = 1;
    }
}

inline RealImage smooth_for_canny(const GrayImage& img, const EdgeParams& p, bool approximate) {
  const RealImage src(img);
  if (approximate) {
    const auto b = kernels::box(3);
    return convolve2d(convolve2d(src, b), b);
  }
  const auto g = kernels::gaussian(p.canny_sigma);
  if (g.rows() > img.height() || g.cols() > img.width())
    fail(Errc::ImageTooSmall, "image smaller than the Canny smoothing kernel");
  return convolve2d(src, g);
}

}  // namespace detail

/// Runs Canny (or the box-filter approximation) and returns every stage.
inline CannyStages canny_stages(const GrayImage& img, const EdgeParams& params, bool approximate) {
  params.validate();
  if (img.width() < 3 || img.height() < 3) fail(Errc::ImageTooSmall, "canny needs at least 3x3");
  const RealImage smooth = detail::smooth_for_canny(img, params, approximate);
  const GradientField g = detail::gradient_from(smooth, kernels::sobel_x(), kernels::sobel_y(), 0.0);

  CannyStages s;
  s.magnitude = g.magnitude;
  s.suppressed = detail::non_maximum_suppression(g);
  const auto mags = g.magnitude.values();
  const double max_rho = mags.empty() ? 0.0 : *std::max_element(mags.begin(), mags.end());
  if (params.high_fraction) {
    s.high = *params.high_fraction * max_rho;
    s.low = params.low_fraction ? *params.low_fraction * max_rho : params.canny_low_ratio * s.high;
  } else if (approximate) {
    s.high = params.approx_high;
    s.low = params.approx_low;
  } else {
    s.high = detail::positive_percentile(mags, params.canny_percentile);
    s.low = params.canny_low_ratio * s.high;
  }

  const int w = img.width(), h = img.height();
  s.strong = EdgeMap(w, h);
  s.weak = EdgeMap(w, h);
  s.edges = EdgeMap(w, h);
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (!s.suppressed.bits[i]) continue;
    if (mags[i] > s.high)
      s.strong.bits[i] = 1;
    else if (mags[i] > s.low)
      s.weak.bits[i] = 1;
  }
  if (approximate)
    detail::hysteresis_single_pass(s);
  else
    detail::hysteresis_flood(s);
  return s;
}

/// Filtered LoG response (before zero-crossing detection).
inline RealImage log_response(const GrayImage& img, double sigma) {
  const auto k = kernels::laplacian_of_gaussian(sigma);
  if (k.rows() > img.height() || k.cols() > img.width())
    fail(Errc::ImageTooSmall, "image smaller than the LoG kernel");
  return convolve2d(RealImage(img), k);
}

/// Binary edge map for any of the six detectors.
inline EdgeMap detect_edges(const GrayImage& img, EdgeMethod method, const EdgeParams& params = {}) {
  params.validate();
  if (img.width() < 3 || img.height() < 3) fail(Errc::ImageTooSmall, "edge detection needs at least 3x3");
  switch (method) {
    case EdgeMethod::Prewitt:
    case EdgeMethod::Roberts:
    case EdgeMethod::Sobel: {
      const auto op = method == EdgeMethod::Prewitt   ? GradientOperator::Prewitt
                      : method == EdgeMethod::Roberts ? GradientOperator::Roberts
                                                      : GradientOperator::Sobel;
      const auto g = gradient(img, op, params.roberts_classic);
      const double t = params.gradient_threshold.value_or(params.gradient_auto_scale *
                                                          detail::mean_of(g.magnitude.values()));
      return detail::threshold_and_thin(g, t, params.thinning);
    }
    case EdgeMethod::Log: {
      const auto r = log_response(img, params.log_sigma);
      double t;
      if (params.log_threshold) {
        t = *params.log_threshold;
      } else {
        double s = 0.0;
        for (double v : r.values()) s += std::abs(v);
        t = params.log_auto_scale * s / static_cast<double>(r.size());
      }
      return detail::zero_crossings(r, t);
    }
    case EdgeMethod::Canny: return canny_stages(img, params, false).edges;
    case EdgeMethod::ApproxCanny: return canny_stages(img, params, true).edges;
  }
  fail(Errc::InvalidParams, "unknown edge method");
}

/// Response magnitude underlying each detector, used when `raw_magnitude` is set.
inline RealImage edge_response(const GrayImage& img, EdgeMethod method, const EdgeParams& params) {
  switch (method) {
    case EdgeMethod::Prewitt: return gradient(img, GradientOperator::Prewitt).magnitude;
    case EdgeMethod::Roberts: return gradient(img, GradientOperator::Roberts, params.roberts_classic).magnitude;
    case EdgeMethod::Sobel: return gradient(img, GradientOperator::Sobel).magnitude;
    case EdgeMethod::Log: {
      auto r = log_response(img, params.log_sigma);
      for (double& v : r.values()) v = std::abs(v);
      return r;
    }
    case EdgeMethod::Canny: return canny_stages(img, params, false).magnitude;
    case EdgeMethod::ApproxCanny: return canny_stages(img, params, true).magnitude;
  }
  fail(Errc::InvalidParams, "unknown edge method");
}

inline FeatureVector flatten(const EdgeMap& map, Descriptor tag) {
  FeatureVector fv{tag, std::vector<double>(map.bits.size())};
  for (std::size_t i = 0; i < map.bits.size(); ++i) fv.values[i] = map.bits[i] ? 1.0 : 0.0;
  return fv;
}

/// Row-major flattening of the edge map (or of the raw response magnitude).
inline FeatureVector edge_features(const GrayImage& img, EdgeMethod method, const EdgeParams& params = {}) {
  if (params.raw_magnitude) {
    params.validate();
    auto r = edge_response(img, method, params);
    return FeatureVector{edge_descriptor(method), {r.values().begin(), r.values().end()}};
  }
  return flatten(detect_edges(img, method, params), edge_descriptor(method));
}

}  // namespace lv
