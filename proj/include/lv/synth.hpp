#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lv/error.hpp"
#include "lv/image.hpp"
#include "lv/io.hpp"
#include "lv/rng.hpp"

namespace lv {

/// Five-number summary plus mean and standard deviation of one measurement.
struct SizeSummary {
  double min, q1, median, q3, max, mean, std;

  std::array<double, 5> knots() const { return {min, q1, median, q3, max}; }

  bool ordered() const { return min <= q1 && q1 <= median && median <= q3 && q3 <= max; }
};

/// Tick-bite defect size statistics in pixels at the native patch resolution.
/// Defaults are the measured bounding-box extents of the reference dataset.
struct DefectStats {
  SizeSummary x{6, 16, 20, 26, 65, 21.56, 8.22};
  SizeSummary y{5, 16, 20, 25, 71, 20.86, 7.58};
  SizeSummary area{30, 272, 396, 575, 3195, 480.44, 347.29};

  void validate() const {
    if (!x.ordered() || !y.ordered() || !area.ordered())
      fail(Errc::InvalidParams, "defect statistics must satisfy min <= q1 <= median <= q3 <= max");
    if (x.min <= 0 || y.min <= 0) fail(Errc::InvalidParams, "defect extents must be positive");
  }

  /// Parses `key=value` lines such as `x.q1=16` or `area.max=3195`. Unknown keys are rejected.
  static DefectStats parse(std::string_view text) { return parse(text, DefectStats{}); }

  static DefectStats parse(std::string_view text, DefectStats base) {
    std::map<std::string, double*> slots;
    for (auto [prefix, s] : {std::pair{"x", &base.x}, std::pair{"y", &base.y}, std::pair{"area", &base.area}}) {
      const std::string p = prefix;
      slots[p + ".min"] = &s->min;
      slots[p + ".q1"] = &s->q1;
      slots[p + ".median"] = &s->median;
      slots[p + ".q3"] = &s->q3;
      slots[p + ".max"] = &s->max;
      slots[p + ".mean"] = &s->mean;
      slots[p + ".std"] = &s->std;
    }
    for (auto line : split(text, '\n')) {
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const auto hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(Errc::InvalidParams, "expected key=value: " + std::string(line));
      std::string key(line.substr(0, eq));
      key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return c == ' ' || c == '\t'; }), key.end());
      const auto it = slots.find(key);
      if (it == slots.end()) fail(Errc::InvalidParams, "unknown statistics key: " + key);
      *it->second = parse_double(line.substr(eq + 1));
    }
    base.validate();
    return base;
  }
};

/// Native-resolution pixel pitch of the reference acquisition rig, in millimetres.
inline constexpr double kMillimetresPerPixel = 0.0375;

inline double area_mm2(double area_px) { return area_px * kMillimetresPerPixel * kMillimetresPerPixel; }

struct GeneratorParams {
  int size = 400;
  double background_mean = 140.0;
  double background_std = 12.0;
  double blur_sigma = 1.5;
  int lattice = 2;  // coarse octave spacing in pixels; the fine octave uses half
  double dip_min = 30.0;
  double dip_max = 60.0;
  int min_blobs = 1;
  int max_blobs = 3;
  double latent_weight = 0.7;
  double core = 0.6;  // normalised radius up to which a blob has its full dip
};

struct BlobExtent {
  double x;
  double y;
};

struct Blob {
  double cx, cy;
  BlobExtent extent;
  double dip;
};

struct Patch {
  GrayImage image;
  int label = 0;
  std::vector<Blob> blobs;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Inverse CDF of the piecewise-uniform distribution through the five knots:
// each inter-quartile segment receives exactly a quarter of the mass.
inline double piecewise_uniform(const SizeSummary& s, double u) {
  const auto k = s.knots();
  const double pos = std::clamp(u, 0.0, 1.0) * 4.0;
  const int seg = std::min(3, static_cast<int>(std::floor(pos)));
  const double t = pos - seg;
  return k[seg] + t * (k[seg + 1] - k[seg]);
}

inline std::vector<double> gaussian_taps(double sigma) {
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> t(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) sum += t[i + half] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (double& v : t) v /= sum;
  return t;
}

inline void blur_separable(std::vector<double>& img, int size, double sigma) {
  if (sigma <= 0.0) return;
  const auto taps = gaussian_taps(sigma);
  const int half = static_cast<int>(taps.size() / 2);
  std::vector<double> tmp(img.size());
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += taps[k + half] * img[y * size + std::clamp(x + k, 0, size - 1)];
      tmp[y * size + x] = acc;
    }
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += taps[k + half] * tmp[std::clamp(y + k, 0, size - 1) * size + x];
      img[y * size + x] = acc;
    }
}

// Bilinearly interpolated lattice noise with the given spacing.
inline void add_value_noise(std::vector<double>& img, int size, int spacing, double amplitude, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int cells = size / spacing + 2;
  std::vector<double> lattice(static_cast<std::size_t>(cells) * cells);
  for (double& v : lattice) v = normal(rng);
  for (int y = 0; y < size; ++y) {
    const double fy = static_cast<double>(y) / spacing;
    const int iy = static_cast<int>(fy);
    const double ty = fy - iy;
    for (int x = 0; x < size; ++x) {
      const double fx = static_cast<double>(x) / spacing;
      const int ix = static_cast<int>(fx);
      const double tx = fx - ix;
      const double a = lattice[iy * cells + ix], b = lattice[iy * cells + ix + 1];
      const double c = lattice[(iy + 1) * cells + ix], d = lattice[(iy + 1) * cells + ix + 1];
      img[y * size + x] += amplitude * ((a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty);
    }
  }
}

inline double smoothstep(double e0, double e1, double v) {
  const double t = std::clamp((v - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace detail

/// Draws one blob bounding box. x and y are coupled through a shared latent
/// normal factor (Gaussian copula) so each marginal stays exactly
/// piecewise-uniform between the five knots. Draws whose box area exceeds
/// `stats.area.max` are rejected.
inline BlobExtent sample_extent(Rng& rng, const DefectStats& stats, double latent_weight = 0.7) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w = latent_weight, rest = std::sqrt(1.0 - w * w);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double shared = normal(rng);
    const double zx = w * shared + rest * normal(rng);
    const double zy = w * shared + rest * normal(rng);
    BlobExtent e{detail::piecewise_uniform(stats.x, detail::normal_cdf(zx)),
                 detail::piecewise_uniform(stats.y, detail::normal_cdf(zy))};
    if (e.x * e.y <= stats.area.max && e.x * e.y >= stats.area.min) return e;
  }
  fail(Errc::InvalidParams, "defect statistics admit no extent within the area bounds");
}

/// Leather-like background texture plus, for defective patches, one to three
/// soft-edged dark elliptical blobs.
inline Patch gen_patch(Rng& rng, bool defect, const DefectStats& stats = {}, const GeneratorParams& p = {}) {
  stats.validate();
  if (p.size < 1) fail(Errc::ZeroDimension, "patch size must be positive");
  if (p.size < stats.x.max || p.size < stats.y.max)
    fail(Errc::DefectTooLargeForPatch, "patch " + std::to_string(p.size) + " smaller than maximum defect extent");

  const int n = p.size;
  std::vector<double> tex(static_cast<std::size_t>(n) * n, 0.0);
  detail::add_value_noise(tex, n, std::max(1, p.lattice), 1.0, rng);
  detail::add_value_noise(tex, n, std::max(1, p.lattice / 2), 0.5, rng);
  // Mean and std describe the raw noise; the blur then softens it into grain.
  const double mean = std::accumulate(tex.begin(), tex.end(), 0.0) / static_cast<double>(tex.size());
  double var = 0.0;
  for (double v : tex) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(tex.size()));
  for (double& v : tex) v = p.background_mean + p.background_std * (v - mean) / (sd > 0 ? sd : 1.0);
  detail::blur_separable(tex, n, p.blur_sigma);

  Patch patch;
  patch.label = defect ? 1 : 0;
  if (defect) {
    std::uniform_int_distribution<int> count(p.min_blobs, p.max_blobs);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int blobs = count(rng);
    for (int b = 0; b < blobs; ++b) {
      const auto e = sample_extent(rng, stats, p.latent_weight);
      Blob blob{e.x / 2 + unit(rng) * (n - e.x), e.y / 2 + unit(rng) * (n - e.y), e,
                p.dip_min + unit(rng) * (p.dip_max - p.dip_min)};
      const double ax = e.x / 2, ay = e.y / 2;
      const int x0 = std::max(0, static_cast<int>(std::floor(blob.cx - ax)));
      const int x1 = std::min(n - 1, static_cast<int>(std::ceil(blob.cx + ax)));
      const int y0 = std::max(0, static_cast<int>(std::floor(blob.cy - ay)));
      const int y1 = std::min(n - 1, static_cast<int>(std::ceil(blob.cy + ay)));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const double dx = (x + 0.5 - blob.cx) / ax, dy = (y + 0.5 - blob.cy) / ay;
          const double r = std::sqrt(dx * dx + dy * dy);
          const double weight = 1.0 - detail::smoothstep(p.core, 1.0, r);
          tex[y * n + x] -= blob.dip * weight;
        }
      patch.blobs.push_back(blob);
    }
  }

  patch.image = GrayImage(n, n);
  for (std::size_t i = 0; i < tex.size(); ++i) patch.image.pixels()[i] = to_u8(tex[i]);
  return patch;
}

/// Which indices of an n-patch set carry a defect: exactly round(n * fraction), seeded.
inline std::vector<int> defect_assignment(std::uint64_t seed, std::size_t n, double defect_fraction) {
  if (n < 2) fail(Errc::InvalidParams, "need at least two patches");
  if (!(defect_fraction > 0.0 && defect_fraction < 1.0))
    fail(Errc::InvalidParams, "defect fraction must lie in (0,1)");
  const auto n_defect = static_cast<std::size_t>(std::llround(static_cast<double>(n) * defect_fraction));
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_defect), 1);
  Rng rng(derive_seed(seed, "defect-assignment"));
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

/// In-memory generation; patch i depends only on (seed, i) and its label.
inline std::vector<Patch> gen_patches(std::uint64_t seed, std::size_t n, double defect_fraction,
                                      const DefectStats& stats = {}, const GeneratorParams& params = {}) {
  const auto labels = defect_assignment(seed, n, defect_fraction);
  std::vector<Patch> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out.push_back(gen_patch(rng, labels[i] == 1, stats, params));
  }
  return out;
}

struct ManifestEntry {
  std::filesystem::path path;
  int label = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
};

inline std::string patch_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "patch_%05zu.pgm", i);
  return buf;
}

/// Writes n PGM patches and `manifest.csv` (header `path,label`, paths relative
/// to the manifest) into `out_dir`. Returns the manifest with absolute paths.
inline Manifest gen_dataset(std::uint64_t seed, std::size_t n, double defect_fraction,
                            const std::filesystem::path& out_dir, const DefectStats& stats = {},
                            const GeneratorParams& params = {}) {
  const auto labels = defect_assignment(seed, n, defect_fraction);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  Manifest m;
  std::string csv = "path,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto patch = gen_patch(rng, labels[i] == 1, stats, params);
    const auto name = patch_file_name(i);
    write_file_atomic(out_dir / name, encode_pgm(patch.image));
    csv += name + "," + std::to_string(patch.label) + "\n";
    m.entries.push_back({out_dir / name, patch.label});
  }
  write_file_atomic(out_dir / "manifest.csv", csv);
  return m;
}

/// Parses and validates a manifest: labels in {0,1}, unique paths, every file present.
/// Relative paths resolve against the manifest's directory.
inline Manifest read_manifest(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "path,label") fail(Errc::BadManifest, "manifest header must be 'path,label'");
  const auto base = path.parent_path();
  Manifest m;
  std::set<std::filesystem::path> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto comma = lines[i].rfind(',');
    if (comma == std::string::npos) fail(Errc::BadManifest, "line " + std::to_string(i + 1) + ": expected path,label");
    std::filesystem::path p = lines[i].substr(0, comma);
    const std::string label = lines[i].substr(comma + 1);
    if (label != "0" && label != "1") fail(Errc::BadLabel, "line " + std::to_string(i + 1) + ": label '" + label + "'");
    if (p.is_relative()) p = base / p;
    p = p.lexically_normal();
    if (!seen.insert(p).second) fail(Errc::BadManifest, "duplicate path " + p.string());
    if (!std::filesystem::exists(p)) fail(Errc::MissingFile, p.string());
    m.entries.push_back({p, label == "1" ? 1 : 0});
  }
  return m;
}

struct LoadedImages {
  std::vector<GrayImage> images;
  std::vector<int> labels;
  std::vector<std::string> ids;
};

inline LoadedImages load_manifest(const std::filesystem::path& path) {
  const auto m = read_manifest(path);
  LoadedImages out;
  for (const auto& e : m.entries) {
    out.images.push_back(load_image(e.path));
    out.labels.push_back(e.label);
    out.ids.push_back(e.path.filename().string());
  }
  return out;
}

}  // namespace lv
