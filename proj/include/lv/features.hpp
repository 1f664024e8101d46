#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/edges.hpp"
#include "lv/error.hpp"
#include "lv/feature_vector.hpp"
#include "lv/image.hpp"
#include "lv/io.hpp"
#include "lv/stat_features.hpp"

namespace lv {

/// One descriptor configuration, applied after resizing every image to
/// `resize` x `resize` (0 keeps the native size).
struct DescriptorSpec {
  Descriptor descriptor = Descriptor::EdgeApproxCanny;
  EdgeParams edge;
  bool lbp_classic_sign = false;
  int resize = 40;
};

inline EdgeMethod edge_method_of(Descriptor d) {
  switch (d) {
    case Descriptor::EdgePrewitt: return EdgeMethod::Prewitt;
    case Descriptor::EdgeRoberts: return EdgeMethod::Roberts;
    case Descriptor::EdgeSobel: return EdgeMethod::Sobel;
    case Descriptor::EdgeLog: return EdgeMethod::Log;
    case Descriptor::EdgeCanny: return EdgeMethod::Canny;
    case Descriptor::EdgeApproxCanny: return EdgeMethod::ApproxCanny;
    default: fail(Errc::InvalidParams, "not an edge descriptor: " + std::string(descriptor_name(d)));
  }
}

inline GrayImage prepare(const GrayImage& img, int resize) {
  return resize > 0 ? resize_bilinear(img, resize, resize) : img;
}

inline FeatureVector extract_prepared(const GrayImage& img, const DescriptorSpec& spec) {
  switch (spec.descriptor) {
    case Descriptor::Hpiv: return hpiv(img);
    case Descriptor::Hog8: return hog(img, 8);
    case Descriptor::Hog10: return hog(img, 10);
    case Descriptor::Lbp8: return lbp(img, LbpParams{8, spec.lbp_classic_sign});
    case Descriptor::Lbp16: return lbp(img, LbpParams{16, spec.lbp_classic_sign});
    case Descriptor::Lbp32: return lbp(img, LbpParams{32, spec.lbp_classic_sign});
    default: return edge_features(img, edge_method_of(spec.descriptor), spec.edge);
  }
}

inline FeatureVector extract(const GrayImage& img, const DescriptorSpec& spec) {
  return extract_prepared(prepare(img, spec.resize), spec);
}

/// Stacks one descriptor per image into a dataset. Images are resized first.
inline Dataset build_dataset(std::span<const GrayImage> images, std::span<const int> labels,
                             std::span<const std::string> ids, const DescriptorSpec& spec) {
  if (images.empty()) fail(Errc::EmptyDataset, "empty dataset");
  if (labels.size() != images.size()) fail(Errc::DimensionMismatch, "label count does not match image count");
  Dataset d;
  d.descriptor = spec.descriptor;
  d.labels.assign(labels.begin(), labels.end());
  d.ids.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto fv = extract(images[i], spec);
    if (i == 0) d.features.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(fv.size()));
    if (static_cast<Eigen::Index>(fv.size()) != d.features.cols())
      fail(Errc::DimensionMismatch, "descriptor length varies across images; resize to a common size");
    for (std::size_t j = 0; j < fv.size(); ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fv.values[j];
  }
  d.validate();
  return d;
}

// --- CSV: id,label,f0..fN -------------------------------------------------

inline std::string feature_csv(const Dataset& d) {
  std::string out = "id,label";
  for (Eigen::Index j = 0; j < d.dims(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += d.id(i);
    out += ',';
    out += std::to_string(d.labels[i]);
    for (Eigen::Index j = 0; j < d.dims(); ++j) {
      out += ',';
      out += format_double(d.features(static_cast<Eigen::Index>(i), j));
    }
    out += '\n';
  }
  return out;
}

inline Dataset read_feature_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) fail(Errc::CorruptData, "empty feature CSV: " + path.string());
  const auto header = split(lines[0], ',');
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    fail(Errc::CorruptData, "feature CSV header must start with id,label");
  const std::size_t cols = header.size() - 2;
  std::vector<std::vector<double>> rows;
  Dataset d;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != cols + 2) fail(Errc::CorruptData, "row " + std::to_string(li) + " has wrong column count");
    d.ids.emplace_back(f[0]);
    const long label = parse_long(f[1]);
    if (label != 0 && label != 1) fail(Errc::BadLabel, "label " + std::string(f[1]));
    d.labels.push_back(static_cast<int>(label));
    std::vector<double> r(cols);
    for (std::size_t j = 0; j < cols; ++j) r[j] = parse_double(f[j + 2]);
    rows.push_back(std::move(r));
  }
  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return d;
}

// --- Binary: 16-byte header then rows of (u8 label, f64 x n_cols) ---------
//   bytes 0..3  magic "LVFM"
//   bytes 4..7  n_rows   (u32 LE)
//   bytes 8..11 n_cols   (u32 LE)
//   bytes 12..15 descriptor tag (u32 LE, 0 = untagged)

namespace detail {

template <typename T>
void put_le(std::string& out, T v) {
  auto u = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(v);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(p[b]) << (8 * b);
  return std::bit_cast<T>(u);
}

}  // namespace detail

inline constexpr char kFeatureMagic[4] = {'L', 'V', 'F', 'M'};

inline std::string feature_binary(const Dataset& d) {
  std::string out(kFeatureMagic, 4);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.size()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.dims()));
  detail::put_le<std::uint32_t>(out, d.descriptor ? static_cast<std::uint32_t>(*d.descriptor) : 0u);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.push_back(static_cast<char>(d.labels[i]));
    for (Eigen::Index j = 0; j < d.dims(); ++j)
      detail::put_le<double>(out, d.features(static_cast<Eigen::Index>(i), j));
  }
  return out;
}

inline Dataset parse_feature_binary(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(p, kFeatureMagic, 4) != 0)
    fail(Errc::CorruptData, "missing feature-matrix magic");
  const auto rows = detail::get_le<std::uint32_t>(p + 4);
  const auto cols = detail::get_le<std::uint32_t>(p + 8);
  const auto tag = detail::get_le<std::uint32_t>(p + 12);
  const std::size_t row_bytes = 1 + 8 * static_cast<std::size_t>(cols);
  if (bytes.size() != 16 + row_bytes * rows) fail(Errc::CorruptData, "feature-matrix payload size mismatch");
  Dataset d;
  if (tag != 0) {
    d.descriptor = descriptor_from_code(tag);
    if (!d.descriptor) fail(Errc::CorruptData, "unknown descriptor tag " + std::to_string(tag));
  }
  d.features.resize(rows, cols);
  d.labels.resize(rows);
  for (std::uint32_t i = 0; i < rows; ++i) {
    const unsigned char* r = p + 16 + row_bytes * i;
    if (r[0] > 1) fail(Errc::BadLabel, "label " + std::to_string(r[0]));
    d.labels[i] = r[0];
    for (std::uint32_t j = 0; j < cols; ++j) d.features(i, j) = detail::get_le<double>(r + 1 + 8 * j);
  }
  return d;
}

}  // namespace lv
