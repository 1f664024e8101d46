#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lv/error.hpp"
#include "lv/feature_vector.hpp"

namespace lv {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Feature matrix (one row per sample) with binary labels: 0 = no defect, 1 = defect.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::optional<Descriptor> descriptor;

  std::size_t size() const noexcept { return labels.size(); }
  Eigen::Index dims() const noexcept { return features.cols(); }

  std::array<std::size_t, 2> class_counts() const noexcept {
    std::array<std::size_t, 2> c{0, 0};
    for (int l : labels) ++c[l == 1 ? 1 : 0];
    return c;
  }

  bool has_both_classes() const noexcept {
    const auto c = class_counts();
    return c[0] > 0 && c[1] > 0;
  }

  void validate() const {
    if (labels.empty()) fail(Errc::EmptyDataset, "dataset has no samples");
    if (static_cast<std::size_t>(features.rows()) != labels.size())
      fail(Errc::DimensionMismatch, "feature rows do not match label count");
    if (!ids.empty() && ids.size() != labels.size()) fail(Errc::DimensionMismatch, "id count does not match labels");
    if (features.cols() < 1) fail(Errc::DimensionMismatch, "dataset needs at least one predictor");
    for (int l : labels)
      if (l != 0 && l != 1) fail(Errc::BadLabel, "label " + std::to_string(l));
  }

  void require_both_classes() const {
    validate();
    if (!has_both_classes()) fail(Errc::SingleClassDataset, "both classes must be present");
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
      out.labels.push_back(labels[rows[i]]);
      if (!ids.empty()) out.ids.push_back(ids[rows[i]]);
    }
    out.descriptor = descriptor;
    return out;
  }

  std::string id(std::size_t i) const { return ids.empty() ? std::to_string(i) : ids[i]; }
};

/// Per-column z-scoring fitted on a training split. Constant columns are only centred.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = n > 1 ? (x.col(j).array() - s.mean(j)).square().sum() / (n - 1) : 0.0;
      const double sd = std::sqrt(var);
      s.scale(j) = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  Matrix apply(const Matrix& x) const {
    Matrix out = x;
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
  }

  Vector apply_row(std::span<const double> x) const {
    Vector v(static_cast<Eigen::Index>(x.size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = (x[static_cast<std::size_t>(j)] - mean(j)) / scale(j);
    return v;
  }
};

}  // namespace lv
