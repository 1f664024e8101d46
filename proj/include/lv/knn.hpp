#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/model.hpp"

namespace lv {

enum class KnnMetric : std::uint32_t { Euclidean = 0, Cosine = 1, Minkowski3 = 2 };

struct KnnParams {
  int k = 10;
  KnnMetric metric = KnnMetric::Euclidean;
  /// Votes weighted by 1/distance^2; an exact match decides alone.
  bool weighted = false;
};

namespace detail {

// Ranking keys (monotone in the true distance) between query rows q and
// reference rows r: squared distance, 1 - cos, or sum |d|^3.
inline Matrix knn_keys(const Matrix& q, const Matrix& r, KnnMetric m) {
  switch (m) {
    case KnnMetric::Euclidean: {
      Matrix g = q * r.transpose();
      const Vector nq = q.rowwise().squaredNorm();
      const Vector nr = r.rowwise().squaredNorm();
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          const double d2 = nq(i) + nr(j) - 2.0 * g(i, j);
          // Cancellation noise on duplicates would otherwise leave tiny positive values.
          g(i, j) = d2 <= 1e-12 * (nq(i) + nr(j)) ? 0.0 : d2;
        }
      return g;
    }
    case KnnMetric::Cosine: {
      Matrix g = q * r.transpose();
      const Vector nq = q.rowwise().norm();
      const Vector nr = r.rowwise().norm();
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
          g(i, j) = nq(i) > 0.0 && nr(j) > 0.0 ? 1.0 - g(i, j) / (nq(i) * nr(j)) : 1.0;
      return g;
    }
    case KnnMetric::Minkowski3: {
      Matrix g(q.rows(), r.rows());
      for (Eigen::Index i = 0; i < q.rows(); ++i)
        g.row(i) = (r.rowwise() - q.row(i)).array().abs().cube().rowwise().sum().transpose();
      return g;
    }
  }
  return {};
}

inline double key_to_distance(double key, KnnMetric m) {
  switch (m) {
    case KnnMetric::Euclidean: return std::sqrt(key);
    case KnnMetric::Cosine: return key;
    case KnnMetric::Minkowski3: return std::cbrt(key);
  }
  return key;
}

// Score from the k nearest references of one query: defect vote fraction - 0.5.
// Neighbours are ranked by (key, index).
inline double knn_vote(const double* keys, Eigen::Index n, std::span<const int> labels, const KnnParams& p,
                       std::vector<int>& scratch) {
  scratch.resize(static_cast<std::size_t>(n));
  std::iota(scratch.begin(), scratch.end(), 0);
  const auto less = [&](int a, int b) { return keys[a] < keys[b] || (keys[a] == keys[b] && a < b); };
  const auto k = static_cast<std::ptrdiff_t>(p.k);
  std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end(), less);
  std::sort(scratch.begin(), scratch.begin() + k, less);
  if (!p.weighted) {
    int defects = 0;
    for (std::ptrdiff_t t = 0; t < k; ++t) defects += labels[scratch[t]] == 1;
    return static_cast<double>(defects) / static_cast<double>(k) - 0.5;
  }
  if (keys[scratch[0]] == 0.0) {
    int exact = 0, defects = 0;
    for (std::ptrdiff_t t = 0; t < k && keys[scratch[t]] == 0.0; ++t) ++exact, defects += labels[scratch[t]] == 1;
    return static_cast<double>(defects) / exact - 0.5;
  }
  double total = 0.0, defect = 0.0;
  for (std::ptrdiff_t t = 0; t < k; ++t) {
    const double dist = key_to_distance(keys[scratch[t]], p.metric);
    const double w = 1.0 / (dist * dist);
    total += w;
    if (labels[scratch[t]] == 1) defect += w;
  }
  return defect / total - 0.5;
}

}  // namespace detail

/// Lazy k-nearest-neighbour model over z-scored training rows.
class KnnModel final : public Model {
 public:
  KnnModel(Standardizer st, Matrix train, std::vector<int> labels, KnnParams p)
      : st_(std::move(st)), train_(std::move(train)), labels_(std::move(labels)), p_(p) {}

  ModelKind kind() const noexcept override { return ModelKind::Knn; }
  Eigen::Index dims() const noexcept override { return st_.mean.size(); }
  const KnnParams& params() const noexcept { return p_; }

  void save_body(BlobWriter& w) const override {
    write_standardizer(w, st_);
    w.u32(static_cast<std::uint32_t>(p_.k));
    w.u32(static_cast<std::uint32_t>(p_.metric));
    w.u32(p_.weighted ? 1 : 0);
    w.mat(train_);
    w.ints(labels_);
  }

  static KnnModel load_body(BlobReader& r) {
    auto st = read_standardizer(r);
    KnnParams p;
    p.k = static_cast<int>(r.u32());
    const auto metric = r.u32();
    if (metric > 2) fail(Errc::CorruptData, "unknown kNN metric tag");
    p.metric = static_cast<KnnMetric>(metric);
    p.weighted = r.u32() != 0;
    Matrix train = r.mat();
    auto labels = r.ints<int>();
    if (static_cast<std::size_t>(train.rows()) != labels.size() || train.cols() != st.mean.size() || p.k < 1 ||
        static_cast<std::size_t>(p.k) > labels.size())
      fail(Errc::CorruptData, "kNN payload shape mismatch");
    return KnnModel(std::move(st), std::move(train), std::move(labels), p);
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    const Matrix z = st_.apply(x);
    Vector s(x.rows());
    std::vector<int> scratch;
    constexpr Eigen::Index kChunk = 256;
    for (Eigen::Index start = 0; start < z.rows(); start += kChunk) {
      const Eigen::Index len = std::min(kChunk, z.rows() - start);
      const Matrix keys = detail::knn_keys(z.middleRows(start, len), train_, p_.metric);
      for (Eigen::Index i = 0; i < len; ++i)
        s(start + i) = detail::knn_vote(keys.row(i).data(), keys.cols(), labels_, p_, scratch);
    }
    return s;
  }

 private:
  Standardizer st_;
  Matrix train_;
  std::vector<int> labels_;
  KnnParams p_;
};

inline KnnModel train_knn(const Dataset& d, const KnnParams& p) {
  d.validate();
  if (p.k < 1) fail(Errc::InvalidParams, "k must be >= 1");
  if (d.size() < static_cast<std::size_t>(p.k))
    fail(Errc::TooFewSamples, "kNN with k=" + std::to_string(p.k) + " needs at least k samples, got " +
                                  std::to_string(d.size()));
  auto st = Standardizer::fit(d.features);
  Matrix z = st.apply(d.features);
  return KnnModel(std::move(st), std::move(z), d.labels, p);
}

}  // namespace lv
