#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lv/classifiers.hpp"
#include "lv/dataset.hpp"
#include "lv/error.hpp"
#include "lv/io.hpp"
#include "lv/parallel.hpp"
#include "lv/rng.hpp"

namespace lv {

/// Actual rows, predicted columns; class 1 (defect) is positive.
struct ConfusionMatrix {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }

  void add(int actual, int predicted) noexcept {
    if (actual == 1)
      (predicted == 1 ? tp : fn)++;
    else
      (predicted == 1 ? fp : tn)++;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp, tn += o.tn, fp += o.fp, fn += o.fn;
    return *this;
  }

  /// Same counts with the class labels swapped.
  ConfusionMatrix relabeled() const noexcept { return {tn, tp, fn, fp}; }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) fail(Errc::EmptyMatrix, "accuracy of an empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.tp + cm.fp + cm.tn + cm.fn);
}

inline ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predicted) {
  if (labels.size() != predicted.size()) fail(Errc::DimensionMismatch, "label and prediction counts differ");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], predicted[i]);
  return cm;
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  return "actual,predicted_0,predicted_1\n0," + std::to_string(cm.tn) + "," + std::to_string(cm.fp) + "\n1," +
         std::to_string(cm.fn) + "," + std::to_string(cm.tp) + "\n";
}

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;

  double auc() const {
    double a = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      a += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    return a;
  }

  /// Thresholds strictly decreasing, rates non-decreasing, ends at (0,0) and (1,1).
  bool is_valid_staircase() const {
    if (points.size() < 2) return false;
    const auto& f = points.front();
    const auto& b = points.back();
    if (f.fpr != 0.0 || f.tpr != 0.0 || b.fpr != 1.0 || b.tpr != 1.0) return false;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i].threshold < points[i - 1].threshold)) return false;
      if (points[i].fpr < points[i - 1].fpr || points[i].tpr < points[i - 1].tpr) return false;
    }
    for (const auto& p : points)
      if (p.fpr < 0.0 || p.fpr > 1.0 || p.tpr < 0.0 || p.tpr > 1.0) return false;
    return true;
  }
};

/// Thresholds are the distinct scores in descending order followed by -inf;
/// a sample is called positive iff its score exceeds the threshold.
inline RocCurve roc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) fail(Errc::DimensionMismatch, "label and score counts differ");
  std::size_t pos = 0;
  for (int l : labels) pos += l == 1;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) fail(Errc::SingleClassLabels, "ROC needs both classes");
  for (double s : scores)
    if (std::isnan(s)) fail(Errc::InvalidParams, "NaN score");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  std::size_t tp = 0, fp = 0, k = 0;
  while (k < order.size()) {
    const double t = scores[order[k]];
    c.points.push_back({t, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
    for (; k < order.size() && scores[order[k]] == t; ++k) (labels[order[k]] == 1 ? tp : fp)++;
  }
  c.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return c;
}

inline std::string roc_csv(const RocCurve& c) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : c.points)
    out += format_double(p.threshold) + "," + format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return out;
}

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold partition. Each class is shuffled separately and dealt
/// round-robin, the fold counter continuing from one class to the next, so
/// fold sizes and per-fold class counts differ by at most one.
/// k == n gives leave-one-out regardless of class sizes.
inline std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n == 0) fail(Errc::EmptyDataset, "empty dataset");
  if (k < 2) fail(Errc::InvalidParams, "k-fold needs k >= 2");
  if (k > n) fail(Errc::TooFewPerClass, "more folds than samples");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  if (k < n)
    for (const auto& c : by_class)
      if (!c.empty() && c.size() < k)
        fail(Errc::TooFewPerClass, "a class has " + std::to_string(c.size()) + " members, fewer than k=" + std::to_string(k));

  Rng rng(seed);
  std::vector<Fold> folds(k);
  std::size_t deal = 0;
  for (auto& c : by_class) {
    std::shuffle(c.begin(), c.end(), rng);
    for (std::size_t i : c) folds[deal++ % k].test.push_back(i);
  }
  std::vector<char> in_test(n);
  for (auto& f : folds) {
    std::sort(f.test.begin(), f.test.end());
    std::fill(in_test.begin(), in_test.end(), 0);
    for (std::size_t i : f.test) in_test[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_test[i]) f.train.push_back(i);
  }
  return folds;
}

/// Stratified holdout: the test set takes round(n * test_fraction) samples,
/// shared between the classes by largest remainder.
inline Fold stratified_holdout(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n < 2) fail(Errc::EmptyDataset, "holdout needs at least two samples");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail(Errc::InvalidParams, "test fraction must lie in (0,1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  std::size_t quota[2];
  double rem[2];
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * test_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    rem[c] = exact - std::floor(exact);
  }
  for (std::size_t left = total - std::min(total, quota[0] + quota[1]); left > 0; --left) {
    const int c = rem[1] > rem[0] ? 1 : 0;
    ++quota[c];
    rem[c] = -1.0;
  }
  Rng rng(seed);
  Fold f;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    f.test.insert(f.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    f.train.insert(f.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
  }
  std::sort(f.test.begin(), f.test.end());
  std::sort(f.train.begin(), f.train.end());
  return f;
}

struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::vector<double> per_fold;
  Vector scores;  // out-of-fold score of every sample
  std::optional<RocCurve> roc;
};

using Trainer = std::function<TrainedModel(const Dataset& train, std::uint64_t seed)>;

/// k-fold cross-validation with the confusion matrix pooled over folds.
inline EvalReport cross_validate(const Dataset& d, const Trainer& trainer, std::size_t k = 5, std::uint64_t seed = 0,
                                 unsigned threads = 1) {
  d.validate();
  const auto folds = stratified_kfold(d.labels, k, derive_seed(seed, "folds"));
  EvalReport r;
  r.scores = Vector::Zero(static_cast<Eigen::Index>(d.size()));
  std::vector<ConfusionMatrix> per(k);
  parallel_for(k, threads, [&](std::size_t f) {
    const auto train = d.subset(folds[f].train);
    const auto test = d.subset(folds[f].test);
    const auto model = trainer(train, derive_seed(seed, static_cast<std::uint64_t>(f)));
    const Vector s = model->score(test.features);
    for (std::size_t t = 0; t < folds[f].test.size(); ++t) {
      r.scores(static_cast<Eigen::Index>(folds[f].test[t])) = s(static_cast<Eigen::Index>(t));
      per[f].add(test.labels[t], s(static_cast<Eigen::Index>(t)) > 0.0 ? 1 : 0);
    }
  });
  for (const auto& cm : per) {
    r.confusion += cm;
    r.per_fold.push_back(accuracy(cm));
  }
  r.accuracy = accuracy(r.confusion);
  if (d.has_both_classes()) {
    std::vector<double> s(r.scores.data(), r.scores.data() + r.scores.size());
    r.roc = roc(d.labels, s);
  }
  return r;
}

inline EvalReport cross_validate(const Dataset& d, const ClassifierSpec& spec, std::size_t k = 5, std::uint64_t seed = 0,
                                 unsigned threads = 1) {
  return cross_validate(
      d, [&](const Dataset& train, std::uint64_t s) { return train_classifier(train, spec, s); }, k, seed, threads);
}

/// Rows x columns of accuracies (NaN marks a failed cell), rendered with an
/// Average row over the finite entries of each column.
struct ResultsTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> values;

  ResultsTable(std::vector<std::string> r, std::vector<std::string> c)
      : rows(std::move(r)), cols(std::move(c)),
        values(rows.size(), std::vector<double>(cols.size(), std::numeric_limits<double>::quiet_NaN())) {}

  std::vector<double> column_average() const {
    std::vector<double> avg(cols.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double sum = 0.0;
      int count = 0;
      for (const auto& row : values)
        if (std::isfinite(row[j])) sum += row[j], ++count;
      if (count > 0) avg[j] = sum / count;
    }
    return avg;
  }

  /// Accuracies as percentages with two decimals; failed cells print NA.
  std::string to_csv() const {
    auto cell = [](double v) { return std::isfinite(v) ? format_fixed(100.0 * v, 2) : std::string("NA"); };
    std::string out = "classifier";
    for (const auto& c : cols) out += "," + c;
    out += "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out += rows[i];
      for (double v : values[i]) out += "," + cell(v);
      out += "\n";
    }
    out += "Average";
    for (double v : column_average()) out += "," + cell(v);
    out += "\n";
    return out;
  }
};

}  // namespace lv
