#pragma once

// Small dataset builders shared by the classifier and evaluation tests.

#include <cstdint>
#include <random>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/model.hpp"

namespace fixture {

inline lv::Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  lv::Dataset d;
  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  d.labels = labels;
  return d;
}

// Two Gaussian clouds in p dimensions, class 1 shifted by `gap` along every axis.
inline lv::Dataset blobs(std::uint64_t seed, std::size_t n0, std::size_t n1, std::size_t p, double gap) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n0 + n1; ++i) {
    const int y = i < n0 ? 0 : 1;
    std::vector<double> r(p);
    for (auto& v : r) v = g(rng) + (y ? gap : 0.0);
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  return make_dataset(rows, labels);
}

// Separable in the first coordinate by a margin, noisy elsewhere.
inline lv::Dataset separable(std::uint64_t seed, std::size_t n, std::size_t p) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    std::vector<double> r(p);
    for (auto& v : r) v = u(rng);
    r[0] = (y ? 0.5 : -0.5) + 0.4 * u(rng);
    if (p > 1) r[0] += 0.3 * r[1];
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  return make_dataset(rows, labels);
}

inline double training_accuracy(const lv::Model& m, const lv::Dataset& d) {
  const auto pred = m.predict(d.features);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += pred[i] == d.labels[i];
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace fixture
