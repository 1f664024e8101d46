#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/eval.hpp"
#include "lv/network.hpp"
#include "lv/rng.hpp"

namespace lv {

struct AnnTraining {
  std::shared_ptr<AnnModel> model;
  std::vector<double> epoch_loss;  // full-training-set loss after each epoch
};

/// Trains on the given rows with minibatch Adam.
inline AnnTraining fit_ann(const Dataset& train, AnnConfig cfg) {
  train.require_both_classes();
  cfg.input_dim = static_cast<int>(train.dims());
  cfg.validate();
  const auto st = cfg.standardize ? Standardizer::fit(train.features) : identity_standardizer(train.dims());
  const Matrix x = st.apply(train.features);
  AnnNet net(cfg);
  net.initialize(derive_seed(cfg.seed, "ann-init"));
  AdamState adam(net.params().size());
  const std::size_t frozen = cfg.train_hidden ? 0 : static_cast<std::size_t>(cfg.hidden) * (cfg.input_dim + 1);

  const auto n = train.size();
  const auto batch = static_cast<std::size_t>(cfg.batch_for(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(cfg.seed, "ann-batches"));
  AnnTraining out;
  for (int e = 0; e < cfg.epochs; ++e) {
    if (batch < n) std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      if (len == n) {
        const auto lg = net.loss_and_grad(x, train.labels);
        adam_step(net.params(), lg.grad, adam, cfg.adam, frozen);
        continue;
      }
      Matrix xb(static_cast<Eigen::Index>(len), x.cols());
      std::vector<int> yb(len);
      for (std::size_t k = 0; k < len; ++k) {
        xb.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(order[start + k]));
        yb[k] = train.labels[order[start + k]];
      }
      const auto lg = net.loss_and_grad(xb, yb);
      adam_step(net.params(), lg.grad, adam, cfg.adam, frozen);
    }
    out.epoch_loss.push_back(net.loss_and_grad(x, train.labels).loss);
  }
  out.model = std::make_shared<AnnModel>(st, std::move(net));
  return out;
}

/// The six train/test partitions, named by their training percentage.
inline constexpr int kAnnSplits[6] = {70, 75, 80, 85, 90, 95};
inline constexpr int kAnnHidden[4] = {60, 50, 40, 30};

inline bool valid_ann_split(int train_percent) {
  return std::find(std::begin(kAnnSplits), std::end(kAnnSplits), train_percent) != std::end(kAnnSplits);
}

inline std::string split_name(int train_percent) {
  return std::to_string(train_percent) + "/" + std::to_string(100 - train_percent);
}

struct AnnRun {
  std::shared_ptr<AnnModel> model;
  Fold split;
  EvalReport test;   // held-out confusion, accuracy and ROC
  EvalReport train;  // same metrics on the training rows
  std::vector<double> epoch_loss;
};

inline EvalReport evaluate_scores(std::span<const int> labels, const Vector& scores) {
  EvalReport r;
  r.scores = scores;
  for (std::size_t i = 0; i < labels.size(); ++i)
    r.confusion.add(labels[i], scores(static_cast<Eigen::Index>(i)) > 0.0 ? 1 : 0);
  r.accuracy = accuracy(r.confusion);
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
  if (both) r.roc = roc(labels, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
  return r;
}

/// Stratified holdout at `train_percent`, then training and held-out evaluation.
inline AnnRun train_ann(const Dataset& d, const AnnConfig& cfg, int train_percent) {
  if (!valid_ann_split(train_percent))
    fail(Errc::InvalidParams, "split must be one of 70/30, 75/25, 80/20, 85/15, 90/10, 95/5");
  d.require_both_classes();
  AnnRun run;
  run.split = stratified_holdout(d.labels, (100 - train_percent) / 100.0, derive_seed(cfg.seed, "ann-split"));
  const auto train = d.subset(run.split.train);
  const auto test = d.subset(run.split.test);
  auto fitted = fit_ann(train, cfg);
  run.model = fitted.model;
  run.epoch_loss = std::move(fitted.epoch_loss);
  run.test = evaluate_scores(test.labels, run.model->score(test.features));
  run.train = evaluate_scores(train.labels, run.model->score(train.features));
  return run;
}

struct AnnSweepCell {
  int hidden = 0;
  int train_percent = 0;
  AnnRun run;
};

/// Trains every (hidden size, split) pair; cells are independent jobs.
inline std::vector<AnnSweepCell> ann_sweep(const Dataset& d, const AnnConfig& base, std::span<const int> hidden,
                                           std::span<const int> splits, unsigned threads = 1) {
  std::vector<AnnSweepCell> cells;
  for (int g : hidden)
    for (int s : splits) cells.push_back({g, s, {}});
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    AnnConfig cfg = base;
    cfg.hidden = cells[i].hidden;
    cells[i].run = train_ann(d, cfg, cells[i].train_percent);
  });
  return cells;
}

}  // namespace lv
