#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/knn.hpp"
#include "lv/lda.hpp"
#include "lv/model.hpp"
#include "lv/network.hpp"
#include "lv/rng.hpp"
#include "lv/svm.hpp"
#include "lv/tree.hpp"

namespace lv {

enum class EnsembleKind : std::uint32_t {
  BoostedTree = 0,
  BaggedTree = 1,
  SubspaceLda = 2,
  SubspaceKnn = 3,
  RusBoostedTree = 4,
};

struct EnsembleParams {
  int n_learners = 30;
  std::uint64_t seed = 0;
  /// Bagging only: resample with replacement / draw sqrt(P) candidate features per split.
  bool bootstrap = true;
  bool feature_subsample = true;
  /// Tree size; negative picks the per-kind default (20 boosted, 100 bagged).
  int max_splits = -1;
  /// Features per subspace learner; 0 means ceil(P/2).
  int subspace_dims = 0;
  int knn_k = 10;
};

/// Per-round boosting diagnostics.
struct BoostRound {
  double error = 0.0;  // weighted training error on the full data
  double alpha = 0.0;
  std::size_t pool_size = 0;
  std::size_t pool_defects = 0;
  bool accepted = true;
};

namespace detail {
inline TrainedModel load_any(BlobReader& r);
inline void save_any(BlobWriter& w, const Model& m);

inline Matrix gather_cols(const Matrix& x, std::span<const int> cols) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, static_cast<Eigen::Index>(j)) = x(i, cols[j]);
  return out;
}

// Sorted random subset of `take` out of `dims` feature indices.
inline std::vector<int> random_subspace(Rng& rng, int dims, int take) {
  std::vector<int> all(static_cast<std::size_t>(dims));
  std::iota(all.begin(), all.end(), 0);
  for (int k = 0; k < take; ++k) {
    std::uniform_int_distribution<int> pick(k, dims - 1);
    std::swap(all[k], all[pick(rng)]);
  }
  all.resize(static_cast<std::size_t>(take));
  std::sort(all.begin(), all.end());
  return all;
}
}  // namespace detail

/// Weighted vote over members: score = sum w [member says defect] / sum w - 0.5.
class EnsembleModel final : public Model {
 public:
  struct Member {
    double weight = 1.0;
    std::vector<int> cols;  // empty: every feature
    TrainedModel model;
  };

  EnsembleModel(EnsembleKind kind, Eigen::Index dims, std::vector<Member> members)
      : ensemble_(kind), dims_(dims), members_(std::move(members)) {}

  ModelKind kind() const noexcept override { return ModelKind::Ensemble; }
  Eigen::Index dims() const noexcept override { return dims_; }
  EnsembleKind ensemble_kind() const noexcept { return ensemble_; }
  const std::vector<Member>& members() const noexcept { return members_; }
  const std::vector<BoostRound>& rounds() const noexcept { return rounds_; }
  void set_rounds(std::vector<BoostRound> r) { rounds_ = std::move(r); }

  void save_body(BlobWriter& w) const override {
    w.u32(static_cast<std::uint32_t>(ensemble_));
    w.u64(static_cast<std::uint64_t>(dims_));
    w.u64(members_.size());
    for (const auto& m : members_) {
      w.f64(m.weight);
      w.ints(m.cols);
      detail::save_any(w, *m.model);
    }
  }

  static EnsembleModel load_body(BlobReader& r) {
    const auto kind = r.u32();
    if (kind > 4) fail(Errc::CorruptData, "unknown ensemble tag");
    const auto dims = static_cast<Eigen::Index>(r.u64());
    const auto count = r.u64();
    if (count == 0 || count > r.remaining()) fail(Errc::CorruptData, "bad ensemble member count");
    std::vector<Member> members(static_cast<std::size_t>(count));
    for (auto& m : members) {
      m.weight = r.f64();
      m.cols = r.ints<int>();
      m.model = detail::load_any(r);
      const auto expect = m.cols.empty() ? dims : static_cast<Eigen::Index>(m.cols.size());
      if (m.model->dims() != expect) fail(Errc::CorruptData, "ensemble member width mismatch");
      for (int c : m.cols)
        if (c < 0 || c >= dims) fail(Errc::CorruptData, "ensemble column out of range");
    }
    return EnsembleModel(static_cast<EnsembleKind>(kind), dims, std::move(members));
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    Vector votes = Vector::Zero(x.rows());
    double total = 0.0;
    for (const auto& m : members_) {
      const Vector s = m.cols.empty() ? m.model->score(x) : m.model->score(detail::gather_cols(x, m.cols));
      votes.array() += m.weight * (s.array() > 0.0).cast<double>();
      total += m.weight;
    }
    return (votes.array() / total - 0.5).matrix();
  }

 private:
  EnsembleKind ensemble_;
  Eigen::Index dims_;
  std::vector<Member> members_;
  std::vector<BoostRound> rounds_;
};

/// Random-subspace 10-NN ensemble sharing one standardized training matrix.
class SubspaceKnnModel final : public Model {
 public:
  SubspaceKnnModel(Standardizer st, Matrix train, std::vector<int> labels, std::vector<std::vector<int>> subsets, int k)
      : st_(std::move(st)), train_(std::move(train)), labels_(std::move(labels)), subsets_(std::move(subsets)), k_(k) {}

  ModelKind kind() const noexcept override { return ModelKind::SubspaceKnn; }
  Eigen::Index dims() const noexcept override { return st_.mean.size(); }
  const std::vector<std::vector<int>>& subsets() const noexcept { return subsets_; }

  void save_body(BlobWriter& w) const override {
    write_standardizer(w, st_);
    w.u32(static_cast<std::uint32_t>(k_));
    w.mat(train_);
    w.ints(labels_);
    w.u64(subsets_.size());
    for (const auto& s : subsets_) w.ints(s);
  }

  static SubspaceKnnModel load_body(BlobReader& r) {
    auto st = read_standardizer(r);
    const int k = static_cast<int>(r.u32());
    Matrix train = r.mat();
    auto labels = r.ints<int>();
    const auto count = r.u64();
    if (count == 0 || count > r.remaining()) fail(Errc::CorruptData, "bad subspace count");
    std::vector<std::vector<int>> subsets(static_cast<std::size_t>(count));
    for (auto& s : subsets) {
      s = r.ints<int>();
      for (int c : s)
        if (c < 0 || c >= st.mean.size()) fail(Errc::CorruptData, "subspace column out of range");
    }
    if (static_cast<std::size_t>(train.rows()) != labels.size() || train.cols() != st.mean.size() || k < 1 ||
        static_cast<std::size_t>(k) > labels.size())
      fail(Errc::CorruptData, "subspace kNN payload shape mismatch");
    return SubspaceKnnModel(std::move(st), std::move(train), std::move(labels), std::move(subsets), k);
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    const Matrix z = st_.apply(x);
    Vector votes = Vector::Zero(x.rows());
    std::vector<int> scratch;
    const KnnParams p{k_, KnnMetric::Euclidean, false};
    for (const auto& cols : subsets_) {
      const Matrix keys = detail::knn_keys(detail::gather_cols(z, cols), detail::gather_cols(train_, cols), p.metric);
      for (Eigen::Index i = 0; i < keys.rows(); ++i)
        votes(i) += detail::knn_vote(keys.row(i).data(), keys.cols(), labels_, p, scratch) > 0.0 ? 1.0 : 0.0;
    }
    return (votes.array() / static_cast<double>(subsets_.size()) - 0.5).matrix();
  }

 private:
  Standardizer st_;
  Matrix train_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> subsets_;
  int k_;
};

namespace detail {

// AdaBoost.M1 over weighted trees; with `undersample`, each round's tree sees
// every minority sample plus an equal-size uniform draw of the majority.
inline EnsembleModel boost_trees(const Dataset& d, const EnsembleParams& p, bool undersample) {
  const auto n = d.size();
  const int max_splits = p.max_splits >= 0 ? p.max_splits : 20;
  const auto counts = d.class_counts();
  const int minority = counts[1] <= counts[0] ? 1 : 0;
  std::vector<std::size_t> major_idx, minor_idx;
  for (std::size_t i = 0; i < n; ++i) (d.labels[i] == minority ? minor_idx : major_idx).push_back(i);

  Rng rng(derive_seed(p.seed, undersample ? "rusboost" : "adaboost"));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<EnsembleModel::Member> members;
  std::vector<BoostRound> rounds;
  TrainedModel first;
  const SortedColumns cols(d.features);
  for (int t = 0; t < p.n_learners; ++t) {
    std::vector<double> fit_w = w;
    BoostRound round;
    if (undersample) {
      std::fill(fit_w.begin(), fit_w.end(), 0.0);
      std::vector<std::size_t> pool = major_idx;
      const auto take = std::min(pool.size(), minor_idx.size());
      for (std::size_t k = 0; k < take; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
      }
      pool.resize(take);
      pool.insert(pool.end(), minor_idx.begin(), minor_idx.end());
      for (std::size_t i : pool) fit_w[i] = w[i];
      round.pool_size = pool.size();
      for (std::size_t i : pool) round.pool_defects += d.labels[i] == 1;
    } else {
      round.pool_size = n;
      round.pool_defects = counts[1];
    }
    auto tree = std::make_shared<TreeModel>(fit_tree(cols, d.labels, fit_w, TreeParams{max_splits, 0, 0}));
    if (!first) first = tree;
    const Vector s = tree->score(d.features);
    double err = 0.0, total = 0.0;
    std::vector<char> wrong(n);
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = (s(static_cast<Eigen::Index>(i)) > 0.0 ? 1 : 0) != d.labels[i];
      total += w[i];
      if (wrong[i]) err += w[i];
    }
    err /= total;
    round.error = err;
    if (err >= 0.5) {
      round.accepted = false;
      rounds.push_back(round);
      break;
    }
    const double e = std::max(err, 1e-10);
    round.alpha = 0.5 * std::log((1.0 - e) / e);
    rounds.push_back(round);
    members.push_back({round.alpha, {}, tree});
    if (err == 0.0) break;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(2.0 * round.alpha);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  if (members.empty()) members.push_back({1.0, {}, first});
  EnsembleModel m(undersample ? EnsembleKind::RusBoostedTree : EnsembleKind::BoostedTree, d.dims(), std::move(members));
  m.set_rounds(std::move(rounds));
  return m;
}

inline EnsembleModel bag_trees(const Dataset& d, const EnsembleParams& p) {
  const auto n = d.size();
  const int max_splits = p.max_splits >= 0 ? p.max_splits : 100;
  const int per_split =
      p.feature_subsample ? std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d.dims()))))) : 0;
  Rng rng(derive_seed(p.seed, "bagging"));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<EnsembleModel::Member> members;
  const SortedColumns cols(d.features);
  for (int t = 0; t < p.n_learners; ++t) {
    std::vector<double> w(n, p.bootstrap ? 0.0 : 1.0);
    if (p.bootstrap)
      for (std::size_t k = 0; k < n; ++k) w[pick(rng)] += 1.0;
    const TreeParams tp{max_splits, per_split, derive_seed(p.seed, static_cast<std::uint64_t>(t))};
    members.push_back({1.0, {}, std::make_shared<TreeModel>(fit_tree(cols, d.labels, w, tp))});
  }
  return EnsembleModel(EnsembleKind::BaggedTree, d.dims(), std::move(members));
}

inline int subspace_width(const Dataset& d, const EnsembleParams& p) {
  const auto dims = static_cast<int>(d.dims());
  const int take = p.subspace_dims > 0 ? p.subspace_dims : (dims + 1) / 2;
  if (take > dims) fail(Errc::InvalidParams, "subspace wider than the feature space");
  return take;
}

}  // namespace detail

/// Trains one of the five ensemble families. Boosting stops early on a
/// degenerate round (error 0 or >= 0.5) and keeps the members so far.
inline TrainedModel train_ensemble(const Dataset& d, EnsembleKind kind, const EnsembleParams& p = {}) {
  d.require_both_classes();
  if (p.n_learners < 1) fail(Errc::InvalidParams, "n_learners must be >= 1");
  switch (kind) {
    case EnsembleKind::BoostedTree: return std::make_shared<EnsembleModel>(detail::boost_trees(d, p, false));
    case EnsembleKind::RusBoostedTree: return std::make_shared<EnsembleModel>(detail::boost_trees(d, p, true));
    case EnsembleKind::BaggedTree: return std::make_shared<EnsembleModel>(detail::bag_trees(d, p));
    case EnsembleKind::SubspaceLda: {
      const int take = detail::subspace_width(d, p);
      const auto stats = detail::LdaStats::fit(d);
      Rng rng(derive_seed(p.seed, "subspace-lda"));
      std::vector<EnsembleModel::Member> members;
      for (int t = 0; t < p.n_learners; ++t) {
        auto cols = detail::random_subspace(rng, static_cast<int>(d.dims()), take);
        auto model = std::make_shared<LdaModel>(stats.model(cols));
        members.push_back({1.0, std::move(cols), std::move(model)});
      }
      return std::make_shared<EnsembleModel>(EnsembleKind::SubspaceLda, d.dims(), std::move(members));
    }
    case EnsembleKind::SubspaceKnn: {
      const int take = detail::subspace_width(d, p);
      if (d.size() < static_cast<std::size_t>(p.knn_k)) fail(Errc::TooFewSamples, "subspace kNN needs at least k samples");
      Rng rng(derive_seed(p.seed, "subspace-knn"));
      std::vector<std::vector<int>> subsets;
      for (int t = 0; t < p.n_learners; ++t) subsets.push_back(detail::random_subspace(rng, static_cast<int>(d.dims()), take));
      auto st = Standardizer::fit(d.features);
      Matrix z = st.apply(d.features);
      return std::make_shared<SubspaceKnnModel>(std::move(st), std::move(z), d.labels, std::move(subsets), p.knn_k);
    }
  }
  fail(Errc::InvalidParams, "unknown ensemble kind");
}

// --- Model container: "LVMD", u32 version, u32 kind, body -----------------

inline constexpr char kModelMagic[4] = {'L', 'V', 'M', 'D'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void save_any(BlobWriter& w, const Model& m) {
  w.u32(static_cast<std::uint32_t>(m.kind()));
  m.save_body(w);
}

inline TrainedModel load_any(BlobReader& r) {
  switch (static_cast<ModelKind>(r.u32())) {
    case ModelKind::Majority: return std::make_shared<MajorityModel>(MajorityModel::load_body(r));
    case ModelKind::Tree: return std::make_shared<TreeModel>(TreeModel::load_body(r));
    case ModelKind::Svm: return std::make_shared<SvmModel>(SvmModel::load_body(r));
    case ModelKind::Knn: return std::make_shared<KnnModel>(KnnModel::load_body(r));
    case ModelKind::Lda: return std::make_shared<LdaModel>(LdaModel::load_body(r));
    case ModelKind::Ensemble: return std::make_shared<EnsembleModel>(EnsembleModel::load_body(r));
    case ModelKind::SubspaceKnn: return std::make_shared<SubspaceKnnModel>(SubspaceKnnModel::load_body(r));
    case ModelKind::Ann: return std::make_shared<AnnModel>(AnnModel::load_body(r));
  }
  fail(Errc::CorruptData, "unknown model kind tag");
}

}  // namespace detail

inline std::string serialize_model(const Model& m) {
  BlobWriter w;
  w.raw(std::string_view(kModelMagic, 4));
  w.u32(kModelVersion);
  detail::save_any(w, m);
  return w.bytes();
}

inline TrainedModel deserialize_model(std::string_view bytes) {
  BlobReader r(bytes);
  if (r.remaining() < 8 || r.raw(4) != std::string_view(kModelMagic, 4)) fail(Errc::CorruptData, "missing model magic");
  const auto version = r.u32();
  if (version != kModelVersion) fail(Errc::UnsupportedFormat, "model container version " + std::to_string(version));
  auto m = detail::load_any(r);
  if (r.remaining() != 0) fail(Errc::CorruptData, "trailing bytes after model");
  return m;
}

}  // namespace lv
