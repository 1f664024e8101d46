#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/model.hpp"
#include "lv/rng.hpp"

namespace lv {

struct TreeParams {
  int max_splits = 100;
  /// Candidate features drawn per split; 0 uses every feature.
  int features_per_split = 0;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double score = 0.0;  // weighted defect fraction minus 0.5
};

/// Binary CART tree over axis-aligned thresholds; `x < threshold` goes left.
class TreeModel final : public Model {
 public:
  TreeModel(Eigen::Index dims, std::vector<TreeNode> nodes) : dims_(dims), nodes_(std::move(nodes)) {}

  ModelKind kind() const noexcept override { return ModelKind::Tree; }
  Eigen::Index dims() const noexcept override { return dims_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  int splits() const noexcept {
    return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature >= 0; }));
  }

  double score_row(const double* x) const noexcept {
    int at = 0;
    while (nodes_[at].feature >= 0) at = x[nodes_[at].feature] < nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
    return nodes_[at].score;
  }

  void save_body(BlobWriter& w) const override {
    w.u64(static_cast<std::uint64_t>(dims_));
    w.u64(nodes_.size());
    for (const auto& n : nodes_) {
      w.i32(n.feature);
      w.f64(n.threshold);
      w.i32(n.left);
      w.i32(n.right);
      w.f64(n.score);
    }
  }

  static TreeModel load_body(BlobReader& r) {
    const auto dims = static_cast<Eigen::Index>(r.u64());
    const auto count = r.u64();
    if (count == 0 || count > r.remaining() / 28) fail(Errc::CorruptData, "bad tree node count");
    std::vector<TreeNode> nodes(static_cast<std::size_t>(count));
    for (auto& n : nodes) {
      n.feature = r.i32();
      n.threshold = r.f64();
      n.left = r.i32();
      n.right = r.i32();
      n.score = r.f64();
      const auto last = static_cast<int>(count);
      if (n.feature >= dims || (n.feature >= 0 && (n.left <= 0 || n.left >= last || n.right <= 0 || n.right >= last)))
        fail(Errc::CorruptData, "tree node out of range");
    }
    return TreeModel(dims, std::move(nodes));
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    Vector s(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) s(i) = score_row(x.row(i).data());
    return s;
  }

 private:
  Eigen::Index dims_;
  std::vector<TreeNode> nodes_;
};

namespace detail {

struct SplitCandidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
};

// Weighted Gini impurity times node weight.
inline double weighted_gini(double w0, double w1) {
  const double w = w0 + w1;
  return w > 0.0 ? w - (w0 * w0 + w1 * w1) / w : 0.0;
}

/// Column-major copy of the features with every column presorted by value
/// (ties by row). Built once and shared by all trees of an ensemble.
struct SortedColumns {
  Eigen::MatrixXd x;
  std::vector<std::vector<int>> order;

  explicit SortedColumns(const Matrix& rows) : x(rows), order(static_cast<std::size_t>(rows.cols())) {
    const auto n = static_cast<int>(x.rows());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      auto& o = order[static_cast<std::size_t>(f)];
      o.resize(static_cast<std::size_t>(n));
      std::iota(o.begin(), o.end(), 0);
      const double* col = x.col(f).data();
      std::stable_sort(o.begin(), o.end(), [col](int a, int b) { return col[a] < col[b]; });
    }
  }
};

class TreeGrower {
 public:
  TreeGrower(const SortedColumns& cols, std::span<const int> y, std::span<const double> w, const TreeParams& p)
      : x_(cols.x), order_(cols.order), y_(y), w_(w), p_(p), rng_(p.seed),
        side_(static_cast<std::size_t>(x_.rows()), 0), mark_(static_cast<std::size_t>(x_.rows()), 0) {}

  TreeModel grow() {
    const auto n = static_cast<int>(x_.rows());
    const auto dims = static_cast<int>(x_.cols());
    // With feature subsampling only the candidates' sorted lists are built per node.
    subsample_ = p_.features_per_split > 0 && p_.features_per_split < dims;
    Pending root;
    for (int i = 0; i < n; ++i)
      if (w_[i] > 0.0) root.rows.push_back(i);
    if (root.rows.empty()) fail(Errc::EmptyDataset, "tree needs at least one sample with positive weight");

    if (!subsample_) {
      // Features constant over the live samples never split.
      root.lists.resize(static_cast<std::size_t>(dims));
      for (int f = 0; f < dims; ++f) {
        auto& list = root.lists[f];
        for (int i : order_[f])
          if (w_[i] > 0.0) list.push_back(i);
        if (x_(list.front(), f) == x_(list.back(), f)) list.clear();
      }
    }
    for (int i : root.rows) (y_[i] == 1 ? root.w1 : root.w0) += w_[i];

    std::vector<TreeNode> nodes(1);
    nodes[0].score = leaf_score(root);
    root.node = 0;
    std::vector<Pending> frontier;
    evaluate(root, dims);
    frontier.push_back(std::move(root));

    int splits = 0;
    while (splits < p_.max_splits) {
      // Best gain first; earlier-created leaves win ties.
      int best = -1;
      for (int k = 0; k < static_cast<int>(frontier.size()); ++k) {
        if (frontier[k].split.feature < 0) continue;
        if (best < 0 || frontier[k].split.gain > frontier[best].split.gain) best = k;
      }
      if (best < 0) break;
      Pending parent = std::move(frontier[best]);
      frontier.erase(frontier.begin() + best);

      auto [left, right] = partition(parent);
      const int li = static_cast<int>(nodes.size());
      nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_score(left)});
      nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_score(right)});
      auto& pn = nodes[parent.node];
      pn.feature = parent.split.feature;
      pn.threshold = parent.split.threshold;
      pn.left = li;
      pn.right = li + 1;
      left.node = li;
      right.node = li + 1;
      evaluate(left, dims);
      evaluate(right, dims);
      frontier.push_back(std::move(left));
      frontier.push_back(std::move(right));
      ++splits;
    }
    return TreeModel(x_.cols(), std::move(nodes));
  }

 private:
  struct Pending {
    std::vector<int> rows;                // node samples in row order
    std::vector<std::vector<int>> lists;  // per feature, sorted by value; empty if constant or subsampling
    double w0 = 0.0, w1 = 0.0;
    int node = 0;
    SplitCandidate split;
  };

  static double leaf_score(const Pending& p) { return p.w1 / (p.w0 + p.w1) - 0.5; }

  void scan(const std::vector<int>& list, int f, double parent, Pending& node) const {
    double l0 = 0.0, l1 = 0.0;
    const double* col = x_.col(f).data();
    for (std::size_t k = 0; k + 1 < list.size(); ++k) {
      const int i = list[k];
      (y_[i] == 1 ? l1 : l0) += w_[i];
      const double a = col[i], b = col[list[k + 1]];
      if (!(a < b)) continue;
      const double gain = parent - weighted_gini(l0, l1) - weighted_gini(node.w0 - l0, node.w1 - l1);
      if (gain > node.split.gain) node.split = {gain, f, a + (b - a) / 2.0};
    }
  }

  void evaluate(Pending& node, int dims) {
    node.split = {};
    if (node.w0 == 0.0 || node.w1 == 0.0) return;
    const double parent = weighted_gini(node.w0, node.w1);
    if (!subsample_) {
      for (int f = 0; f < dims; ++f)
        if (!node.lists[f].empty()) scan(node.lists[f], f, parent, node);
      return;
    }
    std::vector<int> candidates(static_cast<std::size_t>(dims));
    std::iota(candidates.begin(), candidates.end(), 0);
    // Partial Fisher-Yates draw, then scan in index order for deterministic ties.
    for (int k = 0; k < p_.features_per_split; ++k) {
      std::uniform_int_distribution<int> pick(k, dims - 1);
      std::swap(candidates[k], candidates[pick(rng_)]);
    }
    candidates.resize(static_cast<std::size_t>(p_.features_per_split));
    std::sort(candidates.begin(), candidates.end());
    ++stamp_;
    for (int i : node.rows) mark_[i] = stamp_;
    std::vector<int> list;
    list.reserve(node.rows.size());
    for (int f : candidates) {
      list.clear();
      for (int i : order_[f])
        if (mark_[i] == stamp_) list.push_back(i);
      scan(list, f, parent, node);
    }
  }

  std::pair<Pending, Pending> partition(const Pending& parent) {
    const int f = parent.split.feature;
    const double thr = parent.split.threshold;
    Pending left, right;
    for (int i : parent.rows) {
      const bool goes_left = x_(i, f) < thr;
      side_[i] = goes_left ? 1 : 2;
      auto& child = goes_left ? left : right;
      child.rows.push_back(i);
      (y_[i] == 1 ? child.w1 : child.w0) += w_[i];
    }
    if (subsample_) return {std::move(left), std::move(right)};
    left.lists.resize(parent.lists.size());
    right.lists.resize(parent.lists.size());
    for (std::size_t g = 0; g < parent.lists.size(); ++g) {
      const auto& src = parent.lists[g];
      if (src.empty()) continue;
      auto& l = left.lists[g];
      auto& r = right.lists[g];
      for (int i : src) (side_[i] == 1 ? l : r).push_back(i);
      const auto fg = static_cast<Eigen::Index>(g);
      if (!l.empty() && x_(l.front(), fg) == x_(l.back(), fg)) l.clear();
      if (!r.empty() && x_(r.front(), fg) == x_(r.back(), fg)) r.clear();
    }
    return {std::move(left), std::move(right)};
  }

  const Eigen::MatrixXd& x_;
  const std::vector<std::vector<int>>& order_;
  std::span<const int> y_;
  std::span<const double> w_;
  TreeParams p_;
  Rng rng_;
  bool subsample_ = false;
  std::vector<char> side_;
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
};

}  // namespace detail

/// Fits a weighted tree on presorted columns. Samples with zero weight are ignored.
inline TreeModel fit_tree(const detail::SortedColumns& cols, std::span<const int> y, std::span<const double> w,
                          const TreeParams& p) {
  if (cols.x.rows() == 0 || y.empty()) fail(Errc::EmptyDataset, "empty dataset");
  if (static_cast<std::size_t>(cols.x.rows()) != y.size() || y.size() != w.size())
    fail(Errc::DimensionMismatch, "tree inputs disagree in length");
  if (p.max_splits < 0) fail(Errc::InvalidParams, "max_splits must be >= 0");
  return detail::TreeGrower(cols, y, w, p).grow();
}

inline TreeModel fit_tree(const Matrix& x, std::span<const int> y, std::span<const double> w, const TreeParams& p) {
  if (x.rows() == 0 || y.empty()) fail(Errc::EmptyDataset, "empty dataset");
  return fit_tree(detail::SortedColumns(x), y, w, p);
}

inline TreeModel train_tree(const Dataset& d, int max_splits) {
  if (d.size() == 0) fail(Errc::EmptyDataset, "empty dataset");
  d.validate();
  const std::vector<double> w(d.size(), 1.0);
  return fit_tree(d.features, d.labels, w, TreeParams{max_splits, 0, 0});
}

}  // namespace lv
