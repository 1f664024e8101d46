#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/ensemble.hpp"
#include "lv/knn.hpp"
#include "lv/lda.hpp"
#include "lv/model.hpp"
#include "lv/svm.hpp"
#include "lv/tree.hpp"

namespace lv {

enum class Family { Tree, Svm, Knn, Ensemble, Lda, Majority };

/// One named learner configuration. `name` is the command-line id, `label`
/// the row title used in result tables.
struct ClassifierSpec {
  std::string name;
  std::string label;
  Family family = Family::Tree;
  int max_splits = 100;
  SvmKernel kernel = SvmKernel::Linear;
  std::optional<GaussianScale> scale{};  // Gaussian presets; sigma then follows P
  double sigma = 0.0;                  // explicit kernel scale, 0 = preset/default
  KnnParams knn{};
  EnsembleKind ensemble = EnsembleKind::BoostedTree;
  int n_learners = 30;
};

namespace detail {

inline ClassifierSpec tree_spec(std::string name, std::string label, int splits) {
  ClassifierSpec s{std::move(name), std::move(label), Family::Tree};
  s.max_splits = splits;
  return s;
}

inline ClassifierSpec svm_spec(std::string name, std::string label, SvmKernel k, std::optional<GaussianScale> scale = {}) {
  ClassifierSpec s{std::move(name), std::move(label), Family::Svm};
  s.kernel = k;
  s.scale = scale;
  return s;
}

inline ClassifierSpec knn_spec(std::string name, std::string label, int k, KnnMetric m, bool weighted = false) {
  ClassifierSpec s{std::move(name), std::move(label), Family::Knn};
  s.knn = {k, m, weighted};
  return s;
}

inline ClassifierSpec ensemble_spec(std::string name, std::string label, EnsembleKind e) {
  ClassifierSpec s{std::move(name), std::move(label), Family::Ensemble};
  s.ensemble = e;
  return s;
}

}  // namespace detail

/// The classifier rows of the results tables, in table order.
inline const std::vector<ClassifierSpec>& table_classifiers() {
  using namespace detail;
  static const std::vector<ClassifierSpec> rows = {
      tree_spec("fine-tree", "Fine Tree", 100),
      tree_spec("medium-tree", "Medium Tree", 20),
      tree_spec("coarse-tree", "Coarse Tree", 4),
      svm_spec("linear-svm", "Linear SVM", SvmKernel::Linear),
      svm_spec("quadratic-svm", "Quadratic SVM", SvmKernel::Quadratic),
      svm_spec("cubic-svm", "Cubic SVM", SvmKernel::Cubic),
      svm_spec("fine-gaussian-svm", "Fine Gaussian SVM", SvmKernel::Gaussian, GaussianScale::Fine),
      svm_spec("medium-gaussian-svm", "Medium Gaussian SVM", SvmKernel::Gaussian, GaussianScale::Medium),
      svm_spec("coarse-gaussian-svm", "Coarse Gaussian SVM", SvmKernel::Gaussian, GaussianScale::Coarse),
      knn_spec("fine-knn", "Fine KNN", 1, KnnMetric::Euclidean),
      knn_spec("medium-knn", "Medium KNN", 10, KnnMetric::Euclidean),
      knn_spec("coarse-knn", "Coarse KNN", 100, KnnMetric::Euclidean),
      knn_spec("cosine-knn", "Cosine KNN", 10, KnnMetric::Cosine),
      knn_spec("cubic-knn", "Cubic KNN", 10, KnnMetric::Minkowski3),
      knn_spec("weighted-knn", "Weighted KNN", 10, KnnMetric::Euclidean, true),
      ensemble_spec("boosted-trees", "Boosted Trees", EnsembleKind::BoostedTree),
      ensemble_spec("bagged-trees", "Bagged Trees", EnsembleKind::BaggedTree),
      ensemble_spec("subspace-discriminant", "Subspace Discriminant", EnsembleKind::SubspaceLda),
      ensemble_spec("subspace-knn", "Subspace KNN", EnsembleKind::SubspaceKnn),
      ensemble_spec("rusboosted-trees", "RUSBoosted Trees", EnsembleKind::RusBoostedTree),
  };
  return rows;
}

/// Every selectable classifier: the table rows plus plain LDA and the majority baseline.
inline const std::vector<ClassifierSpec>& all_classifiers() {
  static const std::vector<ClassifierSpec> all = [] {
    auto v = table_classifiers();
    v.push_back(ClassifierSpec{"lda", "Linear Discriminant", Family::Lda});
    v.push_back(ClassifierSpec{"majority", "Majority", Family::Majority});
    return v;
  }();
  return all;
}

inline std::optional<ClassifierSpec> classifier_by_name(std::string_view name) {
  for (const auto& s : all_classifiers())
    if (s.name == name) return s;
  return std::nullopt;
}

inline std::string classifier_names() {
  std::string out;
  for (const auto& s : all_classifiers()) {
    if (!out.empty()) out += ", ";
    out += s.name;
  }
  return out;
}

/// Trains `spec` on `d`; `seed` feeds the randomized ensembles only.
inline TrainedModel train_classifier(const Dataset& d, const ClassifierSpec& spec, std::uint64_t seed = 0) {
  switch (spec.family) {
    case Family::Tree: return std::make_shared<TreeModel>(train_tree(d, spec.max_splits));
    case Family::Svm: {
      SvmParams p;
      p.kernel = spec.kernel;
      if (spec.sigma > 0.0)
        p.sigma = spec.sigma;
      else if (spec.scale)
        p.sigma = gaussian_sigma(*spec.scale, d.dims());
      return std::make_shared<SvmModel>(train_svm(d, p));
    }
    case Family::Knn: return std::make_shared<KnnModel>(train_knn(d, spec.knn));
    case Family::Ensemble: {
      EnsembleParams p;
      p.n_learners = spec.n_learners;
      p.seed = seed;
      return train_ensemble(d, spec.ensemble, p);
    }
    case Family::Lda: return std::make_shared<LdaModel>(train_lda(d));
    case Family::Majority: return std::make_shared<MajorityModel>(MajorityModel::fit(d));
  }
  fail(Errc::InvalidParams, "unknown classifier family");
}

/// Per-sample scores as CSV: id,label,score,predicted.
inline std::string scores_csv(const Dataset& d, const Vector& scores) {
  std::string out = "id,label,score,predicted\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = scores(static_cast<Eigen::Index>(i));
    out += d.id(i) + "," + std::to_string(d.labels[i]) + "," + format_double(s) + "," + (s > 0.0 ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace lv
