#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/model.hpp"

namespace lv {

/// Two-class linear discriminant on z-scored features:
/// score(x) = w.z + w0, w = (S + gamma I)^-1 (mu1 - mu0).
class LdaModel final : public Model {
 public:
  LdaModel(Standardizer st, Vector w, double w0) : st_(std::move(st)), w_(std::move(w)), w0_(w0) {}

  ModelKind kind() const noexcept override { return ModelKind::Lda; }
  Eigen::Index dims() const noexcept override { return st_.mean.size(); }
  const Vector& weights() const noexcept { return w_; }
  double offset() const noexcept { return w0_; }
  const Standardizer& standardizer() const noexcept { return st_; }

  void save_body(BlobWriter& w) const override {
    write_standardizer(w, st_);
    w.vec(w_);
    w.f64(w0_);
  }

  static LdaModel load_body(BlobReader& r) {
    auto st = read_standardizer(r);
    Vector w = r.vec();
    const double w0 = r.f64();
    if (w.size() != st.mean.size()) fail(Errc::CorruptData, "LDA weight length mismatch");
    return LdaModel(std::move(st), std::move(w), w0);
  }

 protected:
  Vector score_rows(const Matrix& x) const override { return (st_.apply(x) * w_).array() + w0_; }

 private:
  Standardizer st_;
  Vector w_;
  double w0_;
};

namespace detail {

/// Sufficient statistics of a standardized training set, so that subspace
/// learners can take principal submatrices instead of refitting.
struct LdaStats {
  Standardizer st;
  Vector mu0, mu1;  // class means in z-space
  Matrix pooled;    // within-class covariance, divisor n - 2
  std::size_t n0 = 0, n1 = 0;

  static LdaStats fit(const Dataset& d) {
    d.require_both_classes();
    LdaStats s;
    s.st = Standardizer::fit(d.features);
    Matrix z = s.st.apply(d.features);
    const auto p = z.cols();
    s.mu0 = Vector::Zero(p);
    s.mu1 = Vector::Zero(p);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto row = z.row(static_cast<Eigen::Index>(i)).transpose();
      if (d.labels[i] == 1)
        s.mu1 += row, ++s.n1;
      else
        s.mu0 += row, ++s.n0;
    }
    s.mu0 /= static_cast<double>(s.n0);
    s.mu1 /= static_cast<double>(s.n1);
    for (std::size_t i = 0; i < d.size(); ++i)
      z.row(static_cast<Eigen::Index>(i)) -= (d.labels[i] == 1 ? s.mu1 : s.mu0).transpose();
    const double dof = std::max(1.0, static_cast<double>(d.size()) - 2.0);
    s.pooled = Matrix::Zero(p, p);
    s.pooled.template selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / dof);
    s.pooled.template triangularView<Eigen::StrictlyUpper>() = s.pooled.transpose();
    return s;
  }

  /// LDA restricted to the given feature columns (all columns when empty).
  LdaModel model(std::span<const int> cols = {}) const {
    const auto p = cols.empty() ? mu0.size() : static_cast<Eigen::Index>(cols.size());
    auto col = [&](Eigen::Index j) { return cols.empty() ? j : static_cast<Eigen::Index>(cols[j]); };
    Matrix cov(p, p);
    Vector diff(p), mid(p);
    Standardizer sub;
    sub.mean.resize(p);
    sub.scale.resize(p);
    for (Eigen::Index a = 0; a < p; ++a) {
      diff(a) = mu1(col(a)) - mu0(col(a));
      mid(a) = (mu1(col(a)) + mu0(col(a))) / 2.0;
      sub.mean(a) = st.mean(col(a));
      sub.scale(a) = st.scale(col(a));
      for (Eigen::Index b = 0; b < p; ++b) cov(a, b) = pooled(col(a), col(b));
    }
    const double trace = cov.trace();
    const double gamma = trace > 0.0 ? 1e-6 * trace / static_cast<double>(p) : 1e-6;
    cov.diagonal().array() += gamma;
    Eigen::LDLT<Matrix> ldlt(cov);
    if (ldlt.info() != Eigen::Success) fail(Errc::InvalidParams, "pooled covariance not invertible");
    Vector w = ldlt.solve(diff);
    const double w0 = -w.dot(mid) + std::log(static_cast<double>(n1) / static_cast<double>(n0));
    return LdaModel(std::move(sub), std::move(w), w0);
  }
};

}  // namespace detail

inline LdaModel train_lda(const Dataset& d) { return detail::LdaStats::fit(d).model(); }

}  // namespace lv
