#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/model.hpp"

namespace lv {

enum class SvmKernel : std::uint32_t { Linear = 0, Quadratic = 1, Cubic = 2, Gaussian = 3 };

struct SvmParams {
  SvmKernel kernel = SvmKernel::Gaussian;
  /// Kernel scale sigma. Non-positive means sqrt(P) (the polynomial default).
  double sigma = 0.0;
  double c = 1.0;
  double tolerance = 1e-3;
  long max_iterations = 1'000'000;
  /// Kernel matrices with at most this many entries are precomputed.
  std::size_t cache_entries = std::size_t{1} << 26;
};

/// Gaussian kernel scale for the fine / medium / coarse presets.
enum class GaussianScale { Fine, Medium, Coarse };

inline double gaussian_sigma(GaussianScale s, Eigen::Index predictors) {
  const double root = std::sqrt(static_cast<double>(predictors));
  switch (s) {
    case GaussianScale::Fine: return root / 4.0;
    case GaussianScale::Medium: return root;
    case GaussianScale::Coarse: return 4.0 * root;
  }
  return root;
}

namespace detail {

// Kernel block between the rows of a and b (both already standardized).
inline Matrix kernel_block(const Matrix& a, const Matrix& b, SvmKernel k, double sigma) {
  Matrix g = a * b.transpose();
  switch (k) {
    case SvmKernel::Linear: return g;
    case SvmKernel::Quadratic: return (1.0 + g.array() / (sigma * sigma)).square().matrix();
    case SvmKernel::Cubic: return (1.0 + g.array() / (sigma * sigma)).cube().matrix();
    case SvmKernel::Gaussian: {
      const Vector na = a.rowwise().squaredNorm();
      const Vector nb = b.rowwise().squaredNorm();
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
          g(i, j) = std::exp(-std::max(0.0, na(i) + nb(j) - 2.0 * g(i, j)) / (sigma * sigma));
      return g;
    }
  }
  return g;
}

}  // namespace detail

/// Soft-margin SVM in dual form: f(x) = sum coef_i K(sv_i, x) + b with coef_i = alpha_i y_i.
class SvmModel final : public Model {
 public:
  SvmModel(Standardizer st, SvmKernel kernel, double sigma, Matrix support, Vector coef, double bias)
      : st_(std::move(st)), kernel_(kernel), sigma_(sigma), support_(std::move(support)), coef_(std::move(coef)),
        bias_(bias) {}

  ModelKind kind() const noexcept override { return ModelKind::Svm; }
  Eigen::Index dims() const noexcept override { return st_.mean.size(); }

  SvmKernel kernel() const noexcept { return kernel_; }
  double sigma() const noexcept { return sigma_; }
  double bias() const noexcept { return bias_; }
  const Matrix& support_vectors() const noexcept { return support_; }
  const Vector& coefficients() const noexcept { return coef_; }

  /// Fitted dual state, kept for diagnostics only (not serialized).
  struct Dual {
    Vector alpha;
    std::vector<int> y;  // +1 defect, -1 clean
    long iterations = 0;
    double gap = 0.0;
  };
  const Dual& dual() const noexcept { return dual_; }
  void set_dual(Dual d) { dual_ = std::move(d); }

  void save_body(BlobWriter& w) const override {
    write_standardizer(w, st_);
    w.u32(static_cast<std::uint32_t>(kernel_));
    w.f64(sigma_);
    w.mat(support_);
    w.vec(coef_);
    w.f64(bias_);
  }

  static SvmModel load_body(BlobReader& r) {
    auto st = read_standardizer(r);
    const auto k = r.u32();
    if (k > 3) fail(Errc::CorruptData, "unknown SVM kernel tag");
    const double sigma = r.f64();
    Matrix sv = r.mat();
    Vector coef = r.vec();
    const double b = r.f64();
    if (sv.rows() != coef.size() || (sv.rows() > 0 && sv.cols() != st.mean.size()))
      fail(Errc::CorruptData, "SVM support shape mismatch");
    return SvmModel(std::move(st), static_cast<SvmKernel>(k), sigma, std::move(sv), std::move(coef), b);
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    if (support_.rows() == 0) return Vector::Constant(x.rows(), bias_);
    const Matrix z = st_.apply(x);
    return (detail::kernel_block(z, support_, kernel_, sigma_) * coef_).array() + bias_;
  }

 private:
  Standardizer st_;
  SvmKernel kernel_;
  double sigma_;
  Matrix support_;
  Vector coef_;
  double bias_;
  Dual dual_;
};

namespace detail {

// Supplies kernel columns, either from a precomputed matrix or on demand.
class KernelSource {
 public:
  KernelSource(const Matrix& z, SvmKernel k, double sigma, bool precompute) : z_(z), k_(k), sigma_(sigma) {
    if (precompute) full_ = kernel_block(z, z, k, sigma);
    diag_.resize(z.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      diag_(i) = precompute ? full_(i, i) : kernel_block(z.row(i), z.row(i), k, sigma)(0, 0);
  }

  double diag(Eigen::Index i) const { return diag_(i); }

  // Columns i and j of the kernel matrix.
  void columns(Eigen::Index i, Eigen::Index j, Vector& ci, Vector& cj) {
    if (full_.size() > 0) {
      ci = full_.col(i);
      cj = full_.col(j);
      return;
    }
    Matrix pair(2, z_.cols());
    pair.row(0) = z_.row(i);
    pair.row(1) = z_.row(j);
    const Matrix k = kernel_block(z_, pair, k_, sigma_);
    ci = k.col(0);
    cj = k.col(1);
  }

 private:
  const Matrix& z_;
  SvmKernel k_;
  double sigma_;
  Matrix full_;
  Vector diag_;
};

}  // namespace detail

/// SMO with maximal-violating-pair working-set selection. Stops when the
/// KKT gap m(alpha) - M(alpha) drops below the tolerance.
inline SvmModel train_svm(const Dataset& d, const SvmParams& p) {
  d.require_both_classes();
  if (!(p.c > 0.0)) fail(Errc::InvalidParams, "SVM box constraint must be positive");
  if (!(p.tolerance > 0.0)) fail(Errc::InvalidParams, "SVM tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(d.size());
  const double sigma = p.sigma > 0.0 ? p.sigma : std::sqrt(static_cast<double>(d.dims()));

  auto st = Standardizer::fit(d.features);
  const Matrix z = st.apply(d.features);
  detail::KernelSource ks(z, p.kernel, sigma, static_cast<std::size_t>(n) * static_cast<std::size_t>(n) <= p.cache_entries);

  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) y[i] = d.labels[i] == 1 ? 1 : -1;
  const double c = p.c;
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of 0.5 a'Qa - e'a

  auto in_up = [&](Eigen::Index t) { return (y[t] == 1 && alpha(t) < c) || (y[t] == -1 && alpha(t) > 0.0); };
  auto in_low = [&](Eigen::Index t) { return (y[t] == -1 && alpha(t) < c) || (y[t] == 1 && alpha(t) > 0.0); };

  long iter = 0;
  double gap = 0.0;
  Vector ki, kj;
  while (true) {
    double m_up = -std::numeric_limits<double>::infinity(), m_low = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad(t);
      if (in_up(t) && v > m_up) m_up = v, i = t;
      if (in_low(t) && v < m_low) m_low = v, j = t;
    }
    gap = m_up - m_low;
    if (i < 0 || j < 0 || gap < p.tolerance) break;
    if (iter >= p.max_iterations)
      fail(Errc::NonConvergence, "SMO did not reach tolerance within " + std::to_string(p.max_iterations) + " iterations");
    ++iter;

    ks.columns(i, j, ki, kj);
    double curvature = ks.diag(i) + ks.diag(j) - 2.0 * ki(j);
    if (curvature <= 1e-12) curvature = 1e-12;
    double step = gap / curvature;
    const double room_i = y[i] == 1 ? c - alpha(i) : alpha(i);
    const double room_j = y[j] == 1 ? alpha(j) : c - alpha(j);
    const bool clip_i = step >= room_i, clip_j = step >= room_j;
    step = std::min({step, room_i, room_j});

    alpha(i) += y[i] * step;
    alpha(j) -= y[j] * step;
    // Snap to the bounds so set membership is exact.
    if (clip_i && step == room_i) alpha(i) = y[i] == 1 ? c : 0.0;
    if (clip_j && step == room_j) alpha(j) = y[j] == 1 ? 0.0 : c;
    for (Eigen::Index t = 0; t < n; ++t) grad(t) += y[t] * step * (ki(t) - kj(t));
  }

  // Bias from the free support vectors, else the middle of the feasible interval.
  double b_sum = 0.0;
  int free = 0;
  double m_up = -std::numeric_limits<double>::infinity(), m_low = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double v = -y[t] * grad(t);
    if (alpha(t) > 0.0 && alpha(t) < c) b_sum += v, ++free;
    if (in_up(t)) m_up = std::max(m_up, v);
    if (in_low(t)) m_low = std::min(m_low, v);
  }
  double bias = 0.0;
  if (free > 0)
    bias = b_sum / free;
  else if (std::isfinite(m_up) && std::isfinite(m_low))
    bias = (m_up + m_low) / 2.0;
  else
    bias = std::isfinite(m_up) ? m_up : m_low;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 0.0) sv.push_back(t);
  Matrix support(static_cast<Eigen::Index>(sv.size()), z.cols());
  Vector coef(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    support.row(static_cast<Eigen::Index>(k)) = z.row(sv[k]);
    coef(static_cast<Eigen::Index>(k)) = alpha(sv[k]) * y[sv[k]];
  }
  SvmModel model(std::move(st), p.kernel, sigma, std::move(support), std::move(coef), bias);
  model.set_dual({std::move(alpha), std::move(y), iter, gap});
  return model;
}

}  // namespace lv
