#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lv/dataset.hpp"
#include "lv/error.hpp"
#include "lv/model.hpp"
#include "lv/rng.hpp"

namespace lv {

enum class HiddenActivation { Relu, Tansig };
enum class OutputActivation { Sigmoid, Softmax };

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AnnConfig {
  int input_dim = 1600;
  int hidden = 50;
  int output = 1;  // 1 with sigmoid, 2 with softmax
  HiddenActivation hidden_activation = HiddenActivation::Relu;
  OutputActivation output_activation = OutputActivation::Sigmoid;
  AdamConfig adam;
  int epochs = 200;
  int batch_size = 0;  // 0: full batch up to 4096 samples, else 128
  std::uint64_t seed = 0;
  bool standardize = true;
  /// false freezes W1 and b1 (the last layer alone is then a convex problem).
  bool train_hidden = true;

  void validate() const {
    if (input_dim < 1 || hidden < 1 || output < 1) fail(Errc::InvalidParams, "network dimensions must be >= 1");
    if ((output_activation == OutputActivation::Sigmoid) != (output == 1))
      fail(Errc::InvalidParams, "sigmoid output needs o=1, softmax output needs o=2");
    if (output > 2) fail(Errc::InvalidParams, "binary task: o must be 1 or 2");
    if (!(adam.lr > 0.0)) fail(Errc::InvalidParams, "learning rate must be positive");
    if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0) || !(adam.beta2 > 0.0 && adam.beta2 < 1.0))
      fail(Errc::InvalidParams, "Adam betas must lie in (0,1)");
    if (!(adam.epsilon >= 0.0)) fail(Errc::InvalidParams, "Adam epsilon must be non-negative");
    if (epochs < 0 || batch_size < 0) fail(Errc::InvalidParams, "epochs and batch size must be non-negative");
  }

  int batch_for(std::size_t n) const {
    if (batch_size > 0) return batch_size;
    return n <= 4096 ? static_cast<int>(n) : 128;
  }
};

/// Three-layer network y = act2(W2 act1(W1 x + b1) + b2) with every
/// parameter in one flat vector: W1 (g x x, row-major), b1, W2 (o x g), b2.
class AnnNet {
 public:
  using RowMap = Eigen::Map<Matrix>;
  using ConstRowMap = Eigen::Map<const Matrix>;

  explicit AnnNet(const AnnConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    params_.assign(param_count(cfg_), 0.0);
  }

  static std::size_t param_count(const AnnConfig& c) {
    const auto x = static_cast<std::size_t>(c.input_dim), g = static_cast<std::size_t>(c.hidden),
               o = static_cast<std::size_t>(c.output);
    return g * x + g + o * g + o;
  }

  const AnnConfig& config() const noexcept { return cfg_; }
  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }

  RowMap w1() { return RowMap(params_.data(), cfg_.hidden, cfg_.input_dim); }
  Eigen::Map<Vector> b1() { return {params_.data() + off_b1(), cfg_.hidden}; }
  RowMap w2() { return RowMap(params_.data() + off_w2(), cfg_.output, cfg_.hidden); }
  Eigen::Map<Vector> b2() { return {params_.data() + off_b2(), cfg_.output}; }
  ConstRowMap w1() const { return ConstRowMap(params_.data(), cfg_.hidden, cfg_.input_dim); }
  Eigen::Map<const Vector> b1() const { return {params_.data() + off_b1(), cfg_.hidden}; }
  ConstRowMap w2() const { return ConstRowMap(params_.data() + off_w2(), cfg_.output, cfg_.hidden); }
  Eigen::Map<const Vector> b2() const { return {params_.data() + off_b2(), cfg_.output}; }

  /// Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed) {
    Rng rng(seed);
    std::fill(params_.begin(), params_.end(), 0.0);
    auto fill = [&](RowMap w) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
    };
    fill(w1());
    fill(w2());
  }

  /// Network outputs for each input row (already preprocessed).
  Matrix forward(const Matrix& x) const {
    if (x.cols() != cfg_.input_dim)
      fail(Errc::DimensionMismatch,
           "network expects " + std::to_string(cfg_.input_dim) + " inputs, got " + std::to_string(x.cols()));
    for (double v : params_)
      if (!std::isfinite(v)) fail(Errc::NonFiniteWeights, "network has non-finite weights");
    Matrix h = hidden_act(pre_hidden(x));
    return output_act((h * w2().transpose()).rowwise() + b2().transpose());
  }

  Vector forward(std::span<const double> x) const {
    Matrix row(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
    return forward(row).row(0).transpose();
  }

  /// Defect probability per row: the sigmoid output, or the class-1 softmax output.
  Vector defect_probability(const Matrix& x) const {
    const Matrix y = forward(x);
    return y.col(y.cols() - 1);
  }

  struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // same layout as params()
  };

  /// Mean cross-entropy over the batch and its gradient by backpropagation.
  LossGrad loss_and_grad(const Matrix& x, std::span<const int> labels) const {
    if (x.rows() == 0 || labels.empty()) fail(Errc::EmptyBatch, "empty batch");
    if (static_cast<std::size_t>(x.rows()) != labels.size()) fail(Errc::DimensionMismatch, "batch rows and labels differ");
    if (x.cols() != cfg_.input_dim) fail(Errc::DimensionMismatch, "batch width does not match the network input");
    const auto n = static_cast<double>(x.rows());
    const Matrix a = pre_hidden(x);
    const Matrix h = hidden_act(a);
    const Matrix z = (h * w2().transpose()).rowwise() + b2().transpose();

    LossGrad out;
    Matrix dz(z.rows(), z.cols());
    if (cfg_.output_activation == OutputActivation::Sigmoid) {
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double zi = z(i, 0);
        const double y = labels[static_cast<std::size_t>(i)];
        // log(1 + e^z) - y z, written to stay finite for large |z|
        out.loss += std::max(zi, 0.0) + std::log1p(std::exp(-std::abs(zi))) - y * zi;
        dz(i, 0) = sigmoid(zi) - y;
      }
    } else {
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double m = z.row(i).maxCoeff();
        const double lse = m + std::log((z.row(i).array() - m).exp().sum());
        const int y = labels[static_cast<std::size_t>(i)];
        out.loss += lse - z(i, y);
        for (Eigen::Index k = 0; k < z.cols(); ++k) dz(i, k) = std::exp(z(i, k) - lse) - (k == y ? 1.0 : 0.0);
      }
    }
    out.loss /= n;
    dz /= n;

    out.grad.assign(params_.size(), 0.0);
    const auto g = cfg_.hidden, o = cfg_.output, in = cfg_.input_dim;
    RowMap(out.grad.data() + off_w2(), o, g) = dz.transpose() * h;
    Eigen::Map<Vector>(out.grad.data() + off_b2(), o) = dz.colwise().sum().transpose();
    Matrix dh = dz * w2();
    if (cfg_.hidden_activation == HiddenActivation::Relu)
      dh.array() *= (a.array() > 0.0).cast<double>();
    else
      dh.array() *= 1.0 - h.array().square();
    RowMap(out.grad.data(), g, in) = dh.transpose() * x;
    Eigen::Map<Vector>(out.grad.data() + off_b1(), g) = dh.colwise().sum().transpose();
    return out;
  }

  static double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }

 private:
  std::size_t off_b1() const noexcept { return static_cast<std::size_t>(cfg_.hidden) * cfg_.input_dim; }
  std::size_t off_w2() const noexcept { return off_b1() + static_cast<std::size_t>(cfg_.hidden); }
  std::size_t off_b2() const noexcept { return off_w2() + static_cast<std::size_t>(cfg_.output) * cfg_.hidden; }

  Matrix pre_hidden(const Matrix& x) const { return (x * w1().transpose()).rowwise() + b1().transpose(); }

  Matrix hidden_act(const Matrix& a) const {
    if (cfg_.hidden_activation == HiddenActivation::Relu) return a.array().max(0.0).matrix();
    return a.array().tanh().matrix();
  }

  Matrix output_act(const Matrix& z) const {
    Matrix y(z.rows(), z.cols());
    if (cfg_.output_activation == OutputActivation::Sigmoid) {
      for (Eigen::Index i = 0; i < z.rows(); ++i) y(i, 0) = sigmoid(z(i, 0));
      return y;
    }
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double m = z.row(i).maxCoeff();
      y.row(i) = (z.row(i).array() - m).exp();
      y.row(i) /= y.row(i).sum();
    }
    return y;
  }

  AnnConfig cfg_;
  std::vector<double> params_;
};

struct AdamState {
  std::vector<double> m, v;
  long t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update of `w` in place. Components whose index
/// is below `frozen` are left untouched.
inline void adam_step(std::span<double> w, std::span<const double> grad, AdamState& s, const AdamConfig& c,
                      std::size_t frozen = 0) {
  if (grad.size() != w.size() || s.m.size() != w.size()) fail(Errc::DimensionMismatch, "Adam state size mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) fail(Errc::NonFiniteGradient, "non-finite gradient component");
  ++s.t;
  const double c1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.t));
  for (std::size_t i = frozen; i < w.size(); ++i) {
    s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * grad[i];
    s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double mhat = s.m[i] / c1;
    const double vhat = s.v[i] / c2;
    w[i] -= c.lr * mhat / (std::sqrt(vhat) + c.epsilon);
  }
}

/// Fitted network plus the input standardization learned on its training split.
class AnnModel final : public Model {
 public:
  AnnModel(Standardizer st, AnnNet net) : st_(std::move(st)), net_(std::move(net)) {}

  ModelKind kind() const noexcept override { return ModelKind::Ann; }
  Eigen::Index dims() const noexcept override { return net_.config().input_dim; }
  const AnnNet& net() const noexcept { return net_; }
  const Standardizer& standardizer() const noexcept { return st_; }

  void save_body(BlobWriter& w) const override {
    const auto& c = net_.config();
    write_standardizer(w, st_);
    w.u32(static_cast<std::uint32_t>(c.input_dim));
    w.u32(static_cast<std::uint32_t>(c.hidden));
    w.u32(static_cast<std::uint32_t>(c.output));
    w.u32(c.hidden_activation == HiddenActivation::Relu ? 0 : 1);
    Vector p = Eigen::Map<const Vector>(net_.params().data(), static_cast<Eigen::Index>(net_.params().size()));
    w.vec(p);
  }

  static AnnModel load_body(BlobReader& r) {
    auto st = read_standardizer(r);
    AnnConfig c;
    c.input_dim = static_cast<int>(r.u32());
    c.hidden = static_cast<int>(r.u32());
    c.output = static_cast<int>(r.u32());
    c.output_activation = c.output == 2 ? OutputActivation::Softmax : OutputActivation::Sigmoid;
    c.hidden_activation = r.u32() == 0 ? HiddenActivation::Relu : HiddenActivation::Tansig;
    AnnNet net(c);
    const Vector p = r.vec();
    if (static_cast<std::size_t>(p.size()) != net.params().size() || st.mean.size() != c.input_dim)
      fail(Errc::CorruptData, "network payload shape mismatch");
    std::copy(p.data(), p.data() + p.size(), net.params().begin());
    return AnnModel(std::move(st), std::move(net));
  }

 protected:
  Vector score_rows(const Matrix& x) const override {
    return (net_.defect_probability(st_.apply(x)).array() - 0.5).matrix();
  }

 private:
  Standardizer st_;
  AnnNet net_;
};

/// Identity transform for unstandardized inputs.
inline Standardizer identity_standardizer(Eigen::Index dims) {
  return Standardizer{Vector::Zero(dims), Vector::Ones(dims)};
}

}  // namespace lv
