#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lv/ann.hpp"

namespace {

lv::AnnConfig tiny(int x, int g, int o, lv::HiddenActivation h = lv::HiddenActivation::Tansig) {
  lv::AnnConfig c;
  c.input_dim = x;
  c.hidden = g;
  c.output = o;
  c.hidden_activation = h;
  c.output_activation = o == 1 ? lv::OutputActivation::Sigmoid : lv::OutputActivation::Softmax;
  return c;
}

void randomize(lv::AnnNet& net, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  for (double& w : net.params()) w = g(rng);
}

lv::Matrix random_batch(std::uint64_t seed, int n, int x) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  lv::Matrix m(n, x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < x; ++j) m(i, j) = g(rng);
  return m;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST(AnnForward, ZeroWeightsGiveOneHalf) {
  lv::AnnNet net(tiny(4, 3, 1, lv::HiddenActivation::Relu));
  const auto y = net.forward(std::vector<double>{1.0, -2.0, 3.0, 0.5});
  EXPECT_DOUBLE_EQ(y(0), 0.5);
}

TEST(AnnForward, ZeroInputGivesSigmoidOfOutputBias) {
  lv::AnnNet net(tiny(3, 4, 1, lv::HiddenActivation::Relu));
  randomize(net, 1);
  net.b1().setZero();
  const auto y = net.forward(std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_NEAR(y(0), logistic(net.b2()(0)), 1e-15);
}

TEST(AnnForward, MatchesScalarLoops) {
  for (auto act : {lv::HiddenActivation::Relu, lv::HiddenActivation::Tansig}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      lv::AnnNet net(tiny(3, 2, 1, act));
      randomize(net, seed);
      const auto& p = net.params();
      // layout: W1 (2x3 row-major), b1 (2), W2 (1x2), b2 (1)
      const std::vector<double> x = {0.3 * seed - 1.0, 0.7, -0.2 * seed};
      double z = p[10];
      for (int k = 0; k < 2; ++k) {
        double a = p[6 + k];
        for (int j = 0; j < 3; ++j) a += p[3 * k + j] * x[j];
        const double h = act == lv::HiddenActivation::Relu ? (a > 0 ? a : 0.0) : std::tanh(a);
        z += p[8 + k] * h;
      }
      EXPECT_NEAR(net.forward(x)(0), logistic(z), 1e-12);
    }
  }
}

TEST(AnnForward, SoftmaxRowsSumToOne) {
  lv::AnnNet net(tiny(5, 6, 2));
  randomize(net, 3, 2.0);
  const auto y = net.forward(random_batch(4, 30, 5));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    EXPECT_NEAR(y.row(i).sum(), 1.0, 1e-9);
    EXPECT_GT(y(i, 0), 0.0);
    EXPECT_GT(y(i, 1), 0.0);
  }
}

TEST(AnnForward, Errors) {
  lv::AnnNet net(tiny(3, 2, 1));
  try {
    net.forward(std::vector<double>{1.0, 2.0});
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::DimensionMismatch);
  }
  net.params()[0] = std::nan("");
  try {
    net.forward(std::vector<double>{1.0, 2.0, 3.0});
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::NonFiniteWeights);
  }
  auto bad = tiny(3, 2, 1);
  bad.output = 2;  // sigmoid needs a single output
  EXPECT_THROW(lv::AnnNet{bad}, lv::Error);
  bad = tiny(3, 2, 1);
  bad.adam.beta1 = 1.0;
  EXPECT_THROW(bad.validate(), lv::Error);
}

TEST(AnnLoss, HandDerivedChainRuleOneOneOne) {
  lv::AnnNet net(tiny(1, 1, 1));
  auto& p = net.params();  // w1, b1, w2, b2
  p = {0.7, -0.3, 1.9, 0.25};
  const double x = 1.3;
  for (int y : {0, 1}) {
    lv::Matrix xm(1, 1);
    xm(0, 0) = x;
    const std::vector<int> lab = {y};
    const auto lg = net.loss_and_grad(xm, lab);
    const double h = std::tanh(0.7 * x - 0.3);
    const double prob = logistic(1.9 * h + 0.25);
    const double dz = prob - y;
    const double da = dz * 1.9 * (1.0 - h * h);
    EXPECT_NEAR(lg.loss, -(y * std::log(prob) + (1 - y) * std::log(1 - prob)), 1e-10);
    EXPECT_NEAR(lg.grad[0], da * x, 1e-10);
    EXPECT_NEAR(lg.grad[1], da, 1e-10);
    EXPECT_NEAR(lg.grad[2], dz * h, 1e-10);
    EXPECT_NEAR(lg.grad[3], dz, 1e-10);
  }
}

TEST(AnnLoss, GradientMatchesCentralDifferences) {
  std::mt19937_64 shapes(11);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const int x = 1 + static_cast<int>(shapes() % 5);
    const int g = 1 + static_cast<int>(shapes() % 4);
    const int o = trial % 2 ? 2 : 1;
    lv::AnnNet net(tiny(x, g, o));
    randomize(net, 100 + trial, 0.8);
    const auto batch = random_batch(200 + trial, 6, x);
    std::vector<int> labels = {0, 1, 1, 0, 1, 0};
    const auto lg = net.loss_and_grad(batch, labels);
    const double h = 1e-5;
    for (std::size_t k = 0; k < net.params().size(); ++k) {
      const double saved = net.params()[k];
      net.params()[k] = saved + h;
      const double up = net.loss_and_grad(batch, labels).loss;
      net.params()[k] = saved - h;
      const double down = net.loss_and_grad(batch, labels).loss;
      net.params()[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(lg.grad[k]), 1e-8});
      EXPECT_LT(std::abs(fd - lg.grad[k]) / denom, 1e-4) << "trial " << trial << " param " << k;
    }
  }
}

TEST(AnnLoss, DuplicatedBatchKeepsMeanLossAndGradient) {
  lv::AnnNet net(tiny(4, 3, 1, lv::HiddenActivation::Relu));
  randomize(net, 5);
  const auto x = random_batch(6, 5, 4);
  const std::vector<int> y = {1, 0, 0, 1, 1};
  lv::Matrix x2(10, 4);
  x2 << x, x;
  std::vector<int> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const auto a = net.loss_and_grad(x, y), b = net.loss_and_grad(x2, y2);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  for (std::size_t k = 0; k < a.grad.size(); ++k) EXPECT_NEAR(a.grad[k], b.grad[k], 1e-14);
}

TEST(AnnLoss, ConfidentCorrectPredictionsHaveNearZeroLoss) {
  lv::AnnNet net(tiny(1, 1, 1));
  net.params() = {1.0, 0.0, 60.0, 0.0};
  lv::Matrix x(2, 1);
  x << 5.0, -5.0;
  const std::vector<int> y = {1, 0};
  EXPECT_LT(net.loss_and_grad(x, y).loss, 1e-20);
}

TEST(AnnLoss, EmptyBatch) {
  lv::AnnNet net(tiny(2, 2, 1));
  try {
    net.loss_and_grad(lv::Matrix(0, 2), std::vector<int>{});
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::EmptyBatch);
  }
}

TEST(Adam, FirstStepIsLearningRateTimesSign) {
  lv::AdamConfig c;
  c.epsilon = 1e-12;
  std::vector<double> w = {0.0, 1.0, -2.0, 5.0};
  const std::vector<double> g = {3.0, -0.01, 250.0, -7.5};
  lv::AdamState s(w.size());
  adam_step(w, g, s, c);
  const std::vector<double> expect = {-c.lr, 1.0 + c.lr, -2.0 - c.lr, 5.0 + c.lr};
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], expect[i], 1e-9 * c.lr);
  EXPECT_EQ(s.t, 1);
}

TEST(Adam, ZeroGradientKeepsWeights) {
  std::vector<double> w = {0.5, -1.5, 3.0};
  const auto start = w;
  const std::vector<double> g(3, 0.0);
  lv::AdamState s(3);
  for (int i = 0; i < 100; ++i) adam_step(w, g, s, {});
  EXPECT_EQ(w, start);
  EXPECT_EQ(s.t, 100);
}

TEST(Adam, ConstantGradientStepsAreBoundedByLearningRate) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> w(50, 0.0), g(50);
  for (auto& v : g) v = u(rng);
  lv::AdamState s(50);
  lv::AdamConfig c;
  for (int step = 0; step < 2; ++step) {
    const auto before = w;
    adam_step(w, g, s, c);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_LE(std::abs(w[i] - before[i]), c.lr * (1.0 + 1e-12));
  }
}

TEST(Adam, FrozenPrefixAndErrors) {
  std::vector<double> w = {1.0, 2.0, 3.0};
  lv::AdamState s(3);
  adam_step(w, std::vector<double>{1.0, 1.0, 1.0}, s, {}, 2);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], 2.0);
  EXPECT_LT(w[2], 3.0);
  try {
    adam_step(w, std::vector<double>{1.0, std::nan(""), 1.0}, s, {});
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::NonFiniteGradient);
  }
}

TEST(AnnTraining, FrozenHiddenLayerLossIsMonotone) {
  const auto d = fixture::blobs(12, 120, 80, 6, 0.6);
  auto c = tiny(6, 8, 1, lv::HiddenActivation::Relu);
  c.train_hidden = false;
  c.adam.lr = 1e-4;
  c.epochs = 300;
  c.seed = 4;
  const auto run = lv::fit_ann(d, c);
  ASSERT_EQ(run.epoch_loss.size(), 300u);
  for (std::size_t e = 1; e < run.epoch_loss.size(); ++e) EXPECT_LE(run.epoch_loss[e], run.epoch_loss[e - 1]) << e;
}

TEST(AnnTraining, FrozenHiddenLayerKeepsInitialWeights) {
  const auto d = fixture::blobs(13, 40, 40, 3, 1.0);
  auto c = tiny(3, 5, 1);
  c.train_hidden = false;
  c.epochs = 20;
  c.seed = 9;
  const auto run = lv::fit_ann(d, c);
  lv::AnnNet init(c);
  init.initialize(lv::derive_seed(c.seed, "ann-init"));
  const auto& p = run.model->net().params();
  for (std::size_t k = 0; k < 3 * 5 + 5; ++k) EXPECT_EQ(p[k], init.params()[k]);
}

TEST(AnnTraining, SeparableBlobsReachNinetyNinePercent) {
  const auto d = fixture::blobs(21, 300, 300, 8, 3.0);
  lv::AnnConfig c;
  c.hidden = 30;
  c.epochs = 100;
  c.adam.lr = 1e-2;
  c.seed = 1;
  const auto run = lv::train_ann(d, c, 75);
  EXPECT_GE(run.test.accuracy, 0.99);
  EXPECT_EQ(run.epoch_loss.size(), 100u);
}

TEST(AnnTraining, SplitSizes) {
  const auto d = fixture::blobs(3, 1901, 475, 2, 1.0);
  lv::AnnConfig c;
  c.hidden = 2;
  c.epochs = 1;
  const auto run = lv::train_ann(d, c, 75);
  EXPECT_EQ(run.split.test.size(), 594u);
  EXPECT_EQ(run.test.confusion.total(), 594u);
  EXPECT_EQ(run.split.train.size() + run.split.test.size(), 2376u);
  EXPECT_EQ(lv::split_name(85), "85/15");
}

TEST(AnnTraining, SeededTrainingIsReproducible) {
  const auto d = fixture::blobs(8, 60, 60, 4, 1.0);
  lv::AnnConfig c;
  c.hidden = 6;
  c.epochs = 30;
  c.batch_size = 16;
  c.seed = 77;
  const auto a = lv::train_ann(d, c, 80), b = lv::train_ann(d, c, 80);
  EXPECT_EQ(a.model->net().params(), b.model->net().params());
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

TEST(AnnTraining, Errors) {
  const auto d = fixture::blobs(1, 20, 20, 2, 1.0);
  lv::AnnConfig c;
  c.epochs = 1;
  try {
    lv::train_ann(d, c, 60);
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::InvalidParams);
  }
  const auto one = fixture::make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 0});
  try {
    lv::train_ann(one, c, 70);
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::SingleClassDataset);
  }
}

TEST(AnnTraining, SweepCoversTheGrid) {
  const auto d = fixture::blobs(5, 50, 30, 3, 1.5);
  lv::AnnConfig c;
  c.epochs = 5;
  const int hidden[] = {4, 2};
  const int splits[] = {70, 95};
  const auto cells = lv::ann_sweep(d, c, hidden, splits, 2);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].hidden, 4);
  EXPECT_EQ(cells[1].train_percent, 95);
  EXPECT_EQ(cells[3].run.model->net().config().hidden, 2);
}
