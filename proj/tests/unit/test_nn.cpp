#include <gtest/gtest.h>

#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/nn.hpp"
#include "amtd/optim.hpp"

using namespace amtd;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -1.0, 1.0);
  return m;
}

// Plain loops over the flat parameter layout, independent of the Eigen maps in Network.
Matrix hand_forward(const Network& net, const Matrix& x) {
  Matrix h = x;
  std::size_t offset = 0;
  const auto p = net.params();
  for (const auto& layer : net.layers()) {
    Matrix z(static_cast<Eigen::Index>(layer.out), h.cols());
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      for (std::size_t o = 0; o < layer.out; ++o) {
        double acc = p[offset + layer.out * layer.in + o];
        for (std::size_t i = 0; i < layer.in; ++i) acc += p[offset + i * layer.out + o] * h(static_cast<Eigen::Index>(i), c);
        z(static_cast<Eigen::Index>(o), c) = acc;
      }
    }
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      double total = 0.0;
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        double& v = z(r, c);
        switch (layer.activation) {
          case Activation::identity: break;
          case Activation::relu: v = v > 0.0 ? v : 0.0; break;
          case Activation::tanh: v = std::tanh(v); break;
          case Activation::softmax: v = std::exp(v); total += v; break;
        }
      }
      if (layer.activation == Activation::softmax) z.col(c) /= total;
    }
    offset += layer.out * layer.in + layer.out;
    h = z;
  }
  return h;
}

}  // namespace

TEST(Network, IdentityLayerPassesInputThrough) {
  Network net({{2, 2, Activation::identity}});
  net.weight(0) = Matrix::Identity(2, 2);
  Matrix x(2, 1);
  x << 1, 2;
  const Matrix y = net.forward(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(y(1, 0), 2.0);
}

TEST(Network, ReluClampsNegativePreactivation) {
  Network net({{1, 1, Activation::relu}});
  net.weight(0)(0, 0) = 2.0;
  net.bias(0)[0] = 1.0;
  EXPECT_EQ(net.forward(Matrix::Constant(1, 1, -3.0))(0, 0), 0.0);
}

TEST(Network, ForwardMatchesHandRolledOracle) {
  Rng rng(3);
  for (Activation out : {Activation::identity, Activation::tanh, Activation::softmax}) {
    Network net = Network::mlp({5, 7, 4}, Activation::relu, out);
    net.init_uniform(rng);
    const Matrix x = random_matrix(5, 6, rng);
    const Matrix got = net.forward(x);
    const Matrix want = hand_forward(net, x);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Network, TensorForwardUsesRowBatches) {
  Rng rng(5);
  Network net = Network::mlp({3, 4, 2}, Activation::tanh, Activation::identity);
  net.init_uniform(rng);
  const Tensor x({2, 3}, {0.1, 0.2, 0.3, -0.4, 0.5, -0.6});
  const Tensor y = net.forward(x);
  ASSERT_EQ(y.shape(), (std::vector<std::size_t>{2, 2}));
  const Matrix cols = net.forward(x.to_columns());
  EXPECT_DOUBLE_EQ(y[2], cols(0, 1));
}

TEST(Network, ShapeMismatchThrows) {
  Network net = Network::mlp({3, 2}, Activation::relu, Activation::identity);
  EXPECT_THROW(net.forward(Matrix::Zero(4, 1)), DimensionError);
  EXPECT_THROW(Network({{3, 2, Activation::relu}, {3, 1, Activation::identity}}), DimensionError);
  EXPECT_THROW(Network({{3, 2, Activation::softmax}, {2, 1, Activation::identity}}), DimensionError);
}

TEST(Network, BackwardOfSquareLoss) {
  // L = theta^2 with theta the bias of a 1x1 identity layer on zero input.
  Network net({{1, 1, Activation::identity}});
  net.bias(0)[0] = 3.0;
  GradTape tape;
  const Matrix y = net.forward(Matrix::Zero(1, 1), tape);
  const auto g = net.backward(tape, 2.0 * y);
  EXPECT_DOUBLE_EQ(g[1], 6.0);
}

TEST(Network, LinearLossGradientIsInput) {
  Network net({{3, 1, Activation::identity}});
  Matrix x(3, 1);
  x << 0.5, -2.0, 4.0;
  GradTape tape;
  net.forward(x, tape);
  const auto g = net.backward(tape, Matrix::Ones(1, 1));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(g[static_cast<std::size_t>(i)], x(i, 0));
}

TEST(Network, BackwardMatchesFiniteDifferences) {
  Rng rng(11);
  for (Activation out : {Activation::identity, Activation::tanh, Activation::softmax}) {
    Network net = Network::mlp({4, 6, 3}, Activation::tanh, out);
    net.init_uniform(rng);
    const Matrix x = random_matrix(4, 3, rng);
    const Matrix w = random_matrix(3, 3, rng);
    GradTape tape;
    net.forward(x, tape);
    const auto g = net.backward(tape, w);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < net.num_params(); ++i) {
      auto p = net.params();
      const double keep = p[i];
      p[i] = keep + h;
      const double up = (net.forward(x).array() * w.array()).sum();
      p[i] = keep - h;
      const double down = (net.forward(x).array() * w.array()).sum();
      p[i] = keep;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(std::abs(fd) + std::abs(g[i]), 1e-6));
    }
    EXPECT_LT(worst, 1e-4);
  }
}

TEST(Network, LogitGradientSkipsSoftmax) {
  Rng rng(2);
  Network net = Network::mlp({2, 3}, Activation::relu, Activation::softmax);
  net.init_uniform(rng);
  const Matrix x = random_matrix(2, 1, rng);
  GradTape tape;
  net.forward(x, tape);
  const Matrix dz = random_matrix(3, 1, rng);
  const auto g = net.backward(tape, dz, GradientOf::output_logits);
  // Bias gradient of the only layer equals the logit gradient.
  for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(g[6 + static_cast<std::size_t>(k)], dz(k, 0));
}

TEST(Network, EmptyTapeIsUsageError) {
  Network net = Network::mlp({2, 1}, Activation::relu, Activation::identity);
  GradTape tape;
  EXPECT_THROW(net.backward(tape, Matrix::Zero(1, 1)), UsageError);
}

TEST(Optimizer, SgdStep) {
  Optimizer opt(OptimizerKind::sgd, 0.1, 1);
  std::vector<double> theta{1.0};
  const std::vector<double> g{2.0};
  opt.step(theta, g);
  EXPECT_NEAR(theta[0], 0.8, 1e-15);
  EXPECT_EQ(opt.step_count(), 1u);
}

TEST(Optimizer, AdamFirstStepHasLearningRateMagnitude) {
  for (double c : {1e-3, 1.0, 50.0}) {
    Optimizer opt(OptimizerKind::adam, 1e-3, 1);
    std::vector<double> theta{0.0};
    const std::vector<double> g{c};
    opt.step(theta, g);
    EXPECT_NEAR(theta[0], -1e-3, 1e-8);
  }
}

TEST(Optimizer, ZeroGradientLeavesParameters) {
  for (auto kind : {OptimizerKind::sgd, OptimizerKind::adam}) {
    Optimizer opt(kind, 0.5, 2);
    std::vector<double> theta{1.5, -2.0};
    const std::vector<double> g{0.0, 0.0};
    opt.step(theta, g);
    EXPECT_EQ(theta[0], 1.5);
    EXPECT_EQ(theta[1], -2.0);
  }
}

TEST(Optimizer, NonFiniteGradientThrows) {
  Optimizer opt(OptimizerKind::adam, 0.1, 1);
  std::vector<double> theta{1.0};
  const std::vector<double> g{std::nan("")};
  EXPECT_THROW(opt.step(theta, g), NumericError);
  EXPECT_EQ(theta[0], 1.0);
}

TEST(SoftUpdate, TauOneCopies) {
  Rng rng(1);
  Network a = Network::mlp({3, 2}, Activation::relu, Activation::identity);
  Network b = a;
  a.init_uniform(rng);
  soft_update(b, a, 1.0);
  EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
}

TEST(SoftUpdate, HalfwayAndGeometricContraction) {
  Network online({{1, 1, Activation::identity}});
  Network target = online;
  online.weight(0)(0, 0) = 2.0;
  online.bias(0)[0] = 2.0;
  soft_update(target, online, 0.5);
  EXPECT_DOUBLE_EQ(target.bias(0)[0], 1.0);
  double gap = 1.0;
  for (int i = 0; i < 20; ++i) {
    soft_update(target, online, 0.1);
    const double now = std::abs(target.bias(0)[0] - 2.0);
    EXPECT_NEAR(now, 0.9 * gap, 1e-12);
    gap = now;
  }
}

TEST(SoftUpdate, ShapeMismatchThrows) {
  Network a = Network::mlp({3, 2}, Activation::relu, Activation::identity);
  Network b = Network::mlp({3, 3}, Activation::relu, Activation::identity);
  EXPECT_THROW(soft_update(b, a, 0.5), DimensionError);
  EXPECT_THROW(soft_update(a, a, 0.0), DomainError);
}

TEST(Tensor, RejectsBadShapesAndNonFinite) {
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), DimensionError);
  EXPECT_THROW(Tensor({1}, {std::nan("")}), NumericError);
}

TEST(Checksum, OrderSensitive) {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{2.0, 1.0};
  EXPECT_NE(checksum(a), checksum(b));
  EXPECT_EQ(checksum(a), checksum(std::vector<double>{1.0, 2.0}));
}
