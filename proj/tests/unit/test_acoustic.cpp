// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "vb/acoustic/f0_model.hpp"
#include "vb/acoustic/gan.hpp"
#include "vb/acoustic/models.hpp"
#include "vb/acoustic/training.hpp"
#include "vb/common/error.hpp"
#include "vb/nn/optimizer.hpp"

using namespace vb::acoustic;
using vb::Matrix;
namespace nn = vb::nn;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

nn::Network small_net(std::size_t in, std::size_t out, std::uint64_t seed) {
  AcousticNetConfig cfg{8, 1, 4, 4};
  auto net = make_acoustic_network(in, out, cfg);
  net.init(seed);
  return net;
}

// Direct product of per-dimension unit-variance normal densities.
double density_oracle(const Matrix& h, const Matrix& a) {
  double nll = 0.0;
  for (std::size_t n = 0; n < h.rows(); ++n) {
    double p = 1.0;
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const double e = a(n, j) - h(n, j);
      p *= std::exp(-0.5 * e * e) / std::sqrt(2.0 * std::numbers::pi);
    }
    nll -= std::log(p);
  }
  return nll;
}

double column_variance(const Matrix& m, std::size_t j) {
  double mean = 0.0, var = 0.0;
  for (std::size_t t = 0; t < m.rows(); ++t) mean += m(t, j);
  mean /= m.rows();
  for (std::size_t t = 0; t < m.rows(); ++t) var += (m(t, j) - mean) * (m(t, j) - mean);
  return var / m.rows();
}

}  // namespace

TEST_CASE("rnn_nll definition") {
  auto net = small_net(3, 2, 1);
  const Matrix l = vbtest::random_matrix(6, 3, 2);
  const Matrix h = rnn_generate(net, l);
  CHECK(rnn_nll(net, l, h) == doctest::Approx(6 * 1.0 * kLog2Pi).epsilon(1e-14));
  Matrix a = h;
  a(2, 1) += 1.0;
  CHECK(rnn_nll(net, l, a) - rnn_nll(net, l, h) == doctest::Approx(0.5).epsilon(1e-12));
  const Matrix r = vbtest::random_matrix(6, 2, 3);
  CHECK(rnn_nll(net, l, r) == doctest::Approx(density_oracle(h, r)).epsilon(1e-8));
  CHECK_THROWS_AS(rnn_nll(net, l, Matrix(6, 3)), vb::ShapeError);
  CHECK_THROWS_AS(rnn_nll(net, l, Matrix(5, 2)), vb::ShapeError);
}

TEST_CASE("rnn_generate: zero weights give biases, repeated calls are identical") {
  auto net = small_net(3, 2, 4);
  const Matrix l = vbtest::random_matrix(5, 3, 5);
  CHECK(rnn_generate(net, l) == rnn_generate(net, l));
  for (auto* p : net.params()) p->value.fill(0.0);
  auto& head = dynamic_cast<nn::Linear&>(net.layer(net.size() - 1));
  head.bias().value(0, 0) = 0.7;
  head.bias().value(0, 1) = -0.2;
  const Matrix y = rnn_generate(net, l);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(y(n, 0) == 0.7);
    CHECK(y(n, 1) == -0.2);
  }
}

TEST_CASE("rnn overfits one utterance") {
  // 40 frames, 3 phone classes with positions; target is a smooth function.
  const std::size_t N = 40;
  Matrix l(N, 4), a(N, 3);
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t ph = n * 3 / N;
    l(n, ph) = 1.0;
    l(n, 3) = static_cast<double>(n % 14) / 14.0;
    for (std::size_t j = 0; j < 3; ++j) a(n, j) = std::sin(0.2 * n + j) * (1.0 + 0.3 * ph);
  }
  auto net = make_acoustic_network(4, 3, AcousticNetConfig{32, 1, 16, 16});
  net.init(7);
  nn::OptimizerConfig oc;
  oc.kind = nn::OptimizerKind::adam;
  oc.learning_rate = 0.01;
  nn::Optimizer opt(oc);
  for (int it = 0; it < 800; ++it) {
    nn::zero_grad(net.params());
    rnn_nll_backward(net, l, a, 1.0 / N);
    opt.step(net.params());
  }
  const Matrix y = rnn_generate(net, l);
  double se = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) se += std::pow(y.values()[i] - a.values()[i], 2);
  CHECK(std::sqrt(se / y.size()) < 0.1);
}

TEST_CASE("sar reduces to rnn with zero AR parameters") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto net = small_net(4, 5, seed);
    SarParameters sar(5, {{0, 3, 2}, {3, 2, 0}});
    const Matrix l = vbtest::random_matrix(7, 4, seed + 10);
    const Matrix a = vbtest::random_matrix(7, 5, seed + 20);
    CHECK(sar_nll(net, sar, l, a) == rnn_nll(net, l, a));
    CHECK(sar_generate(net, sar, l) == rnn_generate(net, l));
  }
}

TEST_CASE("K=0 stream equals the rnn loss on that stream") {
  SarParameters sar(3, {{0, 2, 1}, {2, 1, 0}});
  sar.beta(0).value.fill(0.8);
  const Matrix h = vbtest::random_matrix(6, 3, 1), a = vbtest::random_matrix(6, 3, 2);
  const Matrix m = sar_mean(h, sar, a);
  for (std::size_t n = 0; n < 6; ++n) CHECK(m(n, 2) == h(n, 2));
  CHECK(m(0, 0) == h(0, 0));
  CHECK(m(3, 1) == doctest::Approx(h(3, 1) + 0.8 * a(2, 1)));
}

TEST_CASE("sar two-frame hand computation") {
  SarParameters sar(1, {{0, 1, 1}});
  sar.beta(0).value(0, 0) = 0.5;
  sar.gamma.value(0, 0) = 0.1;
  Matrix h(2, 1), a(2, 1);
  h(0, 0) = 0.2;
  h(1, 0) = -0.3;
  a(0, 0) = 1.0;
  a(1, 0) = 0.4;
  // frame 1: mean = 0.2 + 0 + 0.1 = 0.3, residual 0.7
  // frame 2: mean = -0.3 + 0.5 * 1.0 + 0.1 = 0.3, residual 0.1
  const double expected = 0.5 * (0.7 * 0.7) + 0.5 * (0.1 * 0.1) + kLog2Pi;
  CHECK(sar_nll_from(h, sar, a) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("sar generation recursions") {
  SarParameters sar(1, {{0, 1, 1}});
  sar.beta(0).value(0, 0) = 1.0;
  const Matrix zeros = sar_generate_from(Matrix(9, 1), sar);
  for (double v : zeros.values()) CHECK(v == 0.0);

  sar.beta(0).value(0, 0) = 0.5;
  const Matrix g = sar_generate_from(Matrix(30, 1, 1.0), sar);
  for (std::size_t i = 0; i < 30; ++i) {
    const double n = static_cast<double>(i + 1);
    CHECK(std::abs(g(i, 0) - (2.0 - std::pow(2.0, 1.0 - n))) < 1e-12);
  }
}

TEST_CASE("sar gradients match finite differences") {
  auto net = small_net(2, 3, 3);
  SarParameters sar(3, {{0, 2, 2}, {2, 1, 0}});
  vb::Rng rng(4);
  for (auto* p : sar.params()) p->value = vbtest::random_matrix(rng, p->value.rows(), p->value.cols());
  const Matrix l = vbtest::random_matrix(5, 2, 5), a = vbtest::random_matrix(5, 3, 6);
  nn::zero_grad(net.params());
  nn::zero_grad(sar.params());
  sar_nll_backward(net, sar, l, a);
  for (auto* p : sar.params())
    for (std::size_t i = 0; i < p->size(); ++i) {
      double& v = p->value.values()[i];
      const double s = v;
      v = s + 1e-5;
      const double lp = sar_nll(net, sar, l, a);
      v = s - 1e-5;
      const double lm = sar_nll(net, sar, l, a);
      v = s;
      CHECK(p->grad.values()[i] == doctest::Approx((lp - lm) / 2e-5).epsilon(1e-6));
    }
}

TEST_CASE("gan_scale weights") {
  Matrix f(1, 85, 3.0);
  f(0, 0) = 10.0;
  f(0, 11) = 7.0;
  const Matrix s = gan_scale(f);
  CHECK(s(0, 0) == doctest::Approx(0.01));
  CHECK(s(0, 11) == 7.0);
  CHECK(s(0, 7) == doctest::Approx(0.03));
  for (std::size_t j = 60; j < 85; ++j) CHECK(s(0, j) == 0.0);
  CHECK_THROWS_AS(gan_scale(Matrix(2, 84)), vb::ShapeError);
  for (std::size_t j = 10; j < 60; ++j) CHECK(gan_scale(gan_scale(f))(0, j) == s(0, j));
}

TEST_CASE("gan postfilter contracts") {
  GanConfig cfg;
  cfg.channels = 16;
  GanPostfilter pf(cfg, 3);
  const Matrix a = vbtest::random_matrix(20, 85, 1);
  const Matrix y = gan_apply(pf, a);
  CHECK(y == a);
  CHECK(pf.discriminator_loss(a, a) == doctest::Approx(std::log(2.0)).epsilon(1e-6));

  // one step moves the generator; BAP must stay byte-identical
  const Matrix real = vbtest::random_matrix(20, 85, 2);
  gan_train_step(pf, real, a);
  gan_train_step(pf, real, a);
  const Matrix y2 = gan_apply(pf, a);
  CHECK(y2.rows() == a.rows());
  CHECK(y2.cols() == a.cols());
  for (std::size_t t = 0; t < 20; ++t)
    CHECK(std::memcmp(y2.row(t).data() + 60, a.row(t).data() + 60, 25 * sizeof(double)) == 0);
}

TEST_CASE("gan discriminator learns separable data and the generator raises GV") {
  GanConfig cfg;
  cfg.channels = 16;
  cfg.discriminator_opt.learning_rate = 0.05;
  cfg.generator_opt.learning_rate = 0.01;
  GanPostfilter pf(cfg, 9);
  Matrix real(40, 85, 1.0), fake(40, 85, -1.0);
  const double before = pf.discriminator_loss(real, fake);
  gan_train_step(pf, real, fake);
  CHECK(pf.discriminator_loss(real, fake) < before);

  // real: wide frame-to-frame variation, generated: the same trajectories
  // shrunk towards their mean (over-smoothed)
  GanPostfilter gv(cfg, 10);
  vb::Rng rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Matrix> reals, smooth;
  for (int u = 0; u < 4; ++u) {
    Matrix r(60, 85);
    for (double& v : r.values()) v = g(rng);
    Matrix s = r;
    for (double& v : s.values()) v *= 0.3;
    reals.push_back(r);
    smooth.push_back(s);
  }
  for (int it = 0; it < 300; ++it) gan_train_step(gv, reals[it % 4], smooth[it % 4]);
  double gv_in = 0.0, gv_out = 0.0;
  for (const auto& s : smooth) {
    const Matrix e = gan_apply(gv, s);
    for (std::size_t j = 10; j < 60; ++j) {
      gv_in += column_variance(s, j);
      gv_out += column_variance(e, j);
    }
  }
  CHECK(gv_out >= gv_in);
}

TEST_CASE("f0 model: overfit, all-unvoiced, determinism") {
  const std::size_t N = 60;
  Matrix l(N, 5);
  vb::features::QuantizedF0 q{std::vector<int>(N)};
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t ph = n / 12;
    l(n, ph) = 1.0;
    q.levels[n] = ph == 2 ? 0 : static_cast<int>(40 + ph * 30 + (n % 12));
  }
  F0ModelConfig cfg;
  cfg.opt.kind = nn::OptimizerKind::adam;
  cfg.opt.learning_rate = 0.01;
  F0Model m(5, cfg, 1);
  for (int it = 0; it < 300; ++it) f0_model_train(m, l, q);
  CHECK(m.teacher_forced_accuracy(l, q) >= 0.95);
  const auto g1 = f0_model_generate(m, l);
  CHECK(g1.levels == f0_model_generate(m, l).levels);

  const Matrix lp = m.log_probs(l, q);
  for (std::size_t n = 0; n < N; ++n) {
    double s = 0.0;
    for (double v : lp.row(n)) s += std::exp(v);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }

  F0Model u(5, cfg, 2);
  vb::features::QuantizedF0 unv{std::vector<int>(N, 0)};
  for (int it = 0; it < 50; ++it) f0_model_train(u, l, unv);
  for (int v : f0_model_generate(u, l).levels) CHECK(v == 0);
}

TEST_CASE("acoustic model training, save and load") {
  std::vector<TrainingPair> data;
  vb::Rng rng(3);
  for (int u = 0; u < 3; ++u) {
    const std::size_t N = 30 + 5 * u;
    TrainingPair p{Matrix(N, 6), Matrix(N, 85)};
    for (std::size_t n = 0; n < N; ++n) {
      p.l(n, n * 4 / N) = 1.0;
      p.l(n, 5) = static_cast<double>(n) / N;
      for (std::size_t j = 0; j < 85; ++j) p.a(n, j) = std::sin(0.1 * n * (1 + j % 5) + u) + 0.01 * j;
    }
    data.push_back(p);
  }
  AcousticTrainConfig cfg;
  cfg.net = {16, 1, 8, 8};
  cfg.steps = 60;
  cfg.opt.kind = nn::OptimizerKind::adam;
  cfg.opt.learning_rate = 0.005;
  AcousticModel m(6, cfg);
  const auto curve = m.train(data);
  REQUIRE(curve.size() == 60);
  double early = 0, late = 0;
  for (int i = 0; i < 6; ++i) {
    early += curve[i];
    late += curve[54 + i];
  }
  CHECK(late < early);

  const auto path = std::filesystem::temp_directory_path() / "vb_test_acoustic.ck";
  m.save(path);
  auto back = AcousticModel::load(path);
  const Matrix g1 = m.generate(data[0].l), g2 = back.generate(data[0].l);
  CHECK(vbtest::max_abs_diff(g1.values(), g2.values()) < 1e-4);
  back.save(path);
  CHECK(AcousticModel::load(path).generate(data[0].l) == g2);
  std::filesystem::remove(path);
}
