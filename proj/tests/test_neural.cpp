// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mixce/neural.hpp"
#include "mixce/rng.hpp"

using namespace mixce;
namespace fs = std::filesystem;

namespace {

MlpModel identity_layer(int dim, Activation act = Activation::kNone) {
  MlpModel model;
  model.layers = {{dim, dim, act}};
  model.weights = {Eigen::MatrixXd::Identity(dim, dim)};
  model.biases = {Eigen::VectorXd::Zero(dim)};
  return model;
}

bool models_identical(const MlpModel& a, const MlpModel& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if ((a.weights[l] - b.weights[l]).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.biases[l] - b.biases[l]).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

// Loss of the model on one batch, for finite-difference probing.
double probe_loss(const MlpModel& model, const Eigen::MatrixXd& x,
                  const Eigen::MatrixXd& t) {
  return mse_loss(forward(model, x, nullptr), t);
}

double max_gradient_error(MlpModel model, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& t) {
  ForwardCache cache;
  forward(model, x, &cache);
  Gradients grads = backward(model, cache, t);
  const double step = 1e-6;
  double worst = 0.0;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (int r = 0; r < model.weights[l].rows(); ++r) {
      for (int c = 0; c < model.weights[l].cols(); ++c) {
        double saved = model.weights[l](r, c);
        model.weights[l](r, c) = saved + step;
        double up = probe_loss(model, x, t);
        model.weights[l](r, c) = saved - step;
        double down = probe_loss(model, x, t);
        model.weights[l](r, c) = saved;
        double fd = (up - down) / (2.0 * step);
        double analytic = grads.weights[l](r, c);
        worst = std::max(worst, std::abs(analytic - fd) /
                                    std::max(std::abs(fd), 1e-3));
      }
    }
    for (int r = 0; r < model.biases[l].size(); ++r) {
      double saved = model.biases[l][r];
      model.biases[l][r] = saved + step;
      double up = probe_loss(model, x, t);
      model.biases[l][r] = saved - step;
      double down = probe_loss(model, x, t);
      model.biases[l][r] = saved;
      double fd = (up - down) / (2.0 * step);
      worst = std::max(worst, std::abs(grads.biases[l][r] - fd) /
                                  std::max(std::abs(fd), 1e-3));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("init_model is deterministic with zero biases inside glorot bounds") {
  std::vector<LayerSpec> specs = {{6, 5, Activation::kRelu},
                                  {5, 4, Activation::kTanh}};
  MlpModel a = init_model(specs, 7);
  MlpModel b = init_model(specs, 7);
  CHECK(models_identical(a, b));
  MlpModel c = init_model(specs, 8);
  CHECK_FALSE(models_identical(a, c));
  for (std::size_t l = 0; l < specs.size(); ++l) {
    double limit = std::sqrt(6.0 / (specs[l].in_dim + specs[l].out_dim));
    CHECK(a.weights[l].cwiseAbs().maxCoeff() <= limit);
    CHECK(a.biases[l].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("glorot weights have near-zero mean") {
  MlpModel model = init_model({{200, 200, Activation::kNone}}, 11);
  double limit = std::sqrt(6.0 / 400.0);
  double standard_error = (limit / std::sqrt(3.0)) / 200.0;
  CHECK(std::abs(model.weights[0].mean()) < 3.0 * standard_error);
}

TEST_CASE("init_model rejects dimension mismatches") {
  std::vector<LayerSpec> specs = {{6, 5, Activation::kRelu},
                                  {4, 3, Activation::kNone}};
  CHECK_THROWS_AS(init_model(specs, 1), std::invalid_argument);
}

TEST_CASE("identity layer passes input through") {
  MlpModel model = identity_layer(3);
  Eigen::VectorXd x(3);
  x << 1.5, -2.0, 0.25;
  CHECK(forward(model, x) == x);
}

TEST_CASE("relu clips negatives") {
  MlpModel model = identity_layer(2, Activation::kRelu);
  Eigen::VectorXd x(2);
  x << -1.0, 2.0;
  Eigen::VectorXd y = forward(model, x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 2.0);
}

TEST_CASE("reference stack keeps tanh output inside (-1, 1)") {
  std::vector<LayerSpec> specs = {{128, 160, Activation::kRelu},
                                  {160, 200, Activation::kRelu},
                                  {200, 160, Activation::kRelu},
                                  {160, 128, Activation::kTanh}};
  MlpModel model = init_model(specs, 3);
  Rng rng(4);
  Eigen::VectorXd x(128);
  for (int i = 0; i < 128; ++i) x[i] = rng.gaussian();
  Eigen::VectorXd y = forward(model, x);
  REQUIRE(y.size() == 128);
  CHECK(y.cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("mse examples") {
  Eigen::MatrixXd p(2, 1), t(2, 1);
  p << 0, 0;
  t << 3, 4;
  CHECK(mse_loss(p, t) == doctest::Approx(25.0));
  CHECK(mse_loss(t, t) == 0.0);
  Eigen::MatrixXd p2(2, 2), t2(2, 2);
  p2.setZero();
  t2 << 1, std::sqrt(3.0), 0, 0;  // per-sample squared norms 1 and 3
  CHECK(mse_loss(p2, t2) == doctest::Approx(2.0));
  Eigen::MatrixXd wrong(3, 2);
  CHECK_THROWS_AS(mse_loss(p2, wrong), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  std::vector<LayerSpec> specs = {{6, 5, Activation::kTanh},
                                  {5, 4, Activation::kTanh}};
  MlpModel model = init_model(specs, 21);
  Rng rng(22);
  Eigen::MatrixXd x(6, 3), t(4, 3);
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 6; ++r) x(r, c) = rng.gaussian();
    for (int r = 0; r < 4; ++r) t(r, c) = 0.5 * rng.gaussian();
  }
  CHECK(max_gradient_error(model, x, t) < 1e-6);
}

TEST_CASE("gradients vanish exactly at zero loss for a linear layer") {
  MlpModel model = identity_layer(4);
  Rng rng(31);
  Eigen::MatrixXd x(4, 5);
  for (int c = 0; c < 5; ++c)
    for (int r = 0; r < 4; ++r) x(r, c) = rng.gaussian();
  ForwardCache cache;
  Eigen::MatrixXd out = forward(model, x, &cache);
  Gradients grads = backward(model, cache, out);
  CHECK(grads.weights[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.biases[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bias gradient equals the batch-averaged residual rule") {
  MlpModel model = identity_layer(2);
  Eigen::MatrixXd x(2, 2), t(2, 2);
  x << 1, 2, 3, 4;
  t << 0, 1, 1, 2;
  ForwardCache cache;
  Eigen::MatrixXd out = forward(model, x, &cache);
  Gradients grads = backward(model, cache, t);
  Eigen::VectorXd expected = 2.0 * (out - t).rowwise().sum() / 2.0;
  CHECK((grads.biases[0] - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("backward rejects a mismatched cache") {
  MlpModel model = identity_layer(3);
  MlpModel other = identity_layer(4);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 2);
  ForwardCache cache;
  forward(other, x, &cache);
  CHECK_THROWS_AS(backward(model, cache, x), std::invalid_argument);
}

TEST_CASE("adam first step with unit gradient") {
  AdamConfig cfg;
  Eigen::ArrayXd theta = Eigen::ArrayXd::Zero(1);
  Eigen::ArrayXd g = Eigen::ArrayXd::Ones(1);
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(1);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(1);
  adam_update(theta, g, m, v, 1, cfg);
  CHECK(std::abs(theta[0] - (-0.000999999990000001)) < 1e-12);
}

TEST_CASE("adam ten-step trace on a scalar quadratic") {
  // theta0 = 0.5, f(theta) = theta^2, canonical Adam constants.
  const double expected[10] = {
      0.49900000001,       0.4980000527045228, 0.4970001932151497,
      0.49600045658066116, 0.49500087766883727, 0.49400149109995306,
      0.4930023311725436,  0.49200343179197864, 0.4910048264023439,
      0.49000654792207543};
  AdamConfig cfg;
  Eigen::ArrayXd theta = Eigen::ArrayXd::Constant(1, 0.5);
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(1);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(1);
  for (int t = 1; t <= 10; ++t) {
    Eigen::ArrayXd g = 2.0 * theta;
    adam_update(theta, g, m, v, t, cfg);
    CHECK(std::abs(theta[0] - expected[t - 1]) < 1e-10);
  }
}

TEST_CASE("adam leaves parameters unchanged for zero gradient") {
  AdamConfig cfg;
  Eigen::ArrayXd theta = Eigen::ArrayXd::Constant(3, 1.5);
  Eigen::ArrayXd g = Eigen::ArrayXd::Zero(3);
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(3);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(3);
  adam_update(theta, g, m, v, 1, cfg);
  CHECK((theta == 1.5).all());
}

TEST_CASE("adam updates identical coordinates identically") {
  AdamConfig cfg;
  Eigen::ArrayXd theta(2), g(2), m(2), v(2);
  theta << 0.3, 0.3;
  g << -0.7, -0.7;
  m.setZero();
  v.setZero();
  for (int t = 1; t <= 5; ++t) adam_update(theta, g, m, v, t, cfg);
  CHECK(theta[0] == theta[1]);
  CHECK_THROWS_AS(adam_update(theta, g, m, v, 0, cfg), std::invalid_argument);
}

TEST_CASE("training learns a fixed linear map" * doctest::timeout(120)) {
  Rng rng(41);
  Eigen::MatrixXd map(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) map(r, c) = 2.0 * rng.uniform() - 1.0;
  Dataset data;
  data.inputs.resize(4, 1024);
  for (int c = 0; c < 1024; ++c)
    for (int r = 0; r < 4; ++r) data.inputs(r, c) = rng.gaussian();
  data.targets = map * data.inputs;

  TrainingConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e-2;
  cfg.batch_size = 128;
  cfg.init_seed = 5;
  cfg.shuffle_seed = 6;
  MlpModel model = init_model({{4, 4, Activation::kNone}}, cfg.init_seed);
  TrainResult result = train(std::move(model), data, cfg, Dataset{});
  REQUIRE(result.trace.size() == 200);
  CHECK(result.trace.back().train_mse < 1e-6);
}

TEST_CASE("zero epochs returns the model unchanged") {
  Dataset data;
  data.inputs = Eigen::MatrixXd::Random(3, 16);
  data.targets = Eigen::MatrixXd::Random(3, 16);
  TrainingConfig cfg;
  cfg.epochs = 0;
  MlpModel model = init_model({{3, 3, Activation::kTanh}}, 2);
  MlpModel copy = model;
  TrainResult result = train(std::move(model), data, cfg, Dataset{});
  CHECK(models_identical(result.model, copy));
  CHECK(result.trace.empty());
}

TEST_CASE("training is bit-deterministic in seeds and data") {
  Rng rng(51);
  Dataset data, val;
  data.inputs.resize(5, 300);
  data.targets.resize(2, 300);
  for (int c = 0; c < 300; ++c) {
    for (int r = 0; r < 5; ++r) data.inputs(r, c) = rng.gaussian();
    for (int r = 0; r < 2; ++r) data.targets(r, c) = 0.3 * rng.gaussian();
  }
  val.inputs = data.inputs.leftCols(50);
  val.targets = data.targets.leftCols(50);

  TrainingConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  cfg.init_seed = 9;
  cfg.shuffle_seed = 10;
  std::vector<LayerSpec> specs = {{5, 8, Activation::kRelu},
                                  {8, 2, Activation::kTanh}};
  TrainResult a = train(init_model(specs, cfg.init_seed), data, cfg, val);
  TrainResult b = train(init_model(specs, cfg.init_seed), data, cfg, val);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t e = 0; e < a.trace.size(); ++e) {
    CHECK(a.trace[e].train_mse == b.trace[e].train_mse);
    CHECK(a.trace[e].val_mse == b.trace[e].val_mse);
  }
  CHECK(models_identical(a.model, b.model));
  CHECK(a.best_val_epoch == b.best_val_epoch);
}

TEST_CASE("divergent training aborts with location info") {
  Rng rng(61);
  Dataset data;
  data.inputs.resize(3, 64);
  data.targets.resize(3, 64);
  for (int c = 0; c < 64; ++c) {
    for (int r = 0; r < 3; ++r) {
      data.inputs(r, c) = rng.gaussian();
      data.targets(r, c) = rng.gaussian();
    }
  }
  TrainingConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.learning_rate = 1e80;  // first update launches the weights to ~1e80
  std::vector<LayerSpec> specs = {{3, 3, Activation::kNone},
                                  {3, 3, Activation::kNone}};
  try {
    train(init_model(specs, 1), data, cfg, Dataset{});
    FAIL("expected TrainingDivergence");
  } catch (const TrainingDivergence& e) {
    CHECK(e.epoch >= 1);
    CHECK(e.batch >= 0);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("checkpoint round-trip preserves values and bytes") {
  fs::path dir = fs::temp_directory_path() / "mixce_neural_test";
  fs::create_directories(dir);
  MlpModel model = init_model({{6, 5, Activation::kRelu},
                               {5, 4, Activation::kTanh}},
                              77);
  // Exercise a non-trivial bias.
  model.biases[1][2] = 1.0 / 3.0;
  fs::path first = dir / "model.ckpt";
  save_checkpoint(model, first);
  MlpModel loaded = load_checkpoint(first);
  CHECK(models_identical(model, loaded));
  fs::path second = dir / "model2.ckpt";
  save_checkpoint(loaded, second);
  std::ifstream f1(first), f2(second);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  fs::remove_all(dir);
}

TEST_CASE("load_checkpoint rejects malformed files") {
  fs::path dir = fs::temp_directory_path() / "mixce_neural_test_bad";
  fs::create_directories(dir);
  fs::path bad = dir / "bad.ckpt";
  std::ofstream(bad) << "not a checkpoint\n";
  CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("dataset and training config validation") {
  Dataset data;
  data.inputs = Eigen::MatrixXd::Ones(2, 3);
  data.targets = Eigen::MatrixXd::Ones(2, 4);
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
  TrainingConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
