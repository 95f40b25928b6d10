// SPDX-License-Identifier: Apache-2.0
//
// Dense feed-forward network engine: forward pass, exact backpropagation
// for the mean-squared-error loss, Adam updates, and a deterministic
// mini-batch training loop. Everything is 64-bit; matrices hold samples as
// columns. Training is a single sequence of batch updates with a fixed
// floating-point evaluation order, so a (init_seed, shuffle_seed, data)
// triple fully determines the trained model.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixce {

enum class Activation { kRelu, kTanh, kNone };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::kNone;
};

struct MlpModel {
  std::vector<LayerSpec> layers;
  std::vector<Eigen::MatrixXd> weights;  // out_dim x in_dim
  std::vector<Eigen::VectorXd> biases;   // out_dim

  int input_dim() const { return layers.front().in_dim; }
  int output_dim() const { return layers.back().out_dim; }
  void validate() const;
};

// Glorot-uniform weights (U(-sqrt(6/(in+out)), +sqrt(6/(in+out)))), zero
// biases; layer l draws from derive_seed(seed, "init-layer", l) row by row.
MlpModel init_model(const std::vector<LayerSpec>& specs, std::uint64_t seed);

struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre_activation;
  std::vector<Eigen::MatrixXd> activation;
};

// Columns are samples. Throws std::runtime_error if the output is not finite.
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& input,
                        ForwardCache* cache = nullptr);
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input);

// (1/N) * sum over columns of ||target_col - pred_col||^2.
double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Exact gradients of mse_loss with respect to every parameter; the relu
// subgradient at 0 is 0. The cache must come from a forward call on a model
// with the same layer dimensions (std::invalid_argument otherwise).
Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Eigen::MatrixXd& target);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;

  static AdamState zeros_like(const MlpModel& model);
};

// Element-wise Adam with bias correction; step starts at 1.
void adam_update(Eigen::ArrayXd& param, const Eigen::ArrayXd& grad,
                 Eigen::ArrayXd& m, Eigen::ArrayXd& v, long step,
                 const AdamConfig& cfg);

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               long step, const AdamConfig& cfg);

struct Dataset {
  Eigen::MatrixXd inputs;   // in_dim x count
  Eigen::MatrixXd targets;  // out_dim x count

  std::int64_t count() const { return inputs.cols(); }
  void validate() const;
};

struct TrainingConfig {
  int epochs = 100;
  double learning_rate = 1e-3;
  int batch_size = 128;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t init_seed = 0;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;         // 1-based
  double train_mse = 0;  // mean of as-seen batch losses, weighted by batch size
  double val_mse = 0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> trace;
  int best_val_epoch = 0;  // 1-based; 0 when no epochs ran
};

class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(int epoch, int batch, const std::string& what,
                     std::vector<EpochStats> partial = {})
      : std::runtime_error(what),
        epoch(epoch),
        batch(batch),
        partial_trace(std::move(partial)) {}
  int epoch;
  int batch;
  std::vector<EpochStats> partial_trace;  // completed epochs before the abort
};

// Per epoch: shuffle with derive_seed(shuffle_seed, "epoch", epoch),
// partition into batches (last batch may be short), one Adam step per batch
// with a global monotone step index. Returns the final-epoch model; the
// best-validation epoch is recorded in the result but not used for
// selection. Throws TrainingDivergence on a non-finite batch loss.
TrainResult train(MlpModel model, const Dataset& train_data,
                  const TrainingConfig& cfg, const Dataset& validation);

// Structured text checkpoint: layer specs plus parameters printed with 17
// significant digits (row-major), so loading then saving reproduces the
// numeric content exactly.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace mixce
