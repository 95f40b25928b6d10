// SPDX-License-Identifier: Apache-2.0

#include "mixce/neural.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <locale>
#include <numeric>
#include <sstream>

#include "mixce/rng.hpp"

namespace mixce {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kNone: return "none";
  }
  throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "none") return Activation::kNone;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

void MlpModel::validate() const {
  if (layers.empty()) throw std::invalid_argument("model needs at least one layer");
  if (weights.size() != layers.size() || biases.size() != layers.size())
    throw std::invalid_argument("parameter count does not match layer specs");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerSpec& spec = layers[l];
    if (spec.in_dim < 1 || spec.out_dim < 1)
      throw std::invalid_argument("layer dimensions must be >= 1");
    if (l > 0 && layers[l - 1].out_dim != spec.in_dim)
      throw std::invalid_argument("adjacent layer dimensions must chain");
    if (weights[l].rows() != spec.out_dim || weights[l].cols() != spec.in_dim ||
        biases[l].size() != spec.out_dim)
      throw std::invalid_argument("parameter shapes do not match layer specs");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw std::invalid_argument("parameters must be finite");
  }
}

MlpModel init_model(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
  MlpModel model;
  model.layers = specs;
  model.weights.reserve(specs.size());
  model.biases.reserve(specs.size());
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec& spec = specs[l];
    if (spec.in_dim < 1 || spec.out_dim < 1)
      throw std::invalid_argument("layer dimensions must be >= 1");
    if (l > 0 && specs[l - 1].out_dim != spec.in_dim)
      throw std::invalid_argument("adjacent layer dimensions must chain");
    Rng rng(derive_seed(seed, "init-layer", l));
    double limit = std::sqrt(6.0 / (spec.in_dim + spec.out_dim));
    Eigen::MatrixXd w(spec.out_dim, spec.in_dim);
    for (int r = 0; r < spec.out_dim; ++r) {
      for (int c = 0; c < spec.in_dim; ++c) {
        w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
      }
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(spec.out_dim));
  }
  return model;
}

namespace {

void apply_activation(Activation act, Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::kRelu: z = z.cwiseMax(0.0); break;
    case Activation::kTanh: z = z.array().tanh().matrix(); break;
    case Activation::kNone: break;
  }
}

}  // namespace

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& input,
                        ForwardCache* cache) {
  model.validate();
  if (input.rows() != model.input_dim())
    throw std::invalid_argument("input dimension does not match first layer");
  if (cache) {
    cache->input = input;
    cache->pre_activation.assign(model.layers.size(), {});
    cache->activation.assign(model.layers.size(), {});
  }
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd z = model.weights[l] * a;
    z.colwise() += model.biases[l];
    if (cache) cache->pre_activation[l] = z;
    apply_activation(model.layers[l].activation, z);
    if (cache) cache->activation[l] = z;
    a = std::move(z);
  }
  if (!a.allFinite())
    throw std::runtime_error("non-finite value in network forward pass");
  return a;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input) {
  return forward(model, Eigen::MatrixXd(input), nullptr).col(0);
}

double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("prediction/target shape mismatch");
  if (pred.cols() == 0) throw std::invalid_argument("empty batch");
  return (target - pred).squaredNorm() / static_cast<double>(pred.cols());
}

Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Eigen::MatrixXd& target) {
  std::size_t n_layers = model.layers.size();
  if (cache.pre_activation.size() != n_layers ||
      cache.activation.size() != n_layers)
    throw std::invalid_argument("forward cache does not match model layers");
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (cache.pre_activation[l].rows() != model.layers[l].out_dim)
      throw std::invalid_argument("forward cache does not match model layers");
  }
  const Eigen::MatrixXd& out = cache.activation.back();
  if (target.rows() != out.rows() || target.cols() != out.cols())
    throw std::invalid_argument("target shape does not match cached output");

  double n = static_cast<double>(target.cols());
  Gradients grads;
  grads.weights.resize(n_layers);
  grads.biases.resize(n_layers);

  Eigen::MatrixXd delta = (2.0 / n) * (out - target);
  for (std::size_t l = n_layers; l-- > 0;) {
    switch (model.layers[l].activation) {
      case Activation::kRelu:
        delta.array() *=
            (cache.pre_activation[l].array() > 0.0).cast<double>();
        break;
      case Activation::kTanh:
        delta.array() *= 1.0 - cache.activation[l].array().square();
        break;
      case Activation::kNone:
        break;
    }
    const Eigen::MatrixXd& prev =
        l == 0 ? cache.input : cache.activation[l - 1];
    grads.weights[l].noalias() = delta * prev.transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) delta = model.weights[l].transpose() * delta;
  }
  return grads;
}

AdamState AdamState::zeros_like(const MlpModel& model) {
  AdamState state;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    state.m_weights.push_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    state.v_weights.push_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    state.m_biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    state.v_biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return state;
}

namespace {

template <typename ParamArray, typename GradArray>
void adam_apply(ParamArray param, const GradArray grad, ParamArray m,
                ParamArray v, long step, const AdamConfig& cfg) {
  if (step < 1) throw std::invalid_argument("Adam step index starts at 1");
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.square();
  double m_corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  double v_corr = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  param -= cfg.learning_rate * (m / m_corr) / ((v / v_corr).sqrt() + cfg.epsilon);
}

using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

ArrayMap as_array(Eigen::MatrixXd& m) { return {m.data(), m.size()}; }
ArrayMap as_array(Eigen::VectorXd& v) { return {v.data(), v.size()}; }
ConstArrayMap as_array(const Eigen::MatrixXd& m) { return {m.data(), m.size()}; }
ConstArrayMap as_array(const Eigen::VectorXd& v) { return {v.data(), v.size()}; }

}  // namespace

void adam_update(Eigen::ArrayXd& param, const Eigen::ArrayXd& grad,
                 Eigen::ArrayXd& m, Eigen::ArrayXd& v, long step,
                 const AdamConfig& cfg) {
  adam_apply(ArrayMap(param.data(), param.size()),
             ConstArrayMap(grad.data(), grad.size()),
             ArrayMap(m.data(), m.size()), ArrayMap(v.data(), v.size()), step,
             cfg);
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               long step, const AdamConfig& cfg) {
  if (grads.weights.size() != model.layers.size() ||
      state.m_weights.size() != model.layers.size())
    throw std::invalid_argument("gradient/state layout does not match model");
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    adam_apply(as_array(model.weights[l]), as_array(grads.weights[l]),
               as_array(state.m_weights[l]), as_array(state.v_weights[l]),
               step, cfg);
    adam_apply(as_array(model.biases[l]), as_array(grads.biases[l]),
               as_array(state.m_biases[l]), as_array(state.v_biases[l]), step,
               cfg);
  }
}

void Dataset::validate() const {
  if (inputs.cols() != targets.cols())
    throw std::invalid_argument("input/target sample counts differ");
  if (!inputs.allFinite() || !targets.allFinite())
    throw std::invalid_argument("dataset entries must be finite");
}

void TrainingConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  if (!(adam_epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be > 0");
}

TrainResult train(MlpModel model, const Dataset& train_data,
                  const TrainingConfig& cfg, const Dataset& validation) {
  cfg.validate();
  model.validate();
  train_data.validate();
  if (train_data.count() == 0) throw std::invalid_argument("empty training set");
  if (train_data.inputs.rows() != model.input_dim() ||
      train_data.targets.rows() != model.output_dim())
    throw std::invalid_argument("dataset dimensions do not match model");
  bool has_val = validation.count() > 0;
  if (has_val) validation.validate();

  AdamConfig adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                  cfg.adam_epsilon};
  AdamState state = AdamState::zeros_like(model);
  TrainResult result;
  long step = 0;
  std::int64_t n = train_data.count();
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Eigen::MatrixXd batch_in, batch_target;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.shuffle_seed, "epoch", epoch));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::int64_t start = 0; start < n; start += cfg.batch_size) {
      std::int64_t size = std::min<std::int64_t>(cfg.batch_size, n - start);
      batch_in.resize(train_data.inputs.rows(), size);
      batch_target.resize(train_data.targets.rows(), size);
      for (std::int64_t j = 0; j < size; ++j) {
        batch_in.col(j) = train_data.inputs.col(order[start + j]);
        batch_target.col(j) = train_data.targets.col(order[start + j]);
      }
      ForwardCache cache;
      Eigen::MatrixXd out = forward(model, batch_in, &cache);
      double loss = mse_loss(out, batch_target);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training loss diverged at epoch " << epoch << ", batch "
            << batch_index;
        throw TrainingDivergence(epoch, batch_index, msg.str(), result.trace);
      }
      Gradients grads = backward(model, cache, batch_target);
      adam_step(model, grads, state, ++step, adam);
      loss_sum += loss * static_cast<double>(size);
      ++batch_index;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_mse = loss_sum / static_cast<double>(n);
    stats.val_mse = has_val
                        ? mse_loss(forward(model, validation.inputs, nullptr),
                                   validation.targets)
                        : std::numeric_limits<double>::quiet_NaN();
    result.trace.push_back(stats);
    if (has_val && (result.best_val_epoch == 0 ||
                    stats.val_mse <
                        result.trace[result.best_val_epoch - 1].val_mse)) {
      result.best_val_epoch = epoch;
    }
  }
  result.model = std::move(model);
  return result;
}

namespace {

std::string format_g17(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " +
                                     path.string());
  out.imbue(std::locale::classic());
  out << "mixce-mlp 1\n";
  out << "layers " << model.layers.size() << "\n";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerSpec& spec = model.layers[l];
    out << "layer " << spec.in_dim << " " << spec.out_dim << " "
        << activation_name(spec.activation) << "\n";
    for (int r = 0; r < spec.out_dim; ++r) {
      for (int c = 0; c < spec.in_dim; ++c) {
        out << (c == 0 ? "" : " ") << format_g17(model.weights[l](r, c));
      }
      out << "\n";
    }
    for (int r = 0; r < spec.out_dim; ++r) {
      out << (r == 0 ? "" : " ") << format_g17(model.biases[l][r]);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  in.imbue(std::locale::classic());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "mixce-mlp" || version != 1)
    throw std::runtime_error("unrecognized checkpoint format: " + path.string());
  std::string token;
  std::size_t n_layers = 0;
  in >> token >> n_layers;
  if (token != "layers" || n_layers == 0)
    throw std::runtime_error("malformed checkpoint: " + path.string());

  MlpModel model;
  for (std::size_t l = 0; l < n_layers; ++l) {
    LayerSpec spec;
    std::string act;
    in >> token >> spec.in_dim >> spec.out_dim >> act;
    if (token != "layer")
      throw std::runtime_error("malformed checkpoint: " + path.string());
    spec.activation = activation_from_name(act);
    Eigen::MatrixXd w(spec.out_dim, spec.in_dim);
    for (int r = 0; r < spec.out_dim; ++r) {
      for (int c = 0; c < spec.in_dim; ++c) in >> w(r, c);
    }
    Eigen::VectorXd b(spec.out_dim);
    for (int r = 0; r < spec.out_dim; ++r) in >> b[r];
    if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
    model.layers.push_back(spec);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  model.validate();
  return model;
}

}  // namespace mixce
