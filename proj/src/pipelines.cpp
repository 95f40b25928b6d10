// SPDX-License-Identifier: Apache-2.0

#include "mixce/pipelines.hpp"

#include <cmath>
#include <stdexcept>

#include "mixce/frontend.hpp"

namespace mixce {

namespace {

std::vector<LayerSpec> dense_stack(const std::vector<int>& dims) {
  std::vector<LayerSpec> specs;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Activation act =
        l + 2 == dims.size() ? Activation::kTanh : Activation::kRelu;
    specs.push_back({dims[l], dims[l + 1], act});
  }
  return specs;
}

int round_to_int(double x) { return static_cast<int>(std::llround(x)); }

}  // namespace

std::vector<LayerSpec> di_architecture(int antenna_count) {
  if (antenna_count < 1) throw std::invalid_argument("antenna_count must be >= 1");
  int width = 2 * antenna_count;
  std::vector<int> dims = {width, round_to_int(1.25 * width),
                           round_to_int(1.5625 * width),
                           round_to_int(1.25 * width), width};
  return dense_stack(dims);
}

std::vector<LayerSpec> refine_architecture(int n_antennas) {
  if (n_antennas < 1) throw std::invalid_argument("n_antennas must be >= 1");
  int in = 2 * n_antennas;
  return dense_stack({in, 2 * in, 4 * in, 2 * in, in});
}

SipArchitectures sip_architectures(const AntennaPartition& partition) {
  std::size_t n_a = partition.set_a().size();
  std::size_t n_b = partition.set_b().size();
  if (n_a == 0 || n_b == 0)
    throw std::invalid_argument(
        "selective-input networks require non-empty high- and low-resolution sets");

  int in = static_cast<int>(2 * n_a);
  int out = static_cast<int>(2 * n_b);
  SipArchitectures arch;
  if (partition.antenna_count() == 64 && (n_a == 13 || n_a == 32 || n_a == 51)) {
    // Reference sizes for eta = 0.2 / 0.5 / 0.8 at M = 64.
    if (n_a == 13) {
      arch.refine = dense_stack({26, 50, 100, 50, 26});
      arch.predict = dense_stack({26, 50, 100, 140, 102});
    } else if (n_a == 32) {
      arch.refine = dense_stack({64, 120, 200, 120, 64});
      arch.predict = dense_stack({64, 120, 200, 120, 64});
    } else {
      arch.refine = dense_stack({102, 200, 400, 200, 102});
      arch.predict = dense_stack({102, 200, 100, 50, 26});
    }
    return arch;
  }
  arch.refine = refine_architecture(static_cast<int>(n_a));
  std::vector<int> predict_dims = {in};
  for (int k = 1; k <= 3; ++k) {
    predict_dims.push_back(round_to_int(2.0 * (in + (out - in) * k / 4.0)));
  }
  predict_dims.push_back(out);
  arch.predict = dense_stack(predict_dims);
  return arch;
}

std::vector<int> layer_dims(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) return {};
  std::vector<int> dims = {specs.front().in_dim};
  for (const LayerSpec& spec : specs) dims.push_back(spec.out_dim);
  return dims;
}

namespace {

bool in_tanh_range(const Eigen::VectorXd& target) {
  return (target.array().abs() < 1.0).all();
}

// Gathers rows of a complex sample matrix restricted to an index set.
Eigen::VectorXcd take(const Eigen::MatrixXcd& cols, Eigen::Index col,
                      const std::vector<int>& set) {
  Eigen::VectorXcd out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out[i] = cols(set[i], col);
  return out;
}

}  // namespace

std::pair<Dataset, DatasetBuildStats> build_di_dataset(const SampleSet& samples,
                                                       double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scaling constant c must be > 0");
  if (samples.h.rows() != samples.ls.rows() ||
      samples.h.cols() != samples.ls.cols())
    throw std::invalid_argument("sample set h/ls shapes differ");

  DatasetBuildStats stats;
  stats.total = samples.count();
  std::int64_t width = 2 * samples.h.rows();
  Dataset data;
  data.inputs.resize(width, stats.total);
  data.targets.resize(width, stats.total);
  std::int64_t kept = 0;
  for (std::int64_t i = 0; i < stats.total; ++i) {
    Eigen::VectorXd target = complex_to_real(samples.h.col(i)) / c;
    if (!in_tanh_range(target)) {
      ++stats.rejected;
      continue;
    }
    data.inputs.col(kept) = complex_to_real(samples.ls.col(i));
    data.targets.col(kept) = target;
    ++kept;
  }
  data.inputs.conservativeResize(width, kept);
  data.targets.conservativeResize(width, kept);
  return {std::move(data), stats};
}

SipDatasets build_sip_datasets(const SampleSet& samples,
                               const AntennaPartition& partition, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scaling constant c must be > 0");
  if (samples.h.rows() != partition.antenna_count())
    throw std::invalid_argument("sample set does not match partition");
  if (partition.set_a().empty() || partition.set_b().empty())
    throw std::invalid_argument(
        "selective-input datasets require non-empty high- and low-resolution sets");

  SipDatasets out;
  out.stats.total = samples.count();
  std::int64_t in_width = 2 * static_cast<std::int64_t>(partition.set_a().size());
  std::int64_t r_width = in_width;
  std::int64_t mp_width = 2 * static_cast<std::int64_t>(partition.set_b().size());
  out.refine.inputs.resize(in_width, out.stats.total);
  out.refine.targets.resize(r_width, out.stats.total);
  out.predict.inputs.resize(in_width, out.stats.total);
  out.predict.targets.resize(mp_width, out.stats.total);

  std::int64_t kept = 0;
  for (std::int64_t i = 0; i < out.stats.total; ++i) {
    Eigen::VectorXd target_a =
        complex_to_real(take(samples.h, i, partition.set_a())) / c;
    Eigen::VectorXd target_b =
        complex_to_real(take(samples.h, i, partition.set_b())) / c;
    // Reject jointly so both datasets keep identical input sequences.
    if (!in_tanh_range(target_a) || !in_tanh_range(target_b)) {
      ++out.stats.rejected;
      continue;
    }
    Eigen::VectorXd input =
        complex_to_real(take(samples.ls, i, partition.set_a()));
    out.refine.inputs.col(kept) = input;
    out.refine.targets.col(kept) = target_a;
    out.predict.inputs.col(kept) = input;
    out.predict.targets.col(kept) = target_b;
    ++kept;
  }
  out.refine.inputs.conservativeResize(in_width, kept);
  out.refine.targets.conservativeResize(r_width, kept);
  out.predict.inputs.conservativeResize(in_width, kept);
  out.predict.targets.conservativeResize(mp_width, kept);
  return out;
}

void EstimatorBundle::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("scaling constant c must be > 0");
  if (kind == EstimatorKind::kDi) {
    if (!di_model) throw std::invalid_argument("di bundle requires di_model");
    if (di_model->input_dim() != 2 * partition.antenna_count() ||
        di_model->output_dim() != 2 * partition.antenna_count())
      throw std::invalid_argument("di model dimensions do not match partition");
  } else {
    if (!r_model) throw std::invalid_argument("sip bundle requires r_model");
    int in = static_cast<int>(2 * partition.set_a().size());
    if (in == 0)
      throw std::invalid_argument("sip bundle requires a non-empty set A");
    if (r_model->input_dim() != in || r_model->output_dim() != in)
      throw std::invalid_argument("refinement model dimensions do not match partition");
    if (partition.set_b().empty()) {
      if (mp_model)
        throw std::invalid_argument("mp_model given but set B is empty");
    } else {
      if (!mp_model)
        throw std::invalid_argument("sip bundle requires mp_model when B is non-empty");
      int out = static_cast<int>(2 * partition.set_b().size());
      if (mp_model->input_dim() != in || mp_model->output_dim() != out)
        throw std::invalid_argument("prediction model dimensions do not match partition");
    }
  }
}

namespace {

Eigen::MatrixXd pack_batch(const Eigen::MatrixXcd& cols) {
  Eigen::MatrixXd out(2 * cols.rows(), cols.cols());
  out.topRows(cols.rows()) = cols.real();
  out.bottomRows(cols.rows()) = cols.imag();
  return out;
}

Eigen::MatrixXcd unpack_batch(const Eigen::MatrixXd& cols) {
  Eigen::Index k = cols.rows() / 2;
  Eigen::MatrixXcd out(k, cols.cols());
  out.real() = cols.topRows(k);
  out.imag() = cols.bottomRows(k);
  return out;
}

Eigen::MatrixXcd gather_rows(const Eigen::MatrixXcd& cols,
                             const std::vector<int>& set) {
  Eigen::MatrixXcd out(set.size(), cols.cols());
  for (std::size_t i = 0; i < set.size(); ++i) out.row(i) = cols.row(set[i]);
  return out;
}

}  // namespace

Eigen::MatrixXcd di_estimate_batch(const EstimatorBundle& bundle,
                                   const Eigen::MatrixXcd& ls_cols) {
  bundle.validate();
  if (bundle.kind != EstimatorKind::kDi)
    throw std::invalid_argument("bundle is not a direct-input estimator");
  if (ls_cols.rows() != bundle.partition.antenna_count())
    throw std::invalid_argument("LS length does not match partition");
  Eigen::MatrixXd out = forward(*bundle.di_model, pack_batch(ls_cols), nullptr);
  return bundle.c * unpack_batch(out);
}

Eigen::VectorXcd di_estimate(const EstimatorBundle& bundle,
                             const Eigen::VectorXcd& ls) {
  return di_estimate_batch(bundle, ls).col(0);
}

Eigen::MatrixXcd sip_estimate_batch(const EstimatorBundle& bundle,
                                    const Eigen::MatrixXcd& ls_cols) {
  bundle.validate();
  if (bundle.kind != EstimatorKind::kSip)
    throw std::invalid_argument("bundle is not a selective-input estimator");
  if (ls_cols.rows() != bundle.partition.antenna_count())
    throw std::invalid_argument("LS length does not match partition");

  const AntennaPartition& part = bundle.partition;
  Eigen::MatrixXd input = pack_batch(gather_rows(ls_cols, part.set_a()));
  Eigen::MatrixXcd est_a =
      bundle.c * unpack_batch(forward(*bundle.r_model, input, nullptr));

  Eigen::MatrixXcd est(ls_cols.rows(), ls_cols.cols());
  for (std::size_t i = 0; i < part.set_a().size(); ++i) {
    est.row(part.set_a()[i]) = est_a.row(i);
  }
  if (!part.set_b().empty()) {
    Eigen::MatrixXcd est_b =
        bundle.c * unpack_batch(forward(*bundle.mp_model, input, nullptr));
    for (std::size_t i = 0; i < part.set_b().size(); ++i) {
      est.row(part.set_b()[i]) = est_b.row(i);
    }
  }
  return est;
}

Eigen::VectorXcd sip_estimate(const EstimatorBundle& bundle,
                              const Eigen::VectorXcd& ls) {
  return sip_estimate_batch(bundle, ls).col(0);
}

}  // namespace mixce
