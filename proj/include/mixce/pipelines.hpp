// SPDX-License-Identifier: Apache-2.0
//
// Estimator pipelines: network architecture construction, dataset assembly
// with the target scaling constant c, and the direct-input / selective-input
// estimation paths.
//
// The direct-input (di) estimator maps the LS vector of all antennas to the
// full channel. The selective-input (sip) estimator reads only the LS
// entries of the high-resolution set A: a refinement network estimates the
// channels of A and a prediction network estimates the channels of B, and
// the two outputs are interleaved back into antenna order.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "mixce/neural.hpp"
#include "mixce/partition.hpp"

namespace mixce {

// Dense stack for the direct-input network. For M = 64: dims
// 128 -> 160 -> 200 -> 160 -> 128, relu x3 then tanh. Other antenna counts
// scale the hidden sizes proportionally to 2M with the same ratios
// (1.25, 1.5625, 1.25), rounded to nearest.
std::vector<LayerSpec> di_architecture(int antenna_count);

struct SipArchitectures {
  std::vector<LayerSpec> refine;   // input 2|A|, output 2|A|
  std::vector<LayerSpec> predict;  // input 2|A|, output 2|B|
};

// Refinement stack over n antennas: with i = 2n, dims [i, 2i, 4i, 2i, i],
// relu x3 then tanh. The eta = 1 case runs the selective-input estimator
// with this network alone.
std::vector<LayerSpec> refine_architecture(int n_antennas);

// Hidden sizes follow the reference table for M = 64 with |A| in {13, 32, 51}
// (eta 0.2 / 0.5 / 0.8). Otherwise, with i = 2|A| and o = 2|B|:
//   refine hidden  = [2i, 4i, 2i]
//   predict hidden = [round(2*(i + (o-i)*k/4)) : k = 1..3]
// Requires both sets non-empty.
SipArchitectures sip_architectures(const AntennaPartition& partition);

// Layer dims [in, hidden..., out] of a spec chain; test/reporting helper.
std::vector<int> layer_dims(const std::vector<LayerSpec>& specs);

// Collection of (h, ls) sample pairs, one column per sample.
struct SampleSet {
  Eigen::MatrixXcd h;   // M x N
  Eigen::MatrixXcd ls;  // M x N

  std::int64_t count() const { return h.cols(); }
};

struct DatasetBuildStats {
  std::int64_t total = 0;
  std::int64_t rejected = 0;  // samples with a target entry outside (-1, 1)
};

// inputs = complex_to_real(ls), targets = complex_to_real(h) / c. Samples
// whose scaled target leaves the open interval (-1, 1) are dropped, not
// clamped; the count is reported in the stats.
std::pair<Dataset, DatasetBuildStats> build_di_dataset(const SampleSet& samples,
                                                       double c);

struct SipDatasets {
  Dataset refine;   // inputs 2|A|, targets h_A / c
  Dataset predict;  // same inputs, targets h_B / c
  DatasetBuildStats stats;
};

// Both datasets share bitwise-identical input sequences; a sample is dropped
// from both when either set's scaled target is out of range.
SipDatasets build_sip_datasets(const SampleSet& samples,
                               const AntennaPartition& partition, double c);

enum class EstimatorKind { kDi, kSip };

struct EstimatorBundle {
  EstimatorKind kind = EstimatorKind::kDi;
  std::optional<MlpModel> di_model;
  std::optional<MlpModel> r_model;
  std::optional<MlpModel> mp_model;  // absent when B is empty
  double c = 3.0;
  AntennaPartition partition;

  void validate() const;
};

// c * real_to_complex(net(complex_to_real(ls))).
Eigen::VectorXcd di_estimate(const EstimatorBundle& bundle,
                             const Eigen::VectorXcd& ls);
Eigen::MatrixXcd di_estimate_batch(const EstimatorBundle& bundle,
                                   const Eigen::MatrixXcd& ls_cols);

// Shared input complex_to_real(ls restricted to A); entries of ls on B are
// never read. With B empty the refinement output covers all antennas.
Eigen::VectorXcd sip_estimate(const EstimatorBundle& bundle,
                              const Eigen::VectorXcd& ls);
Eigen::MatrixXcd sip_estimate_batch(const EstimatorBundle& bundle,
                                    const Eigen::MatrixXcd& ls_cols);

}  // namespace mixce
