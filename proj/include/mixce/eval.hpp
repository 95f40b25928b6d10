// SPDX-License-Identifier: Apache-2.0
//
// NMSE metrics, antenna pattern generation, and the SNR / eta sweep
// experiments. Operating points are independent jobs with disjoint derived
// seeds; within one point every method consumes the identical test set.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mixce/experiment.hpp"
#include "mixce/partition.hpp"
#include "mixce/pipelines.hpp"

namespace mixce {

// block: A = {0..round(eta*M)-1}; random: a uniformly random
// round(eta*M)-subset, deterministic per seed. Rounding is half away from
// zero.
AntennaPartition make_partition(int antenna_count, double eta,
                                AdcPattern pattern, std::uint64_t seed);

// Sample mean of ||h - h_hat||^2 / ||h||^2 over columns; zero-norm truth
// columns are excluded and counted.
double nmse_full(const Eigen::MatrixXcd& truths,
                 const Eigen::MatrixXcd& estimates,
                 std::int64_t* excluded = nullptr);

// eta * mean_A + (1 - eta) * mean_B of the per-set ratios; an empty set
// contributes nothing. Zero-norm sub-vectors are excluded per set.
double nmse_weighted(const Eigen::MatrixXcd& truths,
                     const Eigen::MatrixXcd& estimates,
                     const AntennaPartition& partition,
                     std::int64_t* excluded = nullptr);

// Draws `count` (h, ls) pairs; sample i uses the stream
// derive_seed(data_seed, "sample", i) for its gains, AoAs and noise, so
// generation order or parallelization cannot change the result.
SampleSet generate_samples(const ChannelModelConfig& channel,
                           const PilotConfig& pilot,
                           const AntennaPartition& partition,
                           const QuantizerSpec& quantizer,
                           std::uint64_t data_seed, std::int64_t count);

struct TrainedNets {
  std::optional<EstimatorBundle> di;
  std::optional<EstimatorBundle> sip;
  std::vector<EpochStats> di_trace, r_trace, mp_trace;
  DatasetBuildStats di_stats, sip_stats;
};

// Trains the requested estimators for one operating point from in-memory
// sample sets. SIP over an empty set A is not trainable and is skipped.
// Refinement and prediction networks train concurrently; they share no
// state, so the result is identical to any serial order.
TrainedNets train_point_nets(const ExperimentConfig& cfg,
                             const OperatingPoint& point,
                             const AntennaPartition& partition,
                             const SampleSet& train_set,
                             const SampleSet& val_set, bool want_di,
                             bool want_sip);

// One report per configured method, all on the same test set. Methods
// needing an absent bundle are skipped (the caller decides whether that is
// an error); SIP is skipped when set A is empty.
std::vector<NmseReport> evaluate_methods(const ExperimentConfig& cfg,
                                         const OperatingPoint& point,
                                         const AntennaPartition& partition,
                                         const SampleSet& test_set,
                                         const EstimatorBundle* di_bundle,
                                         const EstimatorBundle* sip_bundle);

struct PointResult {
  OperatingPoint point;  // method field empty
  AntennaPartition partition;
  std::vector<NmseReport> reports;
  bool sip_applicable = false;
  std::optional<std::string> error;  // set when the point aborted

  std::optional<EstimatorBundle> di_bundle;
  std::optional<EstimatorBundle> sip_bundle;
  std::vector<EpochStats> di_trace, r_trace, mp_trace;
  DatasetBuildStats di_stats, sip_stats;
};

// Generates train/val/test data, trains the requested estimators, and
// evaluates every configured method on the shared test set. Training
// divergence is caught and recorded in `error` instead of propagating.
PointResult evaluate_point(const ExperimentConfig& cfg,
                           const OperatingPoint& point);

// evaluate_point over a list with a worker pool; result order matches the
// input order and is independent of the worker count.
std::vector<PointResult> evaluate_points(const ExperimentConfig& cfg,
                                         const std::vector<OperatingPoint>& points,
                                         int workers = 1);

std::vector<NmseReport> flatten_reports(const std::vector<PointResult>& results);

// Sweep of cfg.snr_db at the first configured eta.
std::vector<NmseReport> run_snr_sweep(const ExperimentConfig& cfg,
                                      int workers = 1);
// Sweep of cfg.eta at the first configured SNR.
std::vector<NmseReport> run_eta_sweep(const ExperimentConfig& cfg,
                                      int workers = 1);

}  // namespace mixce
