// SPDX-License-Identifier: Apache-2.0

#include "mixce/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "mixce/baseline.hpp"

namespace mixce {

AntennaPartition make_partition(int antenna_count, double eta,
                                AdcPattern pattern, std::uint64_t seed) {
  if (antenna_count < 1) throw std::invalid_argument("antenna_count must be >= 1");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  int n_a = static_cast<int>(std::llround(eta * antenna_count));
  n_a = std::clamp(n_a, 0, antenna_count);

  std::vector<int> set_a, set_b;
  if (pattern == AdcPattern::kBlock) {
    for (int m = 0; m < antenna_count; ++m) {
      (m < n_a ? set_a : set_b).push_back(m);
    }
  } else {
    std::vector<int> order(antenna_count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    set_a.assign(order.begin(), order.begin() + n_a);
    set_b.assign(order.begin() + n_a, order.end());
    std::sort(set_a.begin(), set_a.end());
    std::sort(set_b.begin(), set_b.end());
  }
  return AntennaPartition::from_sets(std::move(set_a), std::move(set_b));
}

namespace {

double ratio_mean(const Eigen::MatrixXcd& truths,
                  const Eigen::MatrixXcd& estimates,
                  const std::vector<int>& rows, std::int64_t& excluded) {
  double sum = 0.0;
  std::int64_t used = 0;
  for (Eigen::Index n = 0; n < truths.cols(); ++n) {
    double denom = 0.0, num = 0.0;
    for (int r : rows) {
      denom += std::norm(truths(r, n));
      num += std::norm(truths(r, n) - estimates(r, n));
    }
    if (denom == 0.0) {
      ++excluded;
      continue;
    }
    sum += num / denom;
    ++used;
  }
  if (used == 0) throw std::invalid_argument("no usable samples for NMSE");
  return sum / static_cast<double>(used);
}

std::vector<int> all_rows(Eigen::Index count) {
  std::vector<int> rows(count);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

double nmse_full(const Eigen::MatrixXcd& truths,
                 const Eigen::MatrixXcd& estimates, std::int64_t* excluded) {
  if (truths.rows() != estimates.rows() || truths.cols() != estimates.cols())
    throw std::invalid_argument("truth/estimate shape mismatch");
  if (truths.cols() == 0) throw std::invalid_argument("empty sample set");
  std::int64_t dropped = 0;
  double value = ratio_mean(truths, estimates, all_rows(truths.rows()), dropped);
  if (excluded) *excluded = dropped;
  return value;
}

double nmse_weighted(const Eigen::MatrixXcd& truths,
                     const Eigen::MatrixXcd& estimates,
                     const AntennaPartition& partition,
                     std::int64_t* excluded) {
  if (truths.rows() != estimates.rows() || truths.cols() != estimates.cols())
    throw std::invalid_argument("truth/estimate shape mismatch");
  if (truths.rows() != partition.antenna_count())
    throw std::invalid_argument("partition does not match sample dimension");
  if (truths.cols() == 0) throw std::invalid_argument("empty sample set");
  double eta = partition.eta();
  std::int64_t dropped = 0;
  double value = 0.0;
  if (!partition.set_a().empty()) {
    value += eta * ratio_mean(truths, estimates, partition.set_a(), dropped);
  }
  if (!partition.set_b().empty()) {
    value += (1.0 - eta) * ratio_mean(truths, estimates, partition.set_b(), dropped);
  }
  if (excluded) *excluded = dropped;
  return value;
}

SampleSet generate_samples(const ChannelModelConfig& channel,
                           const PilotConfig& pilot,
                           const AntennaPartition& partition,
                           const QuantizerSpec& quantizer,
                           std::uint64_t data_seed, std::int64_t count) {
  channel.validate();
  if (count < 0) throw std::invalid_argument("sample count must be >= 0");
  SampleSet set;
  set.h.resize(channel.antenna_count, count);
  set.ls.resize(channel.antenna_count, count);
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(data_seed, "sample", static_cast<std::uint64_t>(i)));
    ChannelRealization real = draw_channel(channel, rng);
    Eigen::VectorXcd y = transmit_pilot(real.h, pilot, rng);
    Eigen::VectorXcd r =
        quantize_mixed(y, partition, quantizer, pilot, channel.path_power);
    set.h.col(i) = real.h;
    set.ls.col(i) = ls_estimate(r, pilot.power);
  }
  return set;
}

namespace {

Eigen::MatrixXcd gather_rows(const Eigen::MatrixXcd& cols,
                             const std::vector<int>& set) {
  Eigen::MatrixXcd out(set.size(), cols.cols());
  for (std::size_t i = 0; i < set.size(); ++i) out.row(i) = cols.row(set[i]);
  return out;
}

TrainingConfig point_training_config(const ExperimentConfig& cfg,
                                     const OperatingPoint& point,
                                     const std::string& net) {
  TrainingConfig tc = cfg.training;
  tc.init_seed = cfg.point_seed(point, "init/" + net);
  tc.shuffle_seed = cfg.point_seed(point, "shuffle/" + net);
  return tc;
}

NmseReport make_report(const OperatingPoint& point, const std::string& method,
                       double nmse, std::int64_t samples, std::int64_t excluded,
                       std::uint64_t seed) {
  NmseReport report;
  report.point = point;
  report.point.method = method;
  report.nmse = nmse;
  report.nmse_db = 10.0 * std::log10(nmse);
  report.sample_count = samples;
  report.excluded = excluded;
  report.seed = seed;
  return report;
}

}  // namespace

TrainedNets train_point_nets(const ExperimentConfig& cfg,
                             const OperatingPoint& point,
                             const AntennaPartition& partition,
                             const SampleSet& train_set,
                             const SampleSet& val_set, bool want_di,
                             bool want_sip) {
  TrainedNets nets;
  const int m = cfg.channel.antenna_count;

  if (want_di) {
    auto [train_data, train_stats] = build_di_dataset(train_set, cfg.scale_c);
    auto [val_data, val_stats] = build_di_dataset(val_set, cfg.scale_c);
    nets.di_stats.total = train_stats.total + val_stats.total;
    nets.di_stats.rejected = train_stats.rejected + val_stats.rejected;
    TrainingConfig tc = point_training_config(cfg, point, "di");
    MlpModel init = init_model(di_architecture(m), tc.init_seed);
    TrainResult trained = train(std::move(init), train_data, tc, val_data);
    nets.di_trace = trained.trace;
    EstimatorBundle bundle;
    bundle.kind = EstimatorKind::kDi;
    bundle.di_model = std::move(trained.model);
    bundle.c = cfg.scale_c;
    bundle.partition = partition;
    nets.di = std::move(bundle);
  }

  if (want_sip && !partition.set_a().empty()) {
    EstimatorBundle bundle;
    bundle.kind = EstimatorKind::kSip;
    bundle.c = cfg.scale_c;
    bundle.partition = partition;
    if (partition.set_b().empty()) {
      // eta = 1: the refinement network alone covers all antennas.
      auto [r_data, r_stats] = build_di_dataset(train_set, cfg.scale_c);
      auto [r_val, r_val_stats] = build_di_dataset(val_set, cfg.scale_c);
      nets.sip_stats.total = r_stats.total + r_val_stats.total;
      nets.sip_stats.rejected = r_stats.rejected + r_val_stats.rejected;
      TrainingConfig tc = point_training_config(cfg, point, "r");
      MlpModel init = init_model(
          refine_architecture(static_cast<int>(partition.set_a().size())),
          tc.init_seed);
      TrainResult trained = train(std::move(init), r_data, tc, r_val);
      nets.r_trace = trained.trace;
      bundle.r_model = std::move(trained.model);
    } else {
      SipDatasets data = build_sip_datasets(train_set, partition, cfg.scale_c);
      SipDatasets val = build_sip_datasets(val_set, partition, cfg.scale_c);
      nets.sip_stats.total = data.stats.total + val.stats.total;
      nets.sip_stats.rejected = data.stats.rejected + val.stats.rejected;
      SipArchitectures arch = sip_architectures(partition);
      TrainingConfig r_tc = point_training_config(cfg, point, "r");
      TrainingConfig mp_tc = point_training_config(cfg, point, "mp");
      // The two networks share no parameters and read the same inputs;
      // training them concurrently is equivalent to any serial order.
      auto r_future = std::async(std::launch::async, [&]() {
        return train(init_model(arch.refine, r_tc.init_seed), data.refine,
                     r_tc, val.refine);
      });
      TrainResult mp_trained = train(init_model(arch.predict, mp_tc.init_seed),
                                     data.predict, mp_tc, val.predict);
      TrainResult r_trained = r_future.get();
      nets.r_trace = r_trained.trace;
      nets.mp_trace = mp_trained.trace;
      bundle.r_model = std::move(r_trained.model);
      bundle.mp_model = std::move(mp_trained.model);
    }
    nets.sip = std::move(bundle);
  }
  return nets;
}

std::vector<NmseReport> evaluate_methods(const ExperimentConfig& cfg,
                                         const OperatingPoint& point,
                                         const AntennaPartition& partition,
                                         const SampleSet& test_set,
                                         const EstimatorBundle* di_bundle,
                                         const EstimatorBundle* sip_bundle) {
  PilotConfig pilot = PilotConfig::from_snr_db(
      point.snr_db, cfg.channel.path_power, cfg.pilot_power);
  QuantizerSpec quantizer = cfg.quantizer;
  quantizer.bits_low = point.bits_low;

  std::vector<NmseReport> reports;
  for (const std::string& method : cfg.methods) {
    std::int64_t excluded = 0;
    if (method == "ls") {
      double nmse = nmse_full(test_set.h, test_set.ls, &excluded);
      reports.push_back(make_report(point, method, nmse, test_set.count(),
                                    excluded, cfg.master_seed));
    } else if (method == "lmmse") {
      ChannelModelConfig test_ch = cfg.test_channel();
      Eigen::MatrixXcd cov =
          test_ch.aoa_sampling == AoaSampling::kContinuousUniform
              ? monte_carlo_covariance(
                    test_ch, derive_seed(cfg.master_seed, "lmmse-cov"), 1000000)
              : analytic_covariance(test_ch);
      Eigen::MatrixXcd est(test_set.h.rows(), test_set.count());
      auto fill = [&](const std::vector<int>& set, std::optional<int> bits) {
        if (set.empty()) return;
        double alpha = distortion_factor(bits, cfg.lmmse);
        LmmseEstimator filt(submatrix(cov, set), alpha, pilot.power,
                            pilot.noise_variance);
        Eigen::MatrixXcd sub = filt.estimate_batch(gather_rows(test_set.ls, set));
        for (std::size_t i = 0; i < set.size(); ++i) est.row(set[i]) = sub.row(i);
      };
      fill(partition.set_a(), quantizer.bits_high);
      fill(partition.set_b(), quantizer.bits_low);
      double nmse = nmse_weighted(test_set.h, est, partition, &excluded);
      reports.push_back(make_report(point, method, nmse, test_set.count(),
                                    excluded, cfg.master_seed));
    } else if (method == "di") {
      if (!di_bundle) continue;
      Eigen::MatrixXcd est = di_estimate_batch(*di_bundle, test_set.ls);
      double nmse = nmse_full(test_set.h, est, &excluded);
      reports.push_back(make_report(point, method, nmse, test_set.count(),
                                    excluded, cfg.master_seed));
    } else if (method == "sip") {
      if (!sip_bundle || partition.set_a().empty()) continue;
      Eigen::MatrixXcd est = sip_estimate_batch(*sip_bundle, test_set.ls);
      double nmse = nmse_weighted(test_set.h, est, partition, &excluded);
      reports.push_back(make_report(point, method, nmse, test_set.count(),
                                    excluded, cfg.master_seed));
    }
  }
  return reports;
}

PointResult evaluate_point(const ExperimentConfig& cfg,
                           const OperatingPoint& point) {
  PointResult result;
  result.point = point;
  result.point.method.clear();
  try {
    cfg.validate();
    result.partition = make_partition(cfg.channel.antenna_count, point.eta,
                                      point.pattern,
                                      cfg.point_seed(point, "partition"));
    const AntennaPartition& part = result.partition;
    result.sip_applicable = !part.set_a().empty();

    PilotConfig pilot = PilotConfig::from_snr_db(
        point.snr_db, cfg.channel.path_power, cfg.pilot_power);
    QuantizerSpec quantizer = cfg.quantizer;
    quantizer.bits_low = point.bits_low;

    auto want = [&](const std::string& method) {
      return std::find(cfg.methods.begin(), cfg.methods.end(), method) !=
             cfg.methods.end();
    };
    bool want_di = want("di");
    bool want_sip = want("sip") && result.sip_applicable;

    SampleSet train_set, val_set;
    if (want_di || want_sip) {
      train_set = generate_samples(cfg.channel, pilot, part, quantizer,
                                   cfg.point_seed(point, "data/train"),
                                   cfg.sizes.train);
      val_set = generate_samples(cfg.channel, pilot, part, quantizer,
                                 cfg.point_seed(point, "data/val"),
                                 cfg.sizes.val);
    }
    SampleSet test_set = generate_samples(cfg.test_channel(), pilot, part,
                                          quantizer,
                                          cfg.point_seed(point, "data/test"),
                                          cfg.sizes.test);

    TrainedNets nets = train_point_nets(cfg, point, part, train_set, val_set,
                                        want_di, want_sip);
    result.di_bundle = std::move(nets.di);
    result.sip_bundle = std::move(nets.sip);
    result.di_trace = std::move(nets.di_trace);
    result.r_trace = std::move(nets.r_trace);
    result.mp_trace = std::move(nets.mp_trace);
    result.di_stats = nets.di_stats;
    result.sip_stats = nets.sip_stats;

    result.reports = evaluate_methods(
        cfg, point, part, test_set,
        result.di_bundle ? &*result.di_bundle : nullptr,
        result.sip_bundle ? &*result.sip_bundle : nullptr);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.reports.clear();
  }
  return result;
}

std::vector<PointResult> evaluate_points(const ExperimentConfig& cfg,
                                         const std::vector<OperatingPoint>& points,
                                         int workers) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  std::vector<PointResult> results(points.size());
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) break;
      results[i] = evaluate_point(cfg, points[i]);
    }
  };
  std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), points.size());
  if (n_threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

std::vector<NmseReport> flatten_reports(const std::vector<PointResult>& results) {
  std::vector<NmseReport> reports;
  for (const PointResult& r : results) {
    reports.insert(reports.end(), r.reports.begin(), r.reports.end());
  }
  return reports;
}

namespace {

std::vector<OperatingPoint> axis_points(const ExperimentConfig& cfg,
                                        bool sweep_snr) {
  std::vector<OperatingPoint> points;
  if (sweep_snr) {
    for (double snr : cfg.snr_db) {
      points.push_back({snr, cfg.eta.front(), cfg.pattern,
                        cfg.quantizer.bits_low, ""});
    }
  } else {
    for (double e : cfg.eta) {
      points.push_back({cfg.snr_db.front(), e, cfg.pattern,
                        cfg.quantizer.bits_low, ""});
    }
  }
  return points;
}

}  // namespace

std::vector<NmseReport> run_snr_sweep(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  return flatten_reports(evaluate_points(cfg, axis_points(cfg, true), workers));
}

std::vector<NmseReport> run_eta_sweep(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  return flatten_reports(evaluate_points(cfg, axis_points(cfg, false), workers));
}

}  // namespace mixce
