// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "mixce/eval.hpp"

using namespace mixce;

namespace {

// Small, fast configuration for end-to-end checks.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.channel.antenna_count = 8;
  cfg.channel.path_count = 2;
  cfg.channel.aoa_grid = default_aoa_grid(10);
  cfg.snr_db = {10.0};
  cfg.eta = {0.5};
  cfg.sizes = {400, 80, 120};
  cfg.training.epochs = 3;
  cfg.training.batch_size = 64;
  cfg.master_seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("block partition takes the leading antennas") {
  AntennaPartition part = make_partition(64, 0.5, AdcPattern::kBlock, 0);
  REQUIRE(part.set_a().size() == 32);
  for (int m = 0; m < 32; ++m) CHECK(part.set_a()[m] == m);
  CHECK(part.set_b().front() == 32);
}

TEST_CASE("eta rounding is half away from zero") {
  CHECK(make_partition(64, 0.2, AdcPattern::kBlock, 0).set_a().size() == 13);
  CHECK(make_partition(64, 0.8, AdcPattern::kBlock, 0).set_a().size() == 51);
  CHECK(make_partition(64, 1.0, AdcPattern::kBlock, 0).set_b().empty());
  CHECK(make_partition(64, 0.0, AdcPattern::kBlock, 0).set_a().empty());
}

TEST_CASE("random partition is deterministic and well formed") {
  AntennaPartition a = make_partition(16, 0.4, AdcPattern::kRandom, 99);
  AntennaPartition b = make_partition(16, 0.4, AdcPattern::kRandom, 99);
  CHECK(a.set_a() == b.set_a());
  CHECK(a.set_b() == b.set_b());
  CHECK(a.set_a().size() == 6);
  AntennaPartition c = make_partition(16, 0.4, AdcPattern::kRandom, 100);
  CHECK(a.set_a() != c.set_a());
  for (std::size_t i = 1; i < a.set_a().size(); ++i) {
    CHECK(a.set_a()[i] > a.set_a()[i - 1]);
  }
}

TEST_CASE("nmse_full basics") {
  Eigen::MatrixXcd h(2, 3);
  h << std::complex<double>(1, 0), std::complex<double>(0, 2),
      std::complex<double>(1, 1), std::complex<double>(2, 0),
      std::complex<double>(-1, 0), std::complex<double>(0, -1);
  CHECK(nmse_full(h, h) == 0.0);
  CHECK(nmse_full(h, Eigen::MatrixXcd::Zero(2, 3)) == doctest::Approx(1.0));
  CHECK(nmse_full(h, 2.0 * h) == doctest::Approx(1.0));
}

TEST_CASE("nmse_full is invariant to common complex scaling") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(4, 50);
  Eigen::MatrixXcd est = Eigen::MatrixXcd::Random(4, 50);
  double base = nmse_full(h, est);
  std::complex<double> scale{-2.3, 1.7};
  double scaled = nmse_full(scale * h, scale * est);
  CHECK(scaled == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("nmse_full excludes zero-norm truths") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = {1.0, 0.0};
  Eigen::MatrixXcd est = Eigen::MatrixXcd::Zero(2, 2);
  std::int64_t excluded = 0;
  double nmse = nmse_full(h, est, &excluded);
  CHECK(excluded == 1);
  CHECK(nmse == doctest::Approx(1.0));
}

TEST_CASE("nmse_weighted combines per-set terms") {
  AntennaPartition part = AntennaPartition::from_sets({0}, {1});
  Eigen::MatrixXcd h(2, 4);
  h.setConstant({1.0, 0.0});
  Eigen::MatrixXcd est = h;
  CHECK(nmse_weighted(h, est, part) == 0.0);
  est.row(1).setZero();  // perfect on A, zero on B
  CHECK(nmse_weighted(h, est, part) == doctest::Approx(0.5));
}

TEST_CASE("nmse_weighted at eta 1 equals nmse_full") {
  AntennaPartition part = make_partition(4, 1.0, AdcPattern::kBlock, 0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(4, 30);
  Eigen::MatrixXcd est = Eigen::MatrixXcd::Random(4, 30);
  CHECK(nmse_weighted(h, est, part) ==
        doctest::Approx(nmse_full(h, est)).epsilon(1e-12));
}

TEST_CASE("generate_samples is deterministic in the data seed") {
  ExperimentConfig cfg = tiny_config();
  AntennaPartition part = make_partition(8, 0.5, AdcPattern::kBlock, 0);
  PilotConfig pilot = PilotConfig::from_snr_db(10.0, 1.0);
  SampleSet a = generate_samples(cfg.channel, pilot, part, cfg.quantizer, 7, 50);
  SampleSet b = generate_samples(cfg.channel, pilot, part, cfg.quantizer, 7, 50);
  CHECK(a.h == b.h);
  CHECK(a.ls == b.ls);
  SampleSet c = generate_samples(cfg.channel, pilot, part, cfg.quantizer, 8, 50);
  CHECK(a.h != c.h);
}

TEST_CASE("ls error power matches the closed form on unquantized antennas" *
          doctest::timeout(300)) {
  // The closed form 10^(-s/10) describes the aggregate ratio
  // E||ls - h||^2 / E||h||^2. The per-sample ratio mean reported as NMSE
  // sits above it by E[1/||h||^2] * E[||h||^2] (about 1.2 at L = 8).
  ExperimentConfig cfg;
  cfg.quantizer.bits_low = std::nullopt;  // nothing quantized
  cfg.methods = {"ls"};
  cfg.sizes.test = 10000;
  cfg.eta = {0.5};
  AntennaPartition part = make_partition(64, 0.5, AdcPattern::kBlock, 0);
  for (double snr : {0.0, 10.0, 20.0}) {
    PilotConfig pilot = PilotConfig::from_snr_db(snr, 1.0);
    SampleSet test = generate_samples(cfg.channel, pilot, part, cfg.quantizer,
                                      derive_seed(3, "ls-oracle"), 10000);
    double aggregate = (test.ls - test.h).squaredNorm() / test.h.squaredNorm();
    CHECK(aggregate ==
          doctest::Approx(std::pow(10.0, -snr / 10.0)).epsilon(0.05));

    cfg.snr_db = {snr};
    std::vector<NmseReport> reports = run_snr_sweep(cfg);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].sample_count == 10000);
    CHECK(reports[0].nmse ==
          doctest::Approx(1.2 * std::pow(10.0, -snr / 10.0)).epsilon(0.25));
  }
}

TEST_CASE("evaluate_point produces one report per method" *
          doctest::timeout(300)) {
  ExperimentConfig cfg = tiny_config();
  OperatingPoint point{10.0, 0.5, AdcPattern::kBlock, 1, ""};
  PointResult result = evaluate_point(cfg, point);
  REQUIRE_FALSE(result.error.has_value());
  REQUIRE(result.reports.size() == 4);
  for (const NmseReport& report : result.reports) {
    CHECK(report.sample_count == cfg.sizes.test);
    CHECK(report.nmse >= 0.0);
    CHECK(report.nmse_db == doctest::Approx(10.0 * std::log10(report.nmse)));
    CHECK(report.seed == cfg.master_seed);
  }
  CHECK(result.sip_applicable);
  CHECK(result.di_trace.size() == 3);
  CHECK(result.r_trace.size() == 3);
  CHECK(result.mp_trace.size() == 3);
}

TEST_CASE("evaluate_point is bit-deterministic" * doctest::timeout(300)) {
  ExperimentConfig cfg = tiny_config();
  OperatingPoint point{10.0, 0.5, AdcPattern::kBlock, 1, ""};
  PointResult a = evaluate_point(cfg, point);
  PointResult b = evaluate_point(cfg, point);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].nmse == b.reports[i].nmse);
  }
}

TEST_CASE("per-point failures stay isolated") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"ls", "lmmse"};
  std::vector<OperatingPoint> points = {
      {10.0, 0.5, AdcPattern::kBlock, 1, ""},
      {10.0, 0.5, AdcPattern::kBlock, 5, ""}};  // no alpha entry for 5 bits
  std::vector<PointResult> results = evaluate_points(cfg, points, 2);
  REQUIRE(results.size() == 2);
  CHECK_FALSE(results[0].error.has_value());
  CHECK(results[1].error.has_value());
  CHECK(results[1].reports.empty());
  CHECK(flatten_reports(results).size() == 2);
}

TEST_CASE("eta sweep skips sip at eta zero" * doctest::timeout(300)) {
  ExperimentConfig cfg = tiny_config();
  cfg.eta = {0.0, 0.5};
  cfg.methods = {"ls", "sip"};
  std::vector<NmseReport> reports = run_eta_sweep(cfg);
  // eta 0: ls only; eta 0.5: ls + sip.
  CHECK(reports.size() == 3);
  int sip_rows = 0;
  for (const NmseReport& r : reports) {
    if (r.point.method == "sip") {
      ++sip_rows;
      CHECK(r.point.eta == 0.5);
    }
  }
  CHECK(sip_rows == 1);
}

TEST_CASE("eta = 1 refinement beats ls at moderate snr" *
          doctest::timeout(300)) {
  ExperimentConfig cfg = tiny_config();
  cfg.eta = {1.0};
  cfg.snr_db = {10.0};
  cfg.sizes = {3000, 300, 500};
  cfg.training.epochs = 20;
  cfg.methods = {"ls", "sip"};
  std::vector<NmseReport> reports = run_eta_sweep(cfg);
  REQUIRE(reports.size() == 2);
  double ls_nmse = 0.0, sip_nmse = 0.0;
  for (const NmseReport& r : reports) {
    if (r.point.method == "ls") ls_nmse = r.nmse;
    if (r.point.method == "sip") sip_nmse = r.nmse;
  }
  CHECK(sip_nmse < ls_nmse);
}

TEST_CASE("report counts scale with points and methods" *
          doctest::timeout(300)) {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"ls", "lmmse"};
  cfg.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  std::vector<NmseReport> reports = run_snr_sweep(cfg);
  CHECK(reports.size() == 14);
}
