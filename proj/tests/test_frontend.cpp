// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "mixce/channel.hpp"
#include "mixce/eval.hpp"
#include "mixce/frontend.hpp"

using namespace mixce;

TEST_CASE("pilot config snr consistency") {
  PilotConfig cfg = PilotConfig::from_snr_db(10.0, 1.0, 4.0);
  CHECK(cfg.power == 4.0);
  CHECK(cfg.snr_db(1.0) == doctest::Approx(10.0).epsilon(1e-9));
  PilotConfig bad_power{-1.0, 0.1};
  CHECK_THROWS_AS(bad_power.validate(), std::invalid_argument);
  PilotConfig bad_noise{1.0, 0.0};
  CHECK_THROWS_AS(bad_noise.validate(), std::invalid_argument);
}

TEST_CASE("pilot transmission in the vanishing-noise limit") {
  PilotConfig cfg{4.0, 1e-30};
  Eigen::VectorXcd h(1);
  h[0] = {1.0, 1.0};
  Rng rng(1);
  Eigen::VectorXcd y = transmit_pilot(h, cfg, rng);
  CHECK(y[0].real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(y[0].imag() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("pilot noise power matches sigma0^2" * doctest::timeout(120)) {
  PilotConfig cfg{1.0, 0.25};
  const int m = 16;
  const int n = 100000;
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(m);
  double power = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(5, "noise", static_cast<std::uint64_t>(i)));
    power += transmit_pilot(h, cfg, rng).squaredNorm();
  }
  CHECK(power / (static_cast<double>(n) * m) ==
        doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("pilot transmission is deterministic per seed") {
  PilotConfig cfg{1.0, 0.5};
  Eigen::VectorXcd h = Eigen::VectorXcd::Ones(8);
  Rng a(3), b(3);
  CHECK(transmit_pilot(h, cfg, a) == transmit_pilot(h, cfg, b));
}

TEST_CASE("one-bit quantizer picks the signed half step") {
  CHECK(quantize_scalar(0.3, 1, 1.0) == doctest::Approx(0.5));
  CHECK(quantize_scalar(-2.7, 1, 1.0) == doctest::Approx(-0.5));
  CHECK(quantize_scalar(0.0, 1, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("two-bit quantizer saturates at the extreme level") {
  CHECK(quantize_scalar(0.9, 2, 1.0) == doctest::Approx(0.5));
  CHECK(quantize_scalar(7.0, 2, 1.0) == doctest::Approx(1.5));
  CHECK(quantize_scalar(-7.0, 2, 1.0) == doctest::Approx(-1.5));
}

TEST_CASE("quantizer matches brute-force nearest codebook point") {
  Rng rng(17);
  for (int bits = 1; bits <= 4; ++bits) {
    double delta = 0.7;
    int levels = 1 << bits;
    for (int trial = 0; trial < 2000; ++trial) {
      double x = 6.0 * (rng.uniform() - 0.5);
      double best = 0.0, best_dist = 1e300;
      for (int k = 0; k < levels; ++k) {
        double level = (k + 0.5 - levels / 2.0) * delta;
        double dist = std::abs(x - level);
        if (dist < best_dist) {
          best_dist = dist;
          best = level;
        }
      }
      CHECK(quantize_scalar(x, bits, delta) == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantizer idempotence, monotonicity, odd symmetry") {
  Rng rng(23);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    double x = 8.0 * (rng.uniform() - 0.5);
    double y = 8.0 * (rng.uniform() - 0.5);
    double qx = quantize_scalar(x, 3, 0.6);
    double qy = quantize_scalar(y, 3, 0.6);
    if (x <= y && qx > qy) ++violations;
    if (quantize_scalar(-x, 3, 0.6) != -qx) ++violations;
    if (i < 10000 && quantize_scalar(qx, 3, 0.6) != qx) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("one-bit distortion on a Gaussian input" * doctest::timeout(120)) {
  // Mid-rise with the design step 1.596 * sigma; normalized MSE 0.3634.
  Rng rng(31);
  const int n = 1000000;
  double num = 0.0, denom = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.gaussian();
    double q = quantize_scalar(x, 1, 1.596);
    num += (x - q) * (x - q);
    denom += x * x;
  }
  CHECK(num / denom == doctest::Approx(0.3634).epsilon(0.02));
}

TEST_CASE("mixed quantization leaves A untouched and maps B to the codebook") {
  AntennaPartition part = AntennaPartition::from_sets({0, 1}, {2, 3});
  PilotConfig pilot{1.0, 0.1};
  QuantizerSpec spec;  // one-bit B, unquantized A
  Rng rng(3);
  Eigen::VectorXcd y(4);
  y << std::complex<double>(0.3, -1.2), std::complex<double>(2.0, 0.1),
      std::complex<double>(0.4, -0.2), std::complex<double>(-1.5, 0.9);
  Eigen::VectorXcd r = quantize_mixed(y, part, spec, pilot, 1.0);
  CHECK(r[0] == y[0]);
  CHECK(r[1] == y[1]);
  double delta = 1.596 * std::sqrt((1.0 + 0.1) / 2.0);
  for (int m : {2, 3}) {
    CHECK(std::abs(r[m].real()) == doctest::Approx(delta / 2).epsilon(1e-12));
    CHECK(std::abs(r[m].imag()) == doctest::Approx(delta / 2).epsilon(1e-12));
  }
}

TEST_CASE("empty B passes the signal through exactly") {
  AntennaPartition part = AntennaPartition::from_sets({0, 1, 2}, {});
  PilotConfig pilot{1.0, 0.1};
  QuantizerSpec spec;
  Eigen::VectorXcd y(3);
  y << std::complex<double>(0.3, -1.2), std::complex<double>(2.0, 0.1),
      std::complex<double>(0.4, -0.2);
  CHECK(quantize_mixed(y, part, spec, pilot, 1.0) == y);
}

TEST_CASE("mixed quantization is local to each set") {
  AntennaPartition part = AntennaPartition::from_sets({0, 2}, {1, 3});
  PilotConfig pilot{1.0, 0.2};
  QuantizerSpec spec;
  spec.bits_low = 2;
  Rng rng(11);
  Eigen::VectorXcd y(4);
  for (int m = 0; m < 4; ++m) y[m] = rng.complex_gaussian(1.0);
  Eigen::VectorXcd base = quantize_mixed(y, part, spec, pilot, 1.0);
  Eigen::VectorXcd y2 = y;
  y2[0] += std::complex<double>(5.0, -3.0);  // index in A
  Eigen::VectorXcd r2 = quantize_mixed(y2, part, spec, pilot, 1.0);
  CHECK(r2[1] == base[1]);
  CHECK(r2[3] == base[3]);
  Eigen::VectorXcd y3 = y;
  y3[3] += std::complex<double>(5.0, -3.0);  // index in B
  Eigen::VectorXcd r3 = quantize_mixed(y3, part, spec, pilot, 1.0);
  CHECK(r3[0] == base[0]);
  CHECK(r3[2] == base[2]);
}

TEST_CASE("mixed quantization validates the partition length") {
  AntennaPartition part = AntennaPartition::from_sets({0}, {1});
  PilotConfig pilot{1.0, 0.1};
  QuantizerSpec spec;
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(3);
  CHECK_THROWS_AS(quantize_mixed(y, part, spec, pilot, 1.0),
                  std::invalid_argument);
}

TEST_CASE("ls estimate divides by sqrt(P)") {
  Eigen::VectorXcd r(1);
  r[0] = {2.0, 2.0};
  Eigen::VectorXcd ls = ls_estimate(r, 4.0);
  CHECK(ls[0].real() == doctest::Approx(1.0));
  CHECK(ls[0].imag() == doctest::Approx(1.0));
  CHECK_THROWS_AS(ls_estimate(r, 0.0), std::invalid_argument);
}

TEST_CASE("ls is unbiased on the unquantized set" * doctest::timeout(120)) {
  ChannelModelConfig ch;
  ch.antenna_count = 8;
  ch.path_count = 2;
  ch.aoa_grid = default_aoa_grid(10);
  AntennaPartition part = AntennaPartition::from_sets({0, 1, 2, 3}, {4, 5, 6, 7});
  PilotConfig pilot = PilotConfig::from_snr_db(10.0, 1.0);
  QuantizerSpec spec;
  const int n = 100000;
  Eigen::VectorXcd mean_err = Eigen::VectorXcd::Zero(4);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(8, "bias", static_cast<std::uint64_t>(i)));
    ChannelRealization real = draw_channel(ch, rng);
    Eigen::VectorXcd y = transmit_pilot(real.h, pilot, rng);
    Eigen::VectorXcd ls = ls_estimate(quantize_mixed(y, part, spec, pilot, 1.0),
                                      pilot.power);
    for (int k = 0; k < 4; ++k) mean_err[k] += ls[k] - real.h[k];
  }
  mean_err /= static_cast<double>(n);
  CHECK(mean_err.norm() < 0.01 * std::sqrt(4.0));
}

TEST_CASE("complex/real packing") {
  Eigen::VectorXcd v(2);
  v << std::complex<double>(1.0, 2.0), std::complex<double>(3.0, -1.0);
  Eigen::VectorXd packed = complex_to_real(v);
  REQUIRE(packed.size() == 4);
  CHECK(packed[0] == 1.0);
  CHECK(packed[1] == 3.0);
  CHECK(packed[2] == 2.0);
  CHECK(packed[3] == -1.0);
  CHECK(real_to_complex(packed) == v);

  Rng rng(2);
  Eigen::VectorXcd w(64);
  for (int i = 0; i < 64; ++i) w[i] = rng.complex_gaussian(1.0);
  CHECK(complex_to_real(w).size() == 128);
  CHECK(real_to_complex(complex_to_real(w)) == w);

  Eigen::VectorXd odd(3);
  CHECK_THROWS_AS(real_to_complex(odd), std::invalid_argument);
}

TEST_CASE("quantize_scalar validates arguments") {
  CHECK_THROWS_AS(quantize_scalar(1.0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantize_scalar(1.0, 2, 0.0), std::invalid_argument);
}

TEST_CASE("clip scale lookup fails loudly for missing depths") {
  QuantizerSpec spec;
  CHECK(spec.clip_scale_for(1) == doctest::Approx(1.596));
  CHECK_THROWS_AS(spec.clip_scale_for(7), std::runtime_error);
}
