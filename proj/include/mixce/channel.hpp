// SPDX-License-Identifier: Apache-2.0
//
// Multipath channel model over a uniform linear array: steering vectors,
// seeded channel draws and the analytic channel covariance used by the
// LMMSE baseline.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixce/rng.hpp"

namespace mixce {

enum class AoaSampling {
  kGridWithoutReplacement,
  kGridWithReplacement,
  kContinuousUniform,
};

// Uniform angle grid {2*pi*k/points : k = 0..points-1}.
std::vector<double> default_aoa_grid(int points);

struct ChannelModelConfig {
  int antenna_count = 64;            // M
  int path_count = 8;                // L
  double path_power = 1.0;           // average power gain per path
  double spacing_wavelengths = 0.5;  // antenna spacing d / lambda
  std::vector<double> aoa_grid = default_aoa_grid(20);
  AoaSampling aoa_sampling = AoaSampling::kGridWithoutReplacement;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct ChannelRealization {
  Eigen::VectorXcd h;      // length M
  Eigen::VectorXcd gains;  // per-path complex gains, length L
  Eigen::VectorXd aoas;    // per-path angles of arrival, length L
};

// Array response with unit-modulus entries: entry m = exp(-j*2*pi*d/lambda*m*sin(phi)).
Eigen::VectorXcd steering_vector_raw(double phi, int antenna_count,
                                     double spacing_wavelengths);

// Normalized response; every entry has modulus 1/sqrt(path_count).
Eigen::VectorXcd steering_vector(double phi, int antenna_count,
                                 double spacing_wavelengths, int path_count);

// Draws gains CN(0, path_power) i.i.d., AoAs per cfg.aoa_sampling, and
// assembles h as the gain-weighted sum of normalized steering vectors.
ChannelRealization draw_channel(const ChannelModelConfig& cfg, Rng& rng);

// E{h h^H} for the grid sampling modes:
//   path_power / |grid| * sum_k a_raw(phi_k) a_raw(phi_k)^H.
// Identical for both grid modes since path gains are independent and
// zero-mean and each AoA is marginally uniform on the grid.
// Throws std::invalid_argument for continuous-uniform sampling; use
// monte_carlo_covariance for that mode.
Eigen::MatrixXcd analytic_covariance(const ChannelModelConfig& cfg);

// Empirical E{h h^H} over `samples` independent draws; per-sample seeds are
// derive_seed(seed, "cov-sample", i), so the estimate is independent of any
// internal parallelization.
Eigen::MatrixXcd monte_carlo_covariance(const ChannelModelConfig& cfg,
                                        std::uint64_t seed,
                                        std::int64_t samples);

}  // namespace mixce
