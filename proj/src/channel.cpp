// SPDX-License-Identifier: Apache-2.0

#include "mixce/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mixce {

std::vector<double> default_aoa_grid(int points) {
  if (points < 1) throw std::invalid_argument("aoa grid needs at least one point");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) {
    grid[k] = 2.0 * std::numbers::pi * k / points;
  }
  return grid;
}

void ChannelModelConfig::validate() const {
  if (antenna_count < 1) throw std::invalid_argument("antenna_count must be >= 1");
  if (path_count < 1) throw std::invalid_argument("path_count must be >= 1");
  if (!(path_power > 0.0)) throw std::invalid_argument("path_power must be > 0");
  if (!(spacing_wavelengths > 0.0))
    throw std::invalid_argument("spacing_wavelengths must be > 0");
  if (aoa_sampling != AoaSampling::kContinuousUniform && aoa_grid.empty())
    throw std::invalid_argument("grid sampling requires a non-empty aoa_grid");
  if (aoa_sampling == AoaSampling::kGridWithoutReplacement &&
      static_cast<std::size_t>(path_count) > aoa_grid.size())
    throw std::invalid_argument(
        "path_count exceeds aoa_grid size for sampling without replacement");
}

Eigen::VectorXcd steering_vector_raw(double phi, int antenna_count,
                                     double spacing_wavelengths) {
  if (antenna_count < 1) throw std::invalid_argument("antenna_count must be >= 1");
  Eigen::VectorXcd a(antenna_count);
  double step = -2.0 * std::numbers::pi * spacing_wavelengths * std::sin(phi);
  for (int m = 0; m < antenna_count; ++m) {
    a[m] = std::polar(1.0, step * m);
  }
  return a;
}

Eigen::VectorXcd steering_vector(double phi, int antenna_count,
                                 double spacing_wavelengths, int path_count) {
  if (path_count < 1) throw std::invalid_argument("path_count must be >= 1");
  return steering_vector_raw(phi, antenna_count, spacing_wavelengths) /
         std::sqrt(static_cast<double>(path_count));
}

namespace {

Eigen::VectorXd draw_aoas(const ChannelModelConfig& cfg, Rng& rng) {
  Eigen::VectorXd aoas(cfg.path_count);
  switch (cfg.aoa_sampling) {
    case AoaSampling::kGridWithoutReplacement: {
      // Partial Fisher-Yates over the grid indices.
      std::vector<int> idx(cfg.aoa_grid.size());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<int>(k);
      for (int l = 0; l < cfg.path_count; ++l) {
        std::size_t j = l + static_cast<std::size_t>(rng.below(idx.size() - l));
        std::swap(idx[l], idx[j]);
        aoas[l] = cfg.aoa_grid[idx[l]];
      }
      break;
    }
    case AoaSampling::kGridWithReplacement:
      for (int l = 0; l < cfg.path_count; ++l) {
        aoas[l] = cfg.aoa_grid[rng.below(cfg.aoa_grid.size())];
      }
      break;
    case AoaSampling::kContinuousUniform:
      for (int l = 0; l < cfg.path_count; ++l) {
        aoas[l] = 2.0 * std::numbers::pi * rng.uniform();
      }
      break;
  }
  return aoas;
}

}  // namespace

ChannelRealization draw_channel(const ChannelModelConfig& cfg, Rng& rng) {
  cfg.validate();
  ChannelRealization out;
  out.gains.resize(cfg.path_count);
  for (int l = 0; l < cfg.path_count; ++l) {
    out.gains[l] = rng.complex_gaussian(cfg.path_power);
  }
  out.aoas = draw_aoas(cfg, rng);
  out.h = Eigen::VectorXcd::Zero(cfg.antenna_count);
  for (int l = 0; l < cfg.path_count; ++l) {
    out.h += out.gains[l] * steering_vector(out.aoas[l], cfg.antenna_count,
                                            cfg.spacing_wavelengths,
                                            cfg.path_count);
  }
  return out;
}

Eigen::MatrixXcd analytic_covariance(const ChannelModelConfig& cfg) {
  cfg.validate();
  if (cfg.aoa_sampling == AoaSampling::kContinuousUniform) {
    throw std::invalid_argument(
        "analytic_covariance supports grid sampling only; "
        "use monte_carlo_covariance for continuous-uniform AoAs");
  }
  const int m = cfg.antenna_count;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
  for (double phi : cfg.aoa_grid) {
    Eigen::VectorXcd a = steering_vector_raw(phi, m, cfg.spacing_wavelengths);
    cov.noalias() += a * a.adjoint();
  }
  cov *= cfg.path_power / static_cast<double>(cfg.aoa_grid.size());
  return cov;
}

Eigen::MatrixXcd monte_carlo_covariance(const ChannelModelConfig& cfg,
                                        std::uint64_t seed,
                                        std::int64_t samples) {
  cfg.validate();
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int m = cfg.antenna_count;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
  for (std::int64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, "cov-sample", static_cast<std::uint64_t>(i)));
    ChannelRealization real = draw_channel(cfg, rng);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(real.h, 1.0);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(samples);
}

}  // namespace mixce
