// SPDX-License-Identifier: Apache-2.0

#include "mixce/frontend.hpp"

#include <cmath>
#include <stdexcept>

namespace mixce {

double PilotConfig::snr_db(double path_power) const {
  return 10.0 * std::log10(power * path_power / noise_variance);
}

PilotConfig PilotConfig::from_snr_db(double snr_db, double path_power,
                                     double power) {
  PilotConfig cfg;
  cfg.power = power;
  cfg.noise_variance = power * path_power * std::pow(10.0, -snr_db / 10.0);
  cfg.validate();
  return cfg;
}

void PilotConfig::validate() const {
  if (!(power > 0.0)) throw std::invalid_argument("pilot power must be > 0");
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("noise variance must be > 0");
}

std::map<int, double> default_clip_scale() {
  return {{1, 1.596}, {2, 0.996}, {3, 0.586}, {4, 0.335}};
}

double QuantizerSpec::clip_scale_for(int bits) const {
  auto it = clip_scale.find(bits);
  if (it == clip_scale.end())
    throw std::runtime_error("no clip_scale entry for " + std::to_string(bits) +
                             " bits");
  return it->second;
}

void QuantizerSpec::validate() const {
  if (bits_high && *bits_high < 1)
    throw std::invalid_argument("bits_high must be >= 1 when finite");
  if (bits_low && *bits_low < 1)
    throw std::invalid_argument("bits_low must be >= 1 when finite");
  for (const auto& [bits, scale] : clip_scale) {
    if (bits < 1 || !(scale > 0.0))
      throw std::invalid_argument("clip_scale entries must map bits >= 1 to a positive factor");
  }
}

Eigen::VectorXcd transmit_pilot(const Eigen::VectorXcd& h,
                                const PilotConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!h.allFinite()) throw std::invalid_argument("channel vector must be finite");
  double amp = std::sqrt(cfg.power);
  Eigen::VectorXcd y(h.size());
  for (Eigen::Index m = 0; m < h.size(); ++m) {
    y[m] = amp * h[m] + rng.complex_gaussian(cfg.noise_variance);
  }
  return y;
}

double quantize_scalar(double x, int bits, double delta) {
  if (bits < 1) throw std::invalid_argument("bits must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  double top = std::ldexp(1.0, bits - 1) - 0.5;  // highest level / delta
  double mag = std::floor(std::abs(x) / delta) + 0.5;
  if (mag > top) mag = top;
  return x < 0.0 ? -mag * delta : mag * delta;
}

Eigen::VectorXcd quantize_mixed(const Eigen::VectorXcd& y,
                                const AntennaPartition& partition,
                                const QuantizerSpec& spec,
                                const PilotConfig& pilot, double path_power) {
  spec.validate();
  pilot.validate();
  if (y.size() != partition.antenna_count())
    throw std::invalid_argument("signal length does not match partition");

  double sigma_dim =
      std::sqrt((pilot.power * path_power + pilot.noise_variance) / 2.0);
  auto quantize_set = [&](const std::vector<int>& set, std::optional<int> bits,
                          Eigen::VectorXcd& r) {
    if (!bits) return;  // unquantized
    double delta = spec.clip_scale_for(*bits) * sigma_dim;
    for (int m : set) {
      r[m] = {quantize_scalar(y[m].real(), *bits, delta),
              quantize_scalar(y[m].imag(), *bits, delta)};
    }
  };

  Eigen::VectorXcd r = y;
  quantize_set(partition.set_a(), spec.bits_high, r);
  quantize_set(partition.set_b(), spec.bits_low, r);
  return r;
}

Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& r, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("pilot power must be > 0");
  return r / std::sqrt(power);
}

Eigen::VectorXd complex_to_real(const Eigen::VectorXcd& v) {
  Eigen::VectorXd out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

Eigen::VectorXcd real_to_complex(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0)
    throw std::invalid_argument("real vector length must be even");
  Eigen::Index k = v.size() / 2;
  Eigen::VectorXcd out(k);
  out.real() = v.head(k);
  out.imag() = v.tail(k);
  return out;
}

}  // namespace mixce
