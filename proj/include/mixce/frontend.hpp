// SPDX-License-Identifier: Apache-2.0
//
// Pilot reception front end: AWGN pilot transmission, mixed-resolution
// uniform quantization, LS estimation, and the complex<->real packing
// shared by every network input/target.

#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>

#include "mixce/partition.hpp"
#include "mixce/rng.hpp"

namespace mixce {

struct PilotConfig {
  double power = 1.0;           // P (pilot symbol fixed to 1)
  double noise_variance = 0.1;  // sigma_0^2 per complex entry

  double snr_db(double path_power) const;
  static PilotConfig from_snr_db(double snr_db, double path_power,
                                 double power = 1.0);
  void validate() const;
};

// Step-size factors (step / input standard deviation) minimizing the MSE of
// the symmetric mid-rise uniform quantizer for a Gaussian input.
std::map<int, double> default_clip_scale();

struct QuantizerSpec {
  // nullopt = unquantized (the infinite-resolution tag).
  std::optional<int> bits_high = std::nullopt;
  std::optional<int> bits_low = 1;
  std::map<int, double> clip_scale = default_clip_scale();

  double clip_scale_for(int bits) const;  // throws std::runtime_error if absent
  void validate() const;
};

struct ReceivedSignal {
  Eigen::VectorXcd y;   // pre-quantization
  Eigen::VectorXcd r;   // post-quantization
  Eigen::VectorXcd ls;  // r / sqrt(P)
};

// y = sqrt(P) h + n with n i.i.d. CN(0, noise_variance).
Eigen::VectorXcd transmit_pilot(const Eigen::VectorXcd& h,
                                const PilotConfig& cfg, Rng& rng);

// Nearest point of the symmetric mid-rise codebook
//   {(k + 1/2 - 2^(bits-1)) * delta : k = 0..2^bits-1},
// saturating at the extreme levels. Q(0) = +delta/2 (the codebook has no
// zero level); Q(-x) = -Q(x) for all x != 0.
double quantize_scalar(double x, int bits, double delta);

// Entries in A pass through unchanged (or quantized at bits_high when
// finite); real and imaginary parts of entries in B are quantized
// independently with step clip_scale(bits) * sigma_dim, where
// sigma_dim = sqrt((P * path_power + noise_variance) / 2) is the
// per-real-dimension standard deviation of the received pilot.
Eigen::VectorXcd quantize_mixed(const Eigen::VectorXcd& y,
                                const AntennaPartition& partition,
                                const QuantizerSpec& spec,
                                const PilotConfig& pilot, double path_power);

Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& r, double power);

// [Re(v); Im(v)] stacking and its inverse.
Eigen::VectorXd complex_to_real(const Eigen::VectorXcd& v);
Eigen::VectorXcd real_to_complex(const Eigen::VectorXd& v);

}  // namespace mixce
