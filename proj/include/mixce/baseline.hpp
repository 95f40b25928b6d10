// SPDX-License-Identifier: Apache-2.0
//
// LMMSE channel estimation baseline with per-resolution distortion factors.
//
// For a sub-vector over antenna set D with covariance C and LS input r:
//   h_hat = C * (alpha*C + (sigma0^2/P)*I + (1-alpha)*diag(C))^-1 * r
// The diag term uses the expectation diag(C) of the instantaneous
// diag(h h^H), which makes the estimator realizable. With alpha = 1 it is
// the classical LMMSE filter.

#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>

namespace mixce {

enum class LmmseMode {
  kStandard,      // unquantized antennas use alpha_highres (default 1)
  kPaperLiteral,  // unquantized antennas use alpha = 0
};

// 1 - (normalized distortion of the default uniform quantizer on a Gaussian
// input); the values match the quantizer Monte-Carlo oracle.
std::map<int, double> default_alpha_table();

struct LmmseConfig {
  LmmseMode mode = LmmseMode::kStandard;
  std::map<int, double> alpha_table = default_alpha_table();
  double alpha_highres = 1.0;

  void validate() const;
};

// Distortion factor for an ADC of the given resolution; nullopt bits means
// unquantized and resolves per cfg.mode. Missing finite entries are a
// configuration error (std::runtime_error).
double distortion_factor(std::optional<int> bits, const LmmseConfig& cfg);

// Precomputed gain matrix C * D^-1 for repeated application at one
// (covariance, alpha, SNR) operating point.
class LmmseEstimator {
 public:
  LmmseEstimator(const Eigen::MatrixXcd& covariance, double alpha,
                 double power, double noise_variance);

  const Eigen::MatrixXcd& gain() const { return gain_; }
  Eigen::VectorXcd estimate(const Eigen::VectorXcd& ls_sub) const;
  Eigen::MatrixXcd estimate_batch(const Eigen::MatrixXcd& ls_cols) const;

 private:
  Eigen::MatrixXcd gain_;
};

// One-shot convenience wrapper around LmmseEstimator.
Eigen::VectorXcd lmmse_estimate(const Eigen::VectorXcd& ls_sub,
                                const Eigen::MatrixXcd& covariance,
                                double alpha, double power,
                                double noise_variance);

// Rows/columns of `cov` restricted to `indices`.
Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& cov,
                           const std::vector<int>& indices);

}  // namespace mixce
