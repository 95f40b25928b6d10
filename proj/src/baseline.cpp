// SPDX-License-Identifier: Apache-2.0

#include "mixce/baseline.hpp"

#include <stdexcept>
#include <string>

namespace mixce {

std::map<int, double> default_alpha_table() {
  return {{1, 0.6366}, {2, 0.8812}, {3, 0.9626}, {4, 0.9885}};
}

void LmmseConfig::validate() const {
  for (const auto& [bits, alpha] : alpha_table) {
    if (bits < 1 || alpha < 0.0 || alpha > 1.0)
      throw std::invalid_argument("alpha_table entries must map bits >= 1 into [0, 1]");
  }
  if (alpha_highres < 0.0 || alpha_highres > 1.0)
    throw std::invalid_argument("alpha_highres must lie in [0, 1]");
}

double distortion_factor(std::optional<int> bits, const LmmseConfig& cfg) {
  cfg.validate();
  if (!bits) {
    return cfg.mode == LmmseMode::kStandard ? cfg.alpha_highres : 0.0;
  }
  if (*bits < 1) throw std::invalid_argument("bits must be >= 1 when finite");
  auto it = cfg.alpha_table.find(*bits);
  if (it == cfg.alpha_table.end())
    throw std::runtime_error("no alpha_table entry for " +
                             std::to_string(*bits) + " bits");
  return it->second;
}

LmmseEstimator::LmmseEstimator(const Eigen::MatrixXcd& covariance, double alpha,
                               double power, double noise_variance) {
  if (covariance.rows() != covariance.cols())
    throw std::invalid_argument("covariance must be square");
  if (!(power > 0.0)) throw std::invalid_argument("power must be > 0");
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("noise variance must be > 0");

  Eigen::Index n = covariance.rows();
  Eigen::MatrixXcd denom = alpha * covariance;
  denom.diagonal().array() += noise_variance / power;
  denom.diagonal() += (1.0 - alpha) * covariance.diagonal();

  Eigen::LDLT<Eigen::MatrixXcd> ldlt(denom);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("LMMSE regularized matrix factorization failed");
  // gain = C * denom^-1; both C and denom are Hermitian.
  Eigen::MatrixXcd solved = ldlt.solve(covariance);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("LMMSE solve failed");
  gain_ = solved.adjoint();
}

Eigen::VectorXcd LmmseEstimator::estimate(const Eigen::VectorXcd& ls_sub) const {
  if (ls_sub.size() != gain_.cols())
    throw std::invalid_argument("LS sub-vector length does not match covariance");
  return gain_ * ls_sub;
}

Eigen::MatrixXcd LmmseEstimator::estimate_batch(
    const Eigen::MatrixXcd& ls_cols) const {
  if (ls_cols.rows() != gain_.cols())
    throw std::invalid_argument("LS sub-vector length does not match covariance");
  return gain_ * ls_cols;
}

Eigen::VectorXcd lmmse_estimate(const Eigen::VectorXcd& ls_sub,
                                const Eigen::MatrixXcd& covariance,
                                double alpha, double power,
                                double noise_variance) {
  return LmmseEstimator(covariance, alpha, power, noise_variance)
      .estimate(ls_sub);
}

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& cov,
                           const std::vector<int>& indices) {
  Eigen::MatrixXcd out(indices.size(), indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = 0; j < indices.size(); ++j) {
      out(i, j) = cov(indices[i], indices[j]);
    }
  }
  return out;
}

}  // namespace mixce
