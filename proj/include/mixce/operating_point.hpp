// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mixce {

enum class AdcPattern { kBlock, kRandom };

std::string pattern_name(AdcPattern pattern);
AdcPattern pattern_from_name(const std::string& name);

struct OperatingPoint {
  double snr_db = 0.0;
  double eta = 0.5;
  AdcPattern pattern = AdcPattern::kBlock;
  std::optional<int> bits_low = 1;  // nullopt = unquantized
  std::string method;               // empty until a report row is emitted
};

// Canonical id "snr<s>_eta<e>_<pattern>_b<bits|inf>"; method not included.
std::string point_id(const OperatingPoint& point);

struct NmseReport {
  OperatingPoint point;
  double nmse = 0.0;
  double nmse_db = 0.0;
  std::int64_t sample_count = 0;
  std::int64_t excluded = 0;  // zero-norm samples left out of the mean
  std::uint64_t seed = 0;     // master seed of the run
  std::string model_path;     // empty for training-free methods
};

}  // namespace mixce
