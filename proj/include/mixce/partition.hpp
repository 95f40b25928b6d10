// SPDX-License-Identifier: Apache-2.0
//
// Antenna index partition into the high-resolution set A and the
// low-resolution set B, with the per-antenna position maps used when
// splitting and reassembling sub-vectors.

#pragma once

#include <vector>

namespace mixce {

class AntennaPartition {
 public:
  // Empty partition; only meaningful after assignment from from_sets.
  AntennaPartition() = default;

  // Both sets must be strictly increasing, disjoint, and cover 0..M-1.
  // Throws std::invalid_argument otherwise.
  static AntennaPartition from_sets(std::vector<int> set_a,
                                    std::vector<int> set_b);

  const std::vector<int>& set_a() const { return set_a_; }
  const std::vector<int>& set_b() const { return set_b_; }
  int antenna_count() const { return static_cast<int>(in_a_.size()); }
  double eta() const {
    return static_cast<double>(set_a_.size()) / antenna_count();
  }

  bool in_a(int antenna) const { return in_a_[antenna]; }
  // Position of `antenna` within its own set's ordering (u_m over A, v_m over B).
  int pos_in_set(int antenna) const { return pos_[antenna]; }

 private:
  std::vector<int> set_a_;
  std::vector<int> set_b_;
  std::vector<bool> in_a_;
  std::vector<int> pos_;
};

}  // namespace mixce
