// SPDX-License-Identifier: Apache-2.0

#include "mixce/partition.hpp"

#include <stdexcept>

namespace mixce {

AntennaPartition AntennaPartition::from_sets(std::vector<int> set_a,
                                             std::vector<int> set_b) {
  AntennaPartition p = {};
  int m = static_cast<int>(set_a.size() + set_b.size());
  if (m < 1) throw std::invalid_argument("partition must cover at least one antenna");
  p.in_a_.assign(m, false);
  p.pos_.assign(m, -1);

  auto place = [&](const std::vector<int>& set, bool is_a) {
    int prev = -1;
    for (std::size_t i = 0; i < set.size(); ++i) {
      int antenna = set[i];
      if (antenna <= prev)
        throw std::invalid_argument("partition sets must be strictly increasing");
      prev = antenna;
      if (antenna < 0 || antenna >= m)
        throw std::invalid_argument("partition index out of range");
      if (p.pos_[antenna] != -1)
        throw std::invalid_argument("partition sets must be disjoint");
      p.in_a_[antenna] = is_a;
      p.pos_[antenna] = static_cast<int>(i);
    }
  };
  place(set_a, true);
  place(set_b, false);
  // Coverage follows from disjointness plus the range/size check.
  p.set_a_ = std::move(set_a);
  p.set_b_ = std::move(set_b);
  return p;
}

}  // namespace mixce
