// SPDX-License-Identifier: Apache-2.0
//
// Binary dataset files. Layout (all integers and doubles little-endian):
//   bytes 0..7   magic "MIXCEDS1"
//   u32          format version (1)
//   u32          antenna count M
//   u64          sample count N
//   u64          generation seed
//   N records of 4M doubles: complex_to_real(h) then complex_to_real(ls)
//
// Regenerating a file from the same inputs reproduces it byte for byte.

#pragma once

#include <cstdint>
#include <filesystem>

#include "mixce/pipelines.hpp"

namespace mixce {

void write_sample_set(const std::filesystem::path& path, const SampleSet& set,
                      std::uint64_t seed);

SampleSet read_sample_set(const std::filesystem::path& path,
                          std::uint64_t* seed = nullptr);

}  // namespace mixce
