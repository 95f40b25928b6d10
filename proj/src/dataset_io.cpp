// SPDX-License-Identifier: Apache-2.0

#include "mixce/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "mixce/frontend.hpp"

namespace mixce {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'X', 'C', 'E', 'D', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& buf, double d) {
  put_u64(buf, std::bit_cast<std::uint64_t>(d));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_sample_set(const std::filesystem::path& path, const SampleSet& set,
                      std::uint64_t seed) {
  if (set.h.rows() != set.ls.rows() || set.h.cols() != set.ls.cols())
    throw std::invalid_argument("sample set h/ls shapes differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open dataset for writing: " +
                                     path.string());
  std::vector<unsigned char> buf;
  buf.reserve(24);
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(set.h.rows()));
  put_u64(buf, static_cast<std::uint64_t>(set.h.cols()));
  put_u64(buf, seed);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));

  const Eigen::Index m = set.h.rows();
  for (Eigen::Index n = 0; n < set.h.cols(); ++n) {
    buf.clear();
    for (Eigen::Index r = 0; r < m; ++r) put_f64(buf, set.h(r, n).real());
    for (Eigen::Index r = 0; r < m; ++r) put_f64(buf, set.h(r, n).imag());
    for (Eigen::Index r = 0; r < m; ++r) put_f64(buf, set.ls(r, n).real());
    for (Eigen::Index r = 0; r < m; ++r) put_f64(buf, set.ls(r, n).imag());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw std::runtime_error("failed writing dataset: " + path.string());
}

SampleSet read_sample_set(const std::filesystem::path& path,
                          std::uint64_t* seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a mixce dataset file: " + path.string());
  std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported dataset version in " + path.string());
  std::uint32_t m = get_u32(in);
  std::uint64_t count = get_u64(in);
  std::uint64_t file_seed = get_u64(in);
  if (seed) *seed = file_seed;

  SampleSet set;
  set.h.resize(m, static_cast<Eigen::Index>(count));
  set.ls.resize(m, static_cast<Eigen::Index>(count));
  for (std::uint64_t n = 0; n < count; ++n) {
    for (std::uint32_t r = 0; r < m; ++r) set.h(r, n).real(get_f64(in));
    for (std::uint32_t r = 0; r < m; ++r) set.h(r, n).imag(get_f64(in));
    for (std::uint32_t r = 0; r < m; ++r) set.ls(r, n).real(get_f64(in));
    for (std::uint32_t r = 0; r < m; ++r) set.ls(r, n).imag(get_f64(in));
  }
  if (!in) throw std::runtime_error("truncated dataset: " + path.string());
  return set;
}

}  // namespace mixce
