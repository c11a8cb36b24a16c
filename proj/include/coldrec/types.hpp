#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace coldrec {

using Index = std::int64_t;

/// Dense row-major matrix; one row per user, item or frame.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Derives an independent sub-seed from the global seed and a stream name
/// ("split", "init", "synth", "tuner", ...). SplitMix64 over an FNV-1a hash.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace coldrec
