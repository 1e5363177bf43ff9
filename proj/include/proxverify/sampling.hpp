#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "proxverify/vecspace.hpp"

namespace proxverify {

/// SplitMix64 (Steele, Lea & Flood). The exact update and output mix are part of
/// the reproducibility contract: reports quote the seed, and any machine regenerates
/// the same points from it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [-radius, radius).
  double next_symmetric(double radius) { return radius * (2.0 * next_unit() - 1.0); }

 private:
  std::uint64_t state_;
};

struct SampleSpec {
  std::uint64_t seed = 42;
  std::size_t count = 200;
  double radius = 1.0;
};

using PointPair = std::pair<Vector, Vector>;

/// `count` points uniform in [-radius, radius]^dim, coordinates drawn in order.
std::vector<Vector> sample_points(const SampleSpec& spec, std::size_t dim);

/// `count` pairs; pair k uses the (2k)-th and (2k+1)-th points of the same stream.
std::vector<PointPair> sample_pairs(const SampleSpec& spec, std::size_t dim);

/// Random symmetric PSD matrix B B^T / dim with entries of B uniform in [-1, 1).
SymOperator sample_psd_operator(SplitMix64& rng, std::size_t dim);
/// Random symmetric matrix with entries uniform in [-scale, scale).
SymOperator sample_symmetric_operator(SplitMix64& rng, std::size_t dim, double scale);

}  // namespace proxverify
