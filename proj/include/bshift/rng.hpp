#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bshift {

/// Fixed stream offsets used to derive independent generators from one seed.
enum class Stream : std::uint64_t {
  kSyntheticRows = 1,
  kSyntheticLabels = 2,
  kIndexSampling = 3,
  kAnchorSelection = 4,
  kVerification = 5,
  kMonteCarlo = 1000,  // replication r: kMonteCarlo + 2r (indices), + 2r + 1 (anchor)
};

/// Reproducible random source: std::mt19937_64 seeded through std::seed_seq
/// from (seed, stream). Derived draws are computed here from raw 64-bit
/// outputs so results do not depend on the standard library's distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform index in [0, n), unbiased (rejection sampling).
  std::size_t index(std::size_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bshift
