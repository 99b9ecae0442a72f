#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace dnl {

/// Philox-4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// What a stream is used for; part of the counter so that streams with the
/// same (worker, iteration) but different roles never overlap.
enum class StreamTag : std::uint32_t {
  kCompressor = 1,
  kShuffle = 2,
  kSynthetic = 3,
  kPerturbation = 4,
  kTest = 5,
};

/// Counter-based random stream keyed by (seed, tag, worker, iteration).
///
/// Identical keys yield identical draws on every platform: only 32-bit
/// integer arithmetic and IEEE conversions are involved.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamTag tag, std::uint32_t worker, std::uint32_t iteration);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_zero();
  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p);
  double normal();
  /// r distinct indices drawn uniformly from [0, m), sorted ascending.
  std::vector<std::uint32_t> sample_subset(std::uint32_t m, std::uint32_t r);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t tag_;
  std::uint32_t worker_;
  std::uint32_t iteration_;
  std::uint32_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_second_ = false;
  bool have_normal_ = false;
  double normal_spare_ = 0.0;
};

}  // namespace dnl
