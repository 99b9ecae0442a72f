#include "dnl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "dnl/error.hpp"

namespace dnl {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, StreamTag tag, std::uint32_t worker,
                     std::uint32_t iteration)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      tag_(static_cast<std::uint32_t>(tag)),
      worker_(worker),
      iteration_(iteration) {}

std::uint64_t RngStream::next_u64() {
  if (have_second_) {
    have_second_ = false;
    return spare_;
  }
  const auto out = philox4x32({block_, tag_, worker_, iteration_}, key_);
  ++block_;
  if (block_ == 0) throw NumericalError("RngStream: counter exhausted");
  spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  have_second_ = true;
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open_zero() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw InputError("RngStream::below: bound must be positive");
  // Reject the short tail so every residue is equally likely.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v >= limit) return v % bound;
  }
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::normal() {
  if (have_normal_) {
    have_normal_ = false;
    return normal_spare_;
  }
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  normal_spare_ = radius * std::sin(angle);
  have_normal_ = true;
  return radius * std::cos(angle);
}

std::vector<std::uint32_t> RngStream::sample_subset(std::uint32_t m, std::uint32_t r) {
  if (r > m) throw InputError("sample_subset: r exceeds m");
  // Floyd's algorithm: r draws, no O(m) scratch space.
  std::vector<std::uint32_t> chosen;
  chosen.reserve(r);
  std::unordered_set<std::uint32_t> seen;
  for (std::uint32_t j = m - r; j < m; ++j) {
    const auto t = static_cast<std::uint32_t>(below(static_cast<std::uint64_t>(j) + 1));
    const std::uint32_t pick = seen.count(t) ? j : t;
    seen.insert(pick);
    chosen.push_back(pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace dnl
