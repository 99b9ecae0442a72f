#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dnl/linalg.hpp"
#include "dnl/rng.hpp"

namespace dnl {

enum class CompressorKind { kIdentity, kRandomR, kDithering, kNatural, kBernoulli };

/// Unbiased randomized compressor C with E[C(x)] = x and
/// E||C(x)||^2 <= (omega + 1) ||x||^2.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t r = 1;    // random-r: kept coordinates
  std::size_t s = 0;    // dithering levels; 0 selects round(sqrt(len))
  double q = 2.0;       // dithering norm
  double p = 1.0;       // Bernoulli firing probability
  std::shared_ptr<const CompressorSpec> inner;  // Bernoulli wrapped compressor

  static CompressorSpec identity();
  static CompressorSpec random_r(std::size_t r);
  static CompressorSpec dithering(std::size_t s = 0, double q = 2.0);
  static CompressorSpec natural();
  static CompressorSpec bernoulli(CompressorSpec inner, double p);

  /// Throws InputError when the parameters are invalid for vectors of length len.
  void validate(std::size_t len) const;
  std::size_t levels(std::size_t len) const;
  std::string describe() const;

  friend bool operator==(const CompressorSpec& a, const CompressorSpec& b);
};

std::string to_string(CompressorKind kind);
CompressorKind compressor_kind_from_string(const std::string& name);

struct CompressedVector {
  Vector values;      // dense C(x)
  bool fired = true;  // false only for a Bernoulli wrapper that sent nothing
};

CompressedVector compress(const CompressorSpec& spec, std::span<const double> x, RngStream& rng);

double omega(const CompressorSpec& spec, std::size_t len);

/// ceil(log2(C(len, r))), exact while the binomial fits in 64 bits.
std::uint64_t log2_binomial_ceil(std::uint64_t len, std::uint64_t r);

/// Ledger cost of one transmitted C(x) of length len:
///   identity 32 len, random-r ceil(32 r + log2 C(len, r)),
///   dithering ceil(2.8 len + 32), natural 9 len, Bernoulli: inner cost.
std::uint64_t bit_cost(const CompressorSpec& spec, std::size_t len, std::uint64_t scalar_bits = 32);

/// Cost of a concrete message: a Bernoulli wrapper that did not fire costs 1 bit.
std::uint64_t message_bits(const CompressorSpec& spec, std::size_t len, const CompressedVector& msg,
                           std::uint64_t scalar_bits = 32);

}  // namespace dnl
