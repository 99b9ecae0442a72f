#include "dnl/compressors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dnl/error.hpp"

namespace dnl {

CompressorSpec CompressorSpec::identity() { return {}; }

CompressorSpec CompressorSpec::random_r(std::size_t r) {
  CompressorSpec c;
  c.kind = CompressorKind::kRandomR;
  c.r = r;
  return c;
}

CompressorSpec CompressorSpec::dithering(std::size_t s, double q) {
  CompressorSpec c;
  c.kind = CompressorKind::kDithering;
  c.s = s;
  c.q = q;
  return c;
}

CompressorSpec CompressorSpec::natural() {
  CompressorSpec c;
  c.kind = CompressorKind::kNatural;
  return c;
}

CompressorSpec CompressorSpec::bernoulli(CompressorSpec inner, double p) {
  CompressorSpec c;
  c.kind = CompressorKind::kBernoulli;
  c.p = p;
  c.inner = std::make_shared<const CompressorSpec>(std::move(inner));
  return c;
}

bool operator==(const CompressorSpec& a, const CompressorSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case CompressorKind::kIdentity:
    case CompressorKind::kNatural:
      return true;
    case CompressorKind::kRandomR:
      return a.r == b.r;
    case CompressorKind::kDithering:
      return a.s == b.s && a.q == b.q;
    case CompressorKind::kBernoulli:
      return a.p == b.p && a.inner && b.inner && *a.inner == *b.inner;
  }
  return false;
}

std::string to_string(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::kIdentity: return "identity";
    case CompressorKind::kRandomR: return "random_r";
    case CompressorKind::kDithering: return "dithering";
    case CompressorKind::kNatural: return "natural";
    case CompressorKind::kBernoulli: return "bernoulli";
  }
  return "?";
}

CompressorKind compressor_kind_from_string(const std::string& name) {
  if (name == "identity") return CompressorKind::kIdentity;
  if (name == "random_r") return CompressorKind::kRandomR;
  if (name == "dithering") return CompressorKind::kDithering;
  if (name == "natural") return CompressorKind::kNatural;
  if (name == "bernoulli") return CompressorKind::kBernoulli;
  throw ConfigError("unknown compressor kind '" + name + "'");
}

void CompressorSpec::validate(std::size_t len) const {
  if (len == 0) throw InputError("compressor: vector length must be at least 1");
  switch (kind) {
    case CompressorKind::kIdentity:
    case CompressorKind::kNatural:
      return;
    case CompressorKind::kRandomR:
      if (r < 1 || r > len) {
        throw InputError("random_r: r=" + std::to_string(r) + " outside [1, " +
                         std::to_string(len) + "]");
      }
      return;
    case CompressorKind::kDithering:
      if (!(q >= 1.0)) throw InputError("dithering: q must be >= 1");
      return;
    case CompressorKind::kBernoulli:
      if (!(p > 0.0 && p <= 1.0)) throw InputError("bernoulli: p must lie in (0, 1]");
      if (!inner) throw InputError("bernoulli: missing inner compressor");
      if (inner->kind == CompressorKind::kBernoulli) {
        throw InputError("bernoulli: nested Bernoulli wrappers are not supported");
      }
      inner->validate(len);
      return;
  }
}

std::size_t CompressorSpec::levels(std::size_t len) const {
  if (s > 0) return s;
  const auto rounded = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  return rounded == 0 ? 1 : rounded;
}

std::string CompressorSpec::describe() const {
  switch (kind) {
    case CompressorKind::kIdentity: return "identity";
    case CompressorKind::kRandomR: return "random_r(r=" + std::to_string(r) + ")";
    case CompressorKind::kDithering:
      return "dithering(s=" + (s == 0 ? std::string("sqrt") : std::to_string(s)) + ")";
    case CompressorKind::kNatural: return "natural";
    case CompressorKind::kBernoulli: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", p);
      return "bernoulli(" + inner->describe() + ", p=" + buf + ")";
    }
  }
  return "?";
}

namespace {

double natural_round(double t, RngStream& rng) {
  if (t == 0.0) return 0.0;
  const double mag = std::abs(t);
  int e = 0;
  std::frexp(mag, &e);  // mag = f * 2^e, f in [0.5, 1)
  const double low = std::ldexp(1.0, e - 1);
  if (mag == low) return t;
  const double high = 2.0 * low;
  const double p_low = (high - mag) / low;
  return std::copysign(rng.uniform() < p_low ? low : high, t);
}

}  // namespace

CompressedVector compress(const CompressorSpec& spec, std::span<const double> x, RngStream& rng) {
  const std::size_t len = x.size();
  spec.validate(len);
  CompressedVector out;
  out.values.assign(len, 0.0);
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      out.values.assign(x.begin(), x.end());
      break;
    case CompressorKind::kRandomR: {
      const double scale = static_cast<double>(len) / static_cast<double>(spec.r);
      for (std::uint32_t j : rng.sample_subset(static_cast<std::uint32_t>(len),
                                               static_cast<std::uint32_t>(spec.r))) {
        out.values[j] = scale * x[j];
      }
      break;
    }
    case CompressorKind::kDithering: {
      double qnorm = 0.0;
      if (spec.q == 2.0) {
        qnorm = norm(x);
      } else {
        for (double v : x) qnorm += std::pow(std::abs(v), spec.q);
        qnorm = std::pow(qnorm, 1.0 / spec.q);
      }
      if (qnorm == 0.0) break;
      const auto s = static_cast<double>(spec.levels(len));
      for (std::size_t j = 0; j < len; ++j) {
        if (x[j] == 0.0) continue;
        const double ratio = std::abs(x[j]) / qnorm * s;
        const double level = std::floor(ratio);
        double xi = level;
        if (level < s) xi += rng.uniform() < ratio - level ? 1.0 : 0.0;
        out.values[j] = std::copysign(qnorm * xi / s, x[j]);
      }
      break;
    }
    case CompressorKind::kNatural:
      for (std::size_t j = 0; j < len; ++j) out.values[j] = natural_round(x[j], rng);
      break;
    case CompressorKind::kBernoulli:
      out.fired = rng.bernoulli(spec.p);
      if (out.fired) {
        out.values = compress(*spec.inner, x, rng).values;
        for (double& v : out.values) v /= spec.p;
      }
      break;
  }
  return out;
}

double omega(const CompressorSpec& spec, std::size_t len) {
  spec.validate(len);
  const auto m = static_cast<double>(len);
  switch (spec.kind) {
    case CompressorKind::kIdentity: return 0.0;
    case CompressorKind::kRandomR: return m / static_cast<double>(spec.r) - 1.0;
    case CompressorKind::kDithering: {
      const auto s = static_cast<double>(spec.levels(len));
      if (spec.q == 2.0) return std::min(m / (s * s), std::sqrt(m) / s);
      return 2.0 + (std::sqrt(m) + std::pow(m, 1.0 / spec.q)) / s;
    }
    case CompressorKind::kNatural: return 0.125;
    case CompressorKind::kBernoulli: return (omega(*spec.inner, len) + 1.0) / spec.p - 1.0;
  }
  return 0.0;
}

std::uint64_t log2_binomial_ceil(std::uint64_t len, std::uint64_t r) {
  if (r > len) throw InputError("log2_binomial_ceil: r exceeds length");
  const std::uint64_t k = std::min(r, len - r);
  unsigned __int128 c = 1;
  bool exact = true;
  for (std::uint64_t t = 1; t <= k; ++t) {
    c = c * (len - k + t) / t;  // stays integral at every step
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      exact = false;
      break;
    }
  }
  if (exact) {
    const auto v = static_cast<std::uint64_t>(c);
    return v <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(v - 1));
  }
  long double bits = 0.0L;
  for (std::uint64_t t = 1; t <= k; ++t) {
    bits += std::log2(static_cast<long double>(len - k + t)) - std::log2(static_cast<long double>(t));
  }
  return static_cast<std::uint64_t>(std::ceil(bits - 1e-9L));
}

std::uint64_t bit_cost(const CompressorSpec& spec, std::size_t len, std::uint64_t scalar_bits) {
  spec.validate(len);
  switch (spec.kind) {
    case CompressorKind::kIdentity: return scalar_bits * len;
    case CompressorKind::kRandomR: return scalar_bits * spec.r + log2_binomial_ceil(len, spec.r);
    case CompressorKind::kDithering: return (28 * static_cast<std::uint64_t>(len) + 9) / 10 + scalar_bits;
    case CompressorKind::kNatural: return 9 * static_cast<std::uint64_t>(len);
    case CompressorKind::kBernoulli: return bit_cost(*spec.inner, len, scalar_bits);
  }
  return 0;
}

std::uint64_t message_bits(const CompressorSpec& spec, std::size_t len, const CompressedVector& msg,
                           std::uint64_t scalar_bits) {
  if (spec.kind == CompressorKind::kBernoulli && !msg.fired) return 1;
  return bit_cost(spec, len, scalar_bits);
}

}  // namespace dnl
