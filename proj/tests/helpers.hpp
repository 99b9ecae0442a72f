#pragma once

#include <cmath>
#include <vector>

#include "dnl/data.hpp"
#include "dnl/linalg.hpp"
#include "dnl/problem.hpp"
#include "dnl/rng.hpp"

namespace testing {

inline dnl::Dataset gaussian_dataset(std::size_t count, std::size_t d, std::uint64_t seed,
                                     double scale = 1.0) {
  dnl::RngStream rng(seed, dnl::StreamTag::kTest, 0, 0);
  std::vector<double> f(count * d);
  std::vector<int> b(count);
  for (auto& v : f) v = scale * rng.normal();
  for (auto& l : b) l = rng.bernoulli(0.5) ? 1 : -1;
  return dnl::Dataset(d, std::move(f), std::move(b));
}

struct Bundle {
  dnl::Dataset ds;
  dnl::Partition part;
  dnl::Problem p;
};

inline Bundle small_problem(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed,
                            dnl::LossKind loss, double lambda, double scale = 1.0) {
  dnl::Dataset ds = gaussian_dataset(n * m, d, seed, scale);
  dnl::Partition part = dnl::partition(ds, n, seed);
  dnl::Problem p(ds, part, dnl::LossModel{loss}, lambda);
  return {std::move(ds), std::move(part), std::move(p)};
}

inline dnl::Vector random_vector(std::size_t d, std::uint64_t seed, double scale = 1.0) {
  dnl::RngStream rng(seed, dnl::StreamTag::kTest, 1, 0);
  dnl::Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline dnl::SymMatrix random_symmetric(std::size_t d, std::uint64_t seed) {
  dnl::RngStream rng(seed, dnl::StreamTag::kTest, 2, 0);
  dnl::SymMatrix a(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) a.set(i, j, rng.normal());
  }
  return a;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace testing
