#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnl {

/// Dense labeled dataset: row-major feature matrix plus +/-1 labels.
class Dataset {
 public:
  Dataset(std::size_t d, std::vector<double> features, std::vector<int> labels);

  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const double> point(std::size_t k) const { return {features_.data() + k * d_, d_}; }
  int label(std::size_t k) const { return labels_[k]; }
  std::span<const double> features() const noexcept { return features_; }
  std::span<const int> labels() const noexcept { return labels_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t d_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

/// n shards of m dataset indices each; shards are disjoint.
struct Partition {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::vector<std::size_t>> shards;
};

/// Parses LIBSVM sparse text ("<label> <idx>:<val> ..."). Labels 0/-1 map to
/// -1 and +1/1 to +1. d is the largest index seen, or d_hint when larger.
Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> d_hint = std::nullopt);

/// Reads a plain or gzip-compressed LIBSVM file. Throws IoError when the
/// file cannot be opened.
Dataset load_libsvm_file(const std::filesystem::path& path,
                         std::optional<std::size_t> d_hint = std::nullopt);

/// Writes nonzero features only, values in shortest round-trip form.
std::string to_libsvm(const Dataset& ds);

/// Seeded shuffle, then the first n*floor(count/n) points are dealt
/// round-robin to n shards. The remainder is dropped.
Partition partition(const Dataset& ds, std::size_t n, std::uint64_t shuffle_seed);

/// n*m points with i.i.d. Normal(mean, variance) entries and uniform +/-1
/// labels.
Dataset synth_artificial(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed,
                         double mean = 10.0, double variance = 10.0);

/// One-hot encoded categorical data: each point activates exactly one
/// feature per group, with Zipf-skewed category frequencies. Labels come
/// from a seeded logistic teacher with an intercept chosen so that about
/// positive_rate of the points are +1.
Dataset synth_onehot(std::size_t count, std::span<const std::size_t> group_sizes,
                     std::uint64_t seed, double positive_rate);

/// 2265 x 123 one-hot surrogate shaped like LIBSVM a2a (14 active binary
/// features per row).
Dataset a2a_like(std::uint64_t seed = 2265);
/// 11000 x 68 one-hot surrogate shaped like LIBSVM phishing.
Dataset phishing_like(std::uint64_t seed = 11000);

}  // namespace dnl
