#include "dnl/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "dnl/error.hpp"
#include "dnl/rng.hpp"

namespace dnl {

Dataset::Dataset(std::size_t d, std::vector<double> features, std::vector<int> labels)
    : d_(d), features_(std::move(features)), labels_(std::move(labels)) {
  if (d_ == 0) throw InputError("Dataset: feature dimension must be at least 1");
  if (labels_.empty()) throw InputError("Dataset: at least one point is required");
  if (features_.size() != d_ * labels_.size()) {
    throw InputError("Dataset: feature array does not match count x d");
  }
  for (int b : labels_) {
    if (b != 1 && b != -1) throw InputError("Dataset: labels must be -1 or +1");
  }
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> d_hint) {
  struct Row {
    int label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::size_t line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && !is_space(line[pos])) ++pos;
      if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    if (tokens.empty()) continue;

    double raw_label = 0.0;
    if (!parse_double(tokens[0], raw_label)) {
      throw ParseError(line_no, "malformed label '" + std::string(tokens[0]) + "'");
    }
    Row row;
    if (raw_label == 1.0) {
      row.label = 1;
    } else if (raw_label == -1.0 || raw_label == 0.0) {
      row.label = -1;
    } else {
      throw ParseError(line_no, "label outside {-1, 0, +1}: '" + std::string(tokens[0]) + "'");
    }

    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw ParseError(line_no, "malformed feature token '" + std::string(tok) + "'");
      }
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, index);
      if (ec != std::errc() || ptr != tok.data() + colon || index == 0) {
        throw ParseError(line_no, "malformed feature index in '" + std::string(tok) + "'");
      }
      double value = 0.0;
      if (!parse_double(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed feature value in '" + std::string(tok) + "'");
      }
      if (index <= prev) {
        throw ParseError(line_no, "feature indices must be strictly increasing (" +
                                      std::to_string(index) + " after " + std::to_string(prev) +
                                      ")");
      }
      prev = index;
      max_index = std::max(max_index, index);
      row.entries.emplace_back(index - 1, value);
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw InputError("parse_libsvm: no data points");
  const std::size_t d = std::max(max_index, d_hint.value_or(0));
  if (d == 0) throw InputError("parse_libsvm: no features and no dimension hint");

  std::vector<double> features(rows.size() * d, 0.0);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (const auto& [j, v] : rows[k].entries) features[k * d + j] = v;
    labels.push_back(rows[k].label);
  }
  return Dataset(d, std::move(features), std::move(labels));
}

Dataset load_libsvm_file(const std::filesystem::path& path, std::optional<std::size_t> d_hint) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw IoError("cannot open dataset file: " + path.string());
  std::string text;
  char buffer[1 << 16];
  int got = 0;
  while ((got = gzread(file, buffer, sizeof(buffer))) > 0) text.append(buffer, got);
  const bool failed = got < 0;
  gzclose(file);
  if (failed) throw IoError("error reading dataset file: " + path.string());
  return parse_libsvm(text, d_hint);
}

std::string to_libsvm(const Dataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t k = 0; k < ds.size(); ++k) {
    out += ds.label(k) > 0 ? "+1" : "-1";
    const auto a = ds.point(k);
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] == 0.0) continue;
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      const auto res = std::to_chars(buf, buf + sizeof(buf), a[j]);
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

Partition partition(const Dataset& ds, std::size_t n, std::uint64_t shuffle_seed) {
  if (n == 0) throw InputError("partition: worker count must be at least 1");
  if (n > ds.size()) {
    throw InputError("partition: " + std::to_string(n) + " workers but only " +
                     std::to_string(ds.size()) + " points");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(shuffle_seed, StreamTag::kShuffle, 0, 0);
  for (std::size_t k = order.size(); k > 1; --k) {
    std::swap(order[k - 1], order[rng.below(k)]);
  }
  Partition p;
  p.n = n;
  p.m = ds.size() / n;
  p.shards.assign(n, {});
  for (auto& shard : p.shards) shard.reserve(p.m);
  for (std::size_t pos = 0; pos < n * p.m; ++pos) p.shards[pos % n].push_back(order[pos]);
  return p;
}

Dataset synth_artificial(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed,
                         double mean, double variance) {
  if (n == 0 || m == 0 || d == 0) throw InputError("synth_artificial: n, m, d must be >= 1");
  if (!(variance >= 0.0)) throw InputError("synth_artificial: variance must be nonnegative");
  const std::size_t count = n * m;
  if (count / n != m || (count * d) / d != count) throw InputError("synth_artificial: size overflow");
  const double sd = std::sqrt(variance);
  RngStream values(seed, StreamTag::kSynthetic, 0, 0);
  RngStream signs(seed, StreamTag::kSynthetic, 1, 0);
  std::vector<double> features(count * d);
  for (double& v : features) v = mean + sd * values.normal();
  std::vector<int> labels(count);
  for (int& b : labels) b = signs.bernoulli(0.5) ? 1 : -1;
  return Dataset(d, std::move(features), std::move(labels));
}

Dataset synth_onehot(std::size_t count, std::span<const std::size_t> group_sizes,
                     std::uint64_t seed, double positive_rate) {
  if (count == 0 || group_sizes.empty()) throw InputError("synth_onehot: empty shape");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw InputError("synth_onehot: positive_rate must lie in (0, 1)");
  }
  std::size_t d = 0;
  for (std::size_t g : group_sizes) {
    if (g == 0) throw InputError("synth_onehot: empty group");
    d += g;
  }

  RngStream teacher_rng(seed, StreamTag::kSynthetic, 0, 0);
  RngStream feature_rng(seed, StreamTag::kSynthetic, 1, 0);
  RngStream label_rng(seed, StreamTag::kSynthetic, 2, 0);

  std::vector<double> teacher(d);
  for (double& w : teacher) w = teacher_rng.normal();

  std::vector<double> features(count * d, 0.0);
  std::vector<double> scores(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t offset = 0;
    for (std::size_t g : group_sizes) {
      double total = 0.0;
      for (std::size_t c = 0; c < g; ++c) total += 1.0 / static_cast<double>(c + 1);
      double u = feature_rng.uniform() * total;
      std::size_t pick = g - 1;
      for (std::size_t c = 0; c < g; ++c) {
        u -= 1.0 / static_cast<double>(c + 1);
        if (u < 0.0) {
          pick = c;
          break;
        }
      }
      features[k * d + offset + pick] = 1.0;
      scores[k] += teacher[offset + pick];
      offset += g;
    }
  }

  auto mean_prob = [&](double bias) {
    double s = 0.0;
    for (double t : scores) s += 1.0 / (1.0 + std::exp(-(t + bias)));
    return s / static_cast<double>(count);
  };
  double lo = -100.0, hi = 100.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < positive_rate ? lo : hi) = mid;
  }
  const double bias = 0.5 * (lo + hi);

  std::vector<int> labels(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double p = 1.0 / (1.0 + std::exp(-(scores[k] + bias)));
    labels[k] = label_rng.bernoulli(p) ? 1 : -1;
  }
  return Dataset(d, std::move(features), std::move(labels));
}

Dataset a2a_like(std::uint64_t seed) {
  static constexpr std::size_t kGroups[] = {5, 8, 5, 16, 16, 7, 14, 6, 5, 2, 3, 3, 5, 28};
  return synth_onehot(2265, kGroups, seed, 0.25);
}

Dataset phishing_like(std::uint64_t seed) {
  std::vector<std::size_t> groups(22, 2);
  groups.insert(groups.end(), 8, 3);
  return synth_onehot(11000, groups, seed, 0.56);
}

}  // namespace dnl
