#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "dnl/data.hpp"
#include "dnl/harness.hpp"
#include "dnl/methods.hpp"
#include "dnl/problem.hpp"

namespace dnl {

using Json = nlohmann::ordered_json;

struct DatasetSource {
  std::string kind = "a2a_like";  // file | a2a_like | phishing_like | artificial
  std::string path;               // kind == file
  std::optional<std::size_t> d_hint;
  std::uint64_t seed = 0;         // synthetic generators; 0 keeps the built-in seed
  std::size_t m = 0, d = 0;       // artificial: n*m points in R^d
  double mean = 10.0, variance = 10.0;

  friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

struct ExperimentConfig {
  std::string name;  // output file prefix; defaults to the dataset label
  DatasetSource dataset;
  std::size_t n = 15;
  std::uint64_t shuffle_seed = 0;
  double lambda = 1e-3;
  LossKind loss = LossKind::kLogistic;
  MethodKind method = MethodKind::kNl1;
  MethodParams params;
  Budget budget;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool timing = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

Json to_json(const CompressorSpec& spec);
CompressorSpec compressor_from_json(const Json& j, const std::string& field = "compressor");

Json to_json(const ExperimentConfig& cfg);
/// Field-level validation; throws ConfigError("field 'x.y': ...").
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);

std::string dataset_label(const DatasetSource& src);
Dataset load_dataset(const DatasetSource& src, std::size_t n);

struct ProblemBundle {
  Dataset dataset;
  Partition partition;
  Problem problem;
};
ProblemBundle build_problem(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull);
/// Hex content hash of the dataset bytes, lambda and loss.
std::string oracle_key(const Dataset& ds, double lambda, LossKind loss);

Json oracles_to_json(const Oracles& o, const std::string& key);
/// Reads x* from the file and re-evaluates everything else on p.
Oracles oracles_from_json(const Json& j, const Problem& p);

/// Config echo, resolved defaults, stop reason and every trace row.
Json trace_to_json(const ExperimentConfig& cfg, const Problem& p, const Trace& trace);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dnl
