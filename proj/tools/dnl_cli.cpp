// Command-line front end: run, refopt, compare, gen-data.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dnl/config.hpp"
#include "dnl/error.hpp"

namespace fs = std::filesystem;
using namespace dnl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Flags that override fields of a config file (or build one from scratch).
struct Overrides {
  std::string config_path;
  std::optional<std::string> name, dataset, data_path, loss, method, compressor, out, h_init;
  std::optional<std::size_t> n, max_iters, rebuild_every;
  std::optional<std::uint64_t> seed, shuffle_seed, bit_budget;
  std::optional<double> lambda, eta, stepsize, target_gap;
  bool option2 = false;
  bool no_clamp = false;
  bool timing = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON experiment config");
    app->add_option("--name", name, "output file prefix");
    app->add_option("--dataset", dataset, "file | a2a_like | phishing_like | artificial");
    app->add_option("--data", data_path, "LIBSVM file (plain or gzip); implies --dataset file");
    app->add_option("--n", n, "number of workers");
    app->add_option("--shuffle-seed", shuffle_seed, "partition shuffle seed");
    app->add_option("--lambda", lambda, "L2 regularization");
    app->add_option("--loss", loss, "logistic | squared");
    app->add_option("--method", method,
                    "gd dcgd diana bfgs newton newton_coef ns mn nl1 nl2 cnl");
    app->add_option("--compressor", compressor,
                    "identity | random_r:R | dithering[:S] | natural | bernoulli:P:<inner>");
    app->add_option("--eta", eta, "coefficient learning rate");
    app->add_option("--stepsize", stepsize, "first-order stepsize");
    app->add_option("--h-init", h_init, "start | zero");
    app->add_option("--rebuild-every", rebuild_every, "rounds between full matrix rebuilds");
    app->add_flag("--option2", option2, "server holds the data (no a_ij uploads)");
    app->add_flag("--no-clamp", no_clamp, "NL2/CNL: do not clamp coefficients");
    app->add_option("--max-iters", max_iters, "iteration budget");
    app->add_option("--bit-budget", bit_budget, "cumulative upstream bit budget");
    app->add_option("--target-gap", target_gap, "stop once P - P* reaches this");
    app->add_option("--seed", seed, "run seed (required)");
    app->add_option("--out", out, "output directory");
    app->add_flag("--timing", timing, "record wall-clock time in traces");
  }

  ExperimentConfig resolve() const {
    Json j = config_path.empty() ? Json::object() : Json::parse(read_text_file(config_path));
    if (!j.is_object()) throw ConfigError(config_path + ": expected a JSON object");
    auto sub = [&](const char* key) -> Json& {
      if (!j.contains(key) || j[key].is_null()) j[key] = Json::object();
      return j[key];
    };
    if (name) j["name"] = *name;
    if (dataset) sub("dataset")["kind"] = *dataset;
    if (data_path) {
      sub("dataset")["kind"] = "file";
      sub("dataset")["path"] = *data_path;
    }
    if (n) j["n"] = *n;
    if (shuffle_seed) j["shuffle_seed"] = *shuffle_seed;
    if (lambda) j["lambda"] = *lambda;
    if (loss) j["loss"] = *loss;
    if (method) j["method"] = *method;
    if (compressor) sub("params")["compressor"] = to_json(parse_compressor(*compressor));
    if (eta) sub("params")["eta"] = *eta;
    if (stepsize) sub("params")["stepsize"] = *stepsize;
    if (h_init) sub("params")["h_init"] = *h_init;
    if (rebuild_every) sub("params")["rebuild_every"] = *rebuild_every;
    if (option2) sub("params")["option1"] = false;
    if (no_clamp) sub("params")["clamp"] = false;
    if (max_iters) sub("budget")["max_iters"] = *max_iters;
    if (bit_budget) sub("budget")["bit_budget"] = *bit_budget;
    if (target_gap) sub("budget")["target_gap"] = *target_gap;
    if (seed) j["seed"] = *seed;
    if (out) j["output_dir"] = *out;
    if (timing) j["timing"] = true;
    return config_from_json(j);
  }

  static CompressorSpec parse_compressor(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    std::size_t pos = 0;
    return parse_parts(parts, pos, text);
  }

  static CompressorSpec parse_parts(const std::vector<std::string>& parts, std::size_t& pos,
                                    const std::string& text) {
    auto bad = [&] { return ConfigError("--compressor: cannot parse '" + text + "'"); };
    if (pos >= parts.size()) throw bad();
    const std::string kind = parts[pos++];
    auto number = [&]() -> double {
      if (pos >= parts.size()) throw bad();
      try {
        return std::stod(parts[pos++]);
      } catch (const std::exception&) {
        throw bad();
      }
    };
    if (kind == "identity") return CompressorSpec::identity();
    if (kind == "natural") return CompressorSpec::natural();
    if (kind == "random_r") return CompressorSpec::random_r(static_cast<std::size_t>(number()));
    if (kind == "dithering") {
      return pos < parts.size() ? CompressorSpec::dithering(static_cast<std::size_t>(number()))
                                : CompressorSpec::dithering();
    }
    if (kind == "bernoulli") {
      const double p = number();
      return CompressorSpec::bernoulli(parse_parts(parts, pos, text), p);
    }
    throw bad();
  }
};

fs::path output_dir(const ExperimentConfig& cfg) {
  fs::path dir = cfg.output_dir;
  if (const char* root = std::getenv("DNL_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
    if (dir.is_relative()) dir = fs::path(root) / dir;
  }
  return dir;
}

std::string short_hash(const Json& j) {
  const std::string text = j.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx",
                static_cast<unsigned long long>(fnv1a64(text.data(), text.size()) & 0xffffffffull));
  return buf;
}

bool uses_compressor(MethodKind kind) {
  return is_learning_method(kind) || kind == MethodKind::kDcgd || kind == MethodKind::kDiana;
}

std::string run_label(const ExperimentConfig& cfg) {
  const std::string base = cfg.name.empty() ? dataset_label(cfg.dataset) : cfg.name;
  return base + "_" + std::string(to_string(cfg.method)) + "_" + short_hash(to_json(cfg));
}

// Loads the cached reference optimum or computes and stores it.
Oracles obtain_oracles(const ExperimentConfig& cfg, const ProblemBundle& b, fs::path* where) {
  const std::string key = oracle_key(b.dataset, cfg.lambda, cfg.loss);
  const fs::path path = output_dir(cfg) / "oracles" / (key + ".json");
  if (where) *where = path;
  if (fs::exists(path)) {
    return oracles_from_json(Json::parse(read_text_file(path)), b.problem);
  }
  Oracles o = reference_optimum(b.problem);
  write_text_file(path, oracles_to_json(o, key).dump(1) + "\n");
  return o;
}

struct RunOutcome {
  Trace trace;
  fs::path csv;
};

RunOutcome execute(const ExperimentConfig& cfg, const ProblemBundle& b, const Oracles& oracles) {
  const double eta = effective_eta(b.problem, cfg.params);
  const double eta_max = 1.0 / (omega(cfg.params.compressor, b.problem.m()) + 1.0);
  if (is_learning_method(cfg.method) && eta > eta_max * (1.0 + 1e-12)) {
    std::cerr << "warning: eta=" << eta << " exceeds 1/(omega+1)=" << eta_max << "\n";
  }
  RunOptions opts;
  opts.budget = cfg.budget;
  opts.timing = cfg.timing;
  opts.keep_payloads = false;
  RunOutcome r;
  r.trace = run_experiment(cfg.method, b.problem, cfg.params, &oracles,
                           Vector(b.problem.dim(), 0.0), cfg.seed, opts);
  const fs::path stem = output_dir(cfg) / run_label(cfg);
  std::ostringstream csv;
  write_trace_csv(csv, r.trace);
  r.csv = stem.string() + ".csv";
  write_text_file(r.csv, csv.str());
  write_text_file(stem.string() + ".json", trace_to_json(cfg, b.problem, r.trace).dump(1) + "\n");
  return r;
}

int cmd_run(const Overrides& ov) {
  const ExperimentConfig cfg = ov.resolve();
  const ProblemBundle b = build_problem(cfg);
  const Oracles o = obtain_oracles(cfg, b, nullptr);
  const RunOutcome r = execute(cfg, b, o);
  const TraceRow& last = r.trace.rows.back();
  std::cout << "method=" << to_string(cfg.method) << " iters=" << last.iter
            << " final_gap=" << format_double(last.gap) << " bits_up=" << last.bits_up_cum
            << " bits_down=" << last.bits_down_cum << " stop=" << r.trace.stop_reason
            << " trace=" << r.csv.string() << "\n";
  return 0;
}

int cmd_refopt(const Overrides& ov) {
  const ExperimentConfig cfg = ov.resolve();
  const ProblemBundle b = build_problem(cfg);
  fs::path path;
  const Oracles o = obtain_oracles(cfg, b, &path);
  std::cout << "oracle=" << path.string() << " P_star=" << format_double(o.P_star)
            << " grad_norm=" << format_double(o.grad_norm) << "\n";
  if (o.grad_norm > 1e-8) std::cerr << "warning: gradient norm at the reference point above 1e-8\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& configs, const Overrides& shared,
                const std::string& out_name) {
  if (configs.empty()) throw ConfigError("compare: at least one --config is required");
  std::vector<ExperimentConfig> cfgs;
  for (const auto& path : configs) {
    Overrides ov = shared;
    ov.config_path = path;
    cfgs.push_back(ov.resolve());
  }
  const ExperimentConfig& ref = cfgs.front();
  for (std::size_t k = 1; k < cfgs.size(); ++k) {
    const auto& c = cfgs[k];
    if (!(c.dataset == ref.dataset) || c.lambda != ref.lambda || c.loss != ref.loss ||
        c.n != ref.n || c.shuffle_seed != ref.shuffle_seed) {
      throw ConfigError("compare: " + configs[k] + " uses a different problem setting than " +
                        configs.front());
    }
  }
  const ProblemBundle b = build_problem(ref);
  const Oracles o = obtain_oracles(ref, b, nullptr);

  const std::vector<double> thresholds{1e-4, 1e-7, 1e-10};
  struct Row {
    std::string label;
    std::vector<std::optional<std::uint64_t>> bits;
  };
  std::vector<Row> rows;
  std::ostringstream combined;
  combined << "label,method,iter,bits_up_cum,gap\n";
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    const ExperimentConfig& c = cfgs[k];
    const RunOutcome r = execute(c, b, o);
    Row row;
    row.label = c.name.empty() ? std::string(to_string(c.method)) : c.name;
    if (uses_compressor(c.method)) row.label += "[" + c.params.compressor.describe() + "]";
    for (double t : thresholds) row.bits.push_back(bits_to_gap(r.trace, t));
    for (const auto& tr : r.trace.rows) {
      combined << row.label << ',' << to_string(c.method) << ',' << tr.iter << ','
               << tr.bits_up_cum << ',' << format_double(tr.gap) << '\n';
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream table;
  table << "label";
  for (double t : thresholds) table << ",bits@" << format_double(t) << ",rank@" << format_double(t);
  table << "\n";
  for (const auto& row : rows) {
    table << row.label;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (!row.bits[t]) {
        table << ",unreached,-";
        continue;
      }
      std::size_t rank = 1;
      for (const auto& other : rows) {
        if (other.bits[t] && *other.bits[t] < *row.bits[t]) ++rank;
      }
      table << ',' << *row.bits[t] << ',' << rank;
    }
    table << "\n";
  }
  const fs::path dir = output_dir(ref);
  write_text_file(dir / (out_name + ".csv"), combined.str());
  write_text_file(dir / (out_name + "_ranks.csv"), table.str());
  std::cout << table.str();
  return 0;
}

int cmd_gen_data(const std::string& kind, const std::string& out, std::uint64_t seed,
                 std::size_t n, std::size_t m, std::size_t d) {
  DatasetSource src;
  src.kind = kind;
  src.seed = seed;
  src.m = m;
  src.d = d;
  if (kind == "file") throw ConfigError("gen-data: --kind must be a synthetic source");
  if (kind == "artificial" && (m == 0 || d == 0)) {
    throw ConfigError("gen-data: artificial data needs --m and --d");
  }
  const Dataset ds = load_dataset(src, n);
  write_text_file(out, to_libsvm(ds));
  std::cout << "wrote " << ds.size() << " points, d=" << ds.dim() << " to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Newton-type methods with compressed Hessian learning"};
  app.require_subcommand(1);

  Overrides run_ov, ref_ov, cmp_ov;
  auto* run = app.add_subcommand("run", "run one experiment and write its trace");
  run_ov.attach(run);
  auto* refopt = app.add_subcommand("refopt", "compute and cache the reference optimum");
  ref_ov.attach(refopt);

  auto* compare = app.add_subcommand("compare", "run several configs and rank bits-to-gap");
  std::vector<std::string> cmp_configs;
  std::string cmp_name = "compare";
  compare->add_option("-c,--config", cmp_configs, "experiment configs (repeatable)")->required();
  compare->add_option("--name", cmp_name, "output file prefix");
  compare->add_option("--seed", cmp_ov.seed, "override every run seed");
  compare->add_option("--max-iters", cmp_ov.max_iters, "override every iteration budget");
  compare->add_option("--out", cmp_ov.out, "output directory");

  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset in LIBSVM format");
  std::string gen_kind = "a2a_like", gen_out;
  std::uint64_t gen_seed = 0;
  std::size_t gen_n = 1, gen_m = 0, gen_d = 0;
  gen->add_option("--kind", gen_kind, "a2a_like | phishing_like | artificial");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--seed", gen_seed, "generator seed (0 keeps the built-in one)");
  gen->add_option("--n", gen_n, "artificial: workers");
  gen->add_option("--m", gen_m, "artificial: points per worker");
  gen->add_option("--d", gen_d, "artificial: dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_ov);
    if (*refopt) return cmd_refopt(ref_ov);
    if (*compare) return cmd_compare(cmp_configs, cmp_ov, cmp_name);
    if (*gen) return cmd_gen_data(gen_kind, gen_out, gen_seed, gen_n, gen_m, gen_d);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SingularityError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
