#include "dnl/config.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dnl/error.hpp"

namespace dnl {

namespace {

// Typed access to one JSON object with field paths in every error message.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("field '" + where("") + "': expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError("field '" + where(key) + "': " + msg);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(key, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  template <typename F>
  auto convert(const std::string& key, F f) {
    try {
      return f();
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind("field '", 0) == 0) throw;
      fail(key, what);
    }
  }

  void reject_unknown() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) fail(item.key(), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const CompressorSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case CompressorKind::kRandomR:
      j["r"] = spec.r;
      break;
    case CompressorKind::kDithering:
      j["s"] = spec.s;
      j["q"] = spec.q;
      break;
    case CompressorKind::kBernoulli:
      j["p"] = spec.p;
      j["inner"] = spec.inner ? to_json(*spec.inner) : Json(nullptr);
      break;
    default:
      break;
  }
  return j;
}

CompressorSpec compressor_from_json(const Json& j, const std::string& field) {
  Fields f(j, field);
  const std::string kind_name = f.string("kind", "identity");
  const CompressorKind kind =
      f.convert("kind", [&] { return compressor_kind_from_string(kind_name); });
  CompressorSpec spec;
  switch (kind) {
    case CompressorKind::kIdentity:
      spec = CompressorSpec::identity();
      break;
    case CompressorKind::kRandomR:
      spec = CompressorSpec::random_r(f.unsigned_int("r", 1));
      if (spec.r == 0) f.fail("r", "must be at least 1");
      break;
    case CompressorKind::kDithering:
      spec = CompressorSpec::dithering(f.unsigned_int("s", 0), f.number("q", 2.0));
      if (!(spec.q >= 1.0)) f.fail("q", "must be >= 1");
      break;
    case CompressorKind::kNatural:
      spec = CompressorSpec::natural();
      break;
    case CompressorKind::kBernoulli: {
      const double p = f.number("p", 1.0);
      if (!(p > 0.0 && p <= 1.0)) f.fail("p", "must lie in (0, 1]");
      if (!f.has("inner")) f.fail("inner", "required for bernoulli");
      CompressorSpec inner = compressor_from_json(f.raw("inner"), f.where("inner"));
      if (inner.kind == CompressorKind::kBernoulli) f.fail("inner", "nested bernoulli");
      spec = CompressorSpec::bernoulli(std::move(inner), p);
      break;
    }
  }
  f.reject_unknown();
  return spec;
}

Json to_json(const ExperimentConfig& c) {
  Json ds;
  ds["kind"] = c.dataset.kind;
  ds["path"] = c.dataset.path;
  ds["d_hint"] = optional_json(c.dataset.d_hint);
  ds["seed"] = c.dataset.seed;
  ds["m"] = c.dataset.m;
  ds["d"] = c.dataset.d;
  ds["mean"] = c.dataset.mean;
  ds["variance"] = c.dataset.variance;

  const MethodParams& mp = c.params;
  Json params;
  params["compressor"] = to_json(mp.compressor);
  params["eta"] = optional_json(mp.eta);
  params["stepsize"] = optional_json(mp.stepsize);
  params["shift_rate"] = optional_json(mp.shift_rate);
  params["option1"] = mp.option1;
  params["clamp"] = mp.clamp;
  params["h_init"] = mp.h_init == CoefficientInit::kAtStart ? "start" : "zero";
  params["rebuild_every"] = mp.rebuild_every;
  params["charge_setup"] = mp.charge_setup;
  params["check_domination"] = mp.check_domination;
  params["track_hull"] = mp.track_hull;

  Json budget;
  budget["max_iters"] = c.budget.max_iters;
  budget["bit_budget"] = optional_json(c.budget.bit_budget);
  budget["target_gap"] = optional_json(c.budget.target_gap);

  Json j;
  j["name"] = c.name;
  j["dataset"] = ds;
  j["n"] = c.n;
  j["shuffle_seed"] = c.shuffle_seed;
  j["lambda"] = c.lambda;
  j["loss"] = std::string(to_string(c.loss));
  j["method"] = std::string(to_string(c.method));
  j["params"] = params;
  j["budget"] = budget;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["timing"] = c.timing;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  Fields f(j, "");
  ExperimentConfig c;
  c.name = f.string("name", "");

  if (f.has("dataset")) {
    Fields ds(f.raw("dataset"), "dataset");
    c.dataset.kind = ds.string("kind", "a2a_like");
    static const std::set<std::string> kinds{"file", "a2a_like", "phishing_like", "artificial"};
    if (!kinds.contains(c.dataset.kind)) {
      ds.fail("kind", "expected file, a2a_like, phishing_like or artificial");
    }
    c.dataset.path = ds.string("path", "");
    if (ds.has("d_hint")) c.dataset.d_hint = ds.unsigned_int("d_hint", 0);
    c.dataset.seed = ds.unsigned_int("seed", 0);
    c.dataset.m = ds.unsigned_int("m", 0);
    c.dataset.d = ds.unsigned_int("d", 0);
    c.dataset.mean = ds.number("mean", 10.0);
    c.dataset.variance = ds.number("variance", 10.0);
    if (c.dataset.kind == "file" && c.dataset.path.empty()) ds.fail("path", "required for kind file");
    if (c.dataset.kind == "artificial") {
      if (c.dataset.m == 0) ds.fail("m", "must be at least 1 for artificial data");
      if (c.dataset.d == 0) ds.fail("d", "must be at least 1 for artificial data");
      if (!(c.dataset.variance >= 0.0)) ds.fail("variance", "must be nonnegative");
    }
    ds.reject_unknown();
  }

  c.n = f.unsigned_int("n", 15);
  if (c.n == 0) f.fail("n", "must be at least 1");
  c.shuffle_seed = f.unsigned_int("shuffle_seed", 0);
  c.lambda = f.number("lambda", 1e-3);
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) f.fail("lambda", "must be finite and >= 0");
  const std::string loss = f.string("loss", "logistic");
  c.loss = f.convert("loss", [&] { return loss_kind_from_string(loss); });
  const std::string method = f.string("method", "nl1");
  c.method = f.convert("method", [&] { return method_kind_from_string(method); });

  if (f.has("params")) {
    Fields pf(f.raw("params"), "params");
    MethodParams& mp = c.params;
    if (pf.has("compressor")) mp.compressor = compressor_from_json(pf.raw("compressor"), "params.compressor");
    mp.eta = pf.opt_number("eta");
    if (mp.eta && !(*mp.eta > 0.0)) pf.fail("eta", "must be > 0");
    mp.stepsize = pf.opt_number("stepsize");
    if (mp.stepsize && !(*mp.stepsize > 0.0)) pf.fail("stepsize", "must be > 0");
    mp.shift_rate = pf.opt_number("shift_rate");
    if (mp.shift_rate && !(*mp.shift_rate > 0.0 && *mp.shift_rate <= 1.0)) {
      pf.fail("shift_rate", "must lie in (0, 1]");
    }
    mp.option1 = pf.boolean("option1", true);
    mp.clamp = pf.boolean("clamp", true);
    const std::string init = pf.string("h_init", "start");
    if (init == "start") {
      mp.h_init = CoefficientInit::kAtStart;
    } else if (init == "zero") {
      mp.h_init = CoefficientInit::kZero;
    } else {
      pf.fail("h_init", "expected start or zero");
    }
    mp.rebuild_every = pf.unsigned_int("rebuild_every", 200);
    mp.charge_setup = pf.boolean("charge_setup", true);
    mp.check_domination = pf.boolean("check_domination", false);
    mp.track_hull = pf.boolean("track_hull", false);
    pf.reject_unknown();
  }

  if (f.has("budget")) {
    Fields bf(f.raw("budget"), "budget");
    c.budget.max_iters = bf.unsigned_int("max_iters", 100);
    if (bf.has("bit_budget")) c.budget.bit_budget = bf.unsigned_int("bit_budget", 0);
    c.budget.target_gap = bf.opt_number("target_gap");
    bf.reject_unknown();
  }

  if (!f.has("seed")) f.fail("seed", "required (no implicit seeding)");
  c.seed = f.unsigned_int("seed", 0);
  c.output_dir = f.string("output_dir", "out");
  c.timing = f.boolean("timing", false);
  f.reject_unknown();

  if (c.method == MethodKind::kNl1 && !(c.lambda > 0.0)) {
    f.fail("lambda", "method nl1 requires lambda > 0");
  }
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string dataset_label(const DatasetSource& src) {
  if (src.kind == "file") {
    std::string stem = std::filesystem::path(src.path).filename().string();
    for (const char* ext : {".gz", ".txt", ".libsvm", ".svm"}) {
      const std::string e = ext;
      if (stem.size() > e.size() && stem.ends_with(e)) stem.resize(stem.size() - e.size());
    }
    return stem;
  }
  if (src.kind == "a2a_like") return "a2a";
  if (src.kind == "phishing_like") return "phishing";
  return "artificial";
}

Dataset load_dataset(const DatasetSource& src, std::size_t n) {
  if (src.kind == "file") return load_libsvm_file(src.path, src.d_hint);
  if (src.kind == "a2a_like") return src.seed ? a2a_like(src.seed) : a2a_like();
  if (src.kind == "phishing_like") return src.seed ? phishing_like(src.seed) : phishing_like();
  if (src.kind == "artificial") {
    return synth_artificial(n, src.m, src.d, src.seed, src.mean, src.variance);
  }
  throw ConfigError("field 'dataset.kind': unknown source '" + src.kind + "'");
}

ProblemBundle build_problem(const ExperimentConfig& cfg) {
  Dataset ds = load_dataset(cfg.dataset, cfg.n);
  if (cfg.n > ds.size()) {
    throw ConfigError("field 'n': " + std::to_string(cfg.n) + " workers exceed " +
                      std::to_string(ds.size()) + " data points");
  }
  Partition part = partition(ds, cfg.n, cfg.shuffle_seed);
  Problem p(ds, part, LossModel{cfg.loss}, cfg.lambda);
  return {std::move(ds), std::move(part), std::move(p)};
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < len; ++k) {
    h ^= bytes[k];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string oracle_key(const Dataset& ds, double lambda, LossKind loss) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const std::uint64_t d = ds.dim();
  h = fnv1a64(&d, sizeof d, h);
  h = fnv1a64(ds.features().data(), ds.features().size_bytes(), h);
  h = fnv1a64(ds.labels().data(), ds.labels().size_bytes(), h);
  const std::uint64_t lam = std::bit_cast<std::uint64_t>(lambda);
  h = fnv1a64(&lam, sizeof lam, h);
  const auto lk = static_cast<std::uint32_t>(loss);
  h = fnv1a64(&lk, sizeof lk, h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json oracles_to_json(const Oracles& o, const std::string& key) {
  Json j;
  j["key"] = key;
  j["P_star"] = o.P_star;
  j["grad_norm"] = o.grad_norm;
  j["mu_star"] = o.mu_star;
  j["x_star"] = o.x_star;
  j["h_star"] = o.h_star;
  return j;
}

Oracles oracles_from_json(const Json& j, const Problem& p) {
  Vector x;
  try {
    x = j.at("x_star").get<Vector>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("oracle file: ") + e.what());
  }
  if (x.size() != p.dim()) throw ConfigError("oracle file: x_star has the wrong dimension");
  Oracles o;
  o.x_star = std::move(x);
  o.P_star = p.value_P(o.x_star);
  o.grad_norm = norm(p.grad_P(o.x_star));
  o.h_star.resize(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) o.h_star[i] = p.h_coeffs(i, o.x_star);
  o.H_star = p.weighted_gram(o.h_star);
  SymMatrix reg = o.H_star;
  reg.add_diagonal(p.lambda());
  o.mu_star = min_eigenvalue(reg);
  return o;
}

Json trace_to_json(const ExperimentConfig& cfg, const Problem& p, const Trace& trace) {
  Json eff;
  eff["eta"] = effective_eta(p, cfg.params);
  eff["omega_h"] = omega(cfg.params.compressor, p.m());
  const auto c = p.constants();
  eff["gamma"] = c.gamma;
  eff["nu"] = c.nu;
  eff["R"] = c.R;
  eff["M"] = c.M;
  eff["n"] = p.n();
  eff["m"] = p.m();
  eff["d"] = p.dim();

  Json rows = Json::array();
  for (const auto& r : trace.rows) {
    Json row;
    row["iter"] = r.iter;
    row["gap"] = r.gap;
    row["grad_norm"] = r.grad_norm;
    row["bits_up_cum"] = r.bits_up_cum;
    row["bits_down_cum"] = r.bits_down_cum;
    row["phi"] = r.phi;
    row["wall_ms"] = r.wall_ms;
    row["value"] = r.value;
    row["dist"] = r.dist;
    row["beta"] = r.beta;
    row["learning_error"] = optional_json(r.learning_error);
    row["domination_min_eig"] = optional_json(r.domination_min_eig);
    row["clamp_events"] = r.clamp_events;
    row["hull_violations"] = r.hull_violations;
    row["bfgs_skipped"] = r.bfgs_skipped;
    rows.push_back(std::move(row));
  }

  Json j;
  j["config"] = to_json(cfg);
  j["effective"] = eff;
  j["stop_reason"] = trace.stop_reason;
  j["rows"] = std::move(rows);
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace dnl
