// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance <path to dnl cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "dnl/config.hpp"
#include "dnl/cubic.hpp"
#include "dnl/harness.hpp"

using namespace dnl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += "; runtime limit " + format_double(limit_s) + " s exceeded";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct A2a {
  Dataset ds = a2a_like();
  Partition part = partition(ds, 15, 0);
  Problem p3{ds, part, LossModel{LossKind::kLogistic}, 1e-3};
  Problem p4{ds, part, LossModel{LossKind::kLogistic}, 1e-4};
  Oracles o3 = reference_optimum(p3);
};

const A2a& a2a() {
  static const A2a instance;
  return instance;
}

Vector gaussian(std::size_t d, std::uint64_t seed, std::uint32_t worker, double scale = 1.0) {
  RngStream rng(seed, StreamTag::kTest, worker, 0);
  Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

// ---------------------------------------------------------------------------

Outcome compressor_contract() {
  const std::size_t m = 12;
  const int draws = 100000;
  const Vector x = gaussian(m, 1, 0, 2.0);
  const std::vector<CompressorSpec> specs{
      CompressorSpec::random_r(3), CompressorSpec::dithering(), CompressorSpec::natural(),
      CompressorSpec::bernoulli(CompressorSpec::random_r(3), 0.25)};
  std::ostringstream detail;
  bool ok = true;
  for (const auto& spec : specs) {
    Vector sum(m, 0.0), sum_sq(m, 0.0);
    double n2 = 0.0, n2_sq = 0.0;
    for (int k = 0; k < draws; ++k) {
      RngStream rng(2024, StreamTag::kCompressor, 0, static_cast<std::uint32_t>(k));
      const Vector c = compress(spec, x, rng).values;
      for (std::size_t j = 0; j < m; ++j) {
        sum[j] += c[j];
        sum_sq[j] += c[j] * c[j];
      }
      const double q = squared_norm(c);
      n2 += q;
      n2_sq += q * q;
    }
    double worst_z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double mean = sum[j] / draws;
      const double var = std::max(0.0, sum_sq[j] / draws - mean * mean);
      const double se = std::sqrt(var / draws);
      if (se == 0.0) {
        if (std::abs(mean - x[j]) > 1e-12 * std::abs(x[j])) ok = false;
        continue;
      }
      worst_z = std::max(worst_z, std::abs(mean - x[j]) / se);
    }
    const double mean_n2 = n2 / draws;
    const double se_rel = std::sqrt(std::max(0.0, n2_sq / draws - mean_n2 * mean_n2) / draws) / mean_n2;
    const double bound = (omega(spec, m) + 1.0) * squared_norm(x) * (1.0 + 4.0 * se_rel);
    const bool good = worst_z <= 4.0 && mean_n2 <= bound;
    ok = ok && good;
    detail << spec.describe() << " z=" << format_double(std::round(worst_z * 100) / 100)
           << (good ? "" : " [violated]") << "; ";
  }
  // Exact enumeration of E||C(x)||^2 for random-r, m <= 6.
  bool enum_ok = true;
  for (std::size_t mm = 1; mm <= 6; ++mm) {
    for (std::size_t r = 1; r <= mm; ++r) {
      const Vector y = gaussian(mm, 10 * mm + r, 1);
      const double scale = static_cast<double>(mm) / static_cast<double>(r);
      // Outputs realized by the implementation must be (m/r) y on r coordinates.
      for (std::uint32_t k = 0; k < 64; ++k) {
        RngStream rng(5, StreamTag::kCompressor, 0, k);
        const Vector c = compress(CompressorSpec::random_r(r), y, rng).values;
        std::size_t kept = 0;
        for (std::size_t j = 0; j < mm; ++j) {
          if (c[j] != 0.0) {
            ++kept;
            enum_ok = enum_ok && c[j] == scale * y[j];
          }
        }
        enum_ok = enum_ok && kept == r;
      }
      double second = 0.0;
      std::size_t subsets = 0;
      for (unsigned mask = 0; mask < (1u << mm); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != r) continue;
        ++subsets;
        for (std::size_t j = 0; j < mm; ++j) {
          if (mask & (1u << j)) second += scale * scale * y[j] * y[j];
        }
      }
      second /= static_cast<double>(subsets);
      enum_ok = enum_ok && std::abs(second - scale * squared_norm(y)) <= 1e-12 * second;
    }
  }
  detail << "random-r enumeration " << (enum_ok ? "exact" : "MISMATCH");
  return {ok && enum_ok, detail.str()};
}

// Multi-start backtracking gradient descent on the cubic model, each run
// finished with damped Newton steps on the model gradient.
double brute_force_cubic(const SymMatrix& h, const Vector& g, double M, std::uint64_t seed) {
  const std::size_t d = g.size();
  auto model = [&](const Vector& s) { return cubic_model_value(h, g, M, s); };
  auto grad = [&](const Vector& s) {
    Vector r = add(g, h.multiply(s));
    axpy(0.5 * M * norm(s), s, r);
    return r;
  };
  std::vector<Vector> starts{Vector(d, 0.0), scaled(-1.0, g)};
  const auto eig = sym_eig(h);
  const Vector e0(eig.eigenvector(0).begin(), eig.eigenvector(0).end());
  starts.push_back(e0);
  starts.push_back(scaled(-1.0, e0));
  starts.push_back(gaussian(d, seed, 7));
  double best = 0.0;
  for (Vector s : starts) {
    double val = model(s), t = 1.0;
    for (int it = 0; it < 3000; ++it) {
      const Vector gr = grad(s);
      const double gn2 = squared_norm(gr);
      if (gn2 < 1e-12) break;
      t = std::min(1.0, 4.0 * t);
      while (t > 1e-18) {
        Vector trial = s;
        axpy(-t, gr, trial);
        const double v = model(trial);
        if (v <= val - 0.5 * t * gn2) {
          s = std::move(trial);
          val = v;
          break;
        }
        t *= 0.5;
      }
      if (t <= 1e-18) break;
    }
    for (int it = 0; it < 30; ++it) {
      const Vector gr = grad(s);
      if (squared_norm(gr) < 1e-28) break;
      const double r = norm(s);
      SymMatrix hess = h;
      hess.add_diagonal(0.5 * M * r);
      if (r > 0) hess.add_rank1(0.5 * M / r, s);
      Vector dir;
      try {
        dir = solve_spd(hess, gr);
      } catch (const std::exception&) {
        break;  // not locally convex here; keep the descent result
      }
      double step = 1.0;
      bool moved = false;
      while (step > 1e-12) {
        Vector trial = s;
        axpy(-step, dir, trial);
        const double v = model(trial);
        if (v <= val) {
          s = std::move(trial);
          val = v;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::min(best, val);
  }
  return best;
}

Outcome cubic_subproblem() {
  double worst_res = 0.0, worst_gap = 0.0;
  bool ok = true;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const std::size_t d = 1 + k % 10;
    RngStream rng(k, StreamTag::kTest, 3, 0);
    SymMatrix h(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) h.set(i, j, rng.normal());
    }
    if (k % 3 != 0) h.add_diagonal(std::sqrt(static_cast<double>(d)) * 2.5);  // mostly PD
    const Vector g = gaussian(d, 1000 + k, 4);
    const double M = 0.1 + 5.0 * rng.uniform();
    const CubicSolution sol = solve_cubic_model(h, g, M);
    const double res_rel = sol.residual / (norm(g) + 1.0);
    worst_res = std::max(worst_res, res_rel);
    const double ref = brute_force_cubic(h, g, M, k);
    const double gap = cubic_model_value(h, g, M, sol.step) - ref;
    worst_gap = std::max(worst_gap, std::abs(gap));
    ok = ok && res_rel <= 1e-9 && std::abs(gap) <= 1e-6;
  }
  const CubicSolution one = solve_cubic_model(SymMatrix::identity(1), Vector{1.0}, 6.0);
  const double closed = (1.0 - std::sqrt(13.0)) / 6.0;
  const double err1 = std::abs(one.step[0] - closed);
  ok = ok && err1 <= 1e-12;
  return {ok, "max residual/(|g|+1)=" + sci(worst_res) + ", max |T - T_oracle|=" +
                  sci(worst_gap) + ", d=1 error=" + sci(err1)};
}

Outcome newton_star_rate() {
  const auto& s = a2a();
  const Problem& p = s.p3;
  const Oracles& o = s.o3;
  // Rate constant with mu* + lambda = smallest eigenvalue of H(x*) + lambda I.
  const double mu_plus_lambda = std::max(o.mu_star, p.lambda());
  const double C = p.loss().nu() / (2.0 * mu_plus_lambda) * p.mean_cubed_norm();
  const double floor = 100.0 * 2.220446049250313e-16 * std::max(1.0, norm(o.x_star));
  Vector delta = gaussian(p.dim(), 77, 5);
  delta = scaled(1e-2 / norm(delta), delta);
  Vector x = add(o.x_star, delta);
  double worst = 0.0;
  int reached = -1;
  for (int k = 1; k <= 6; ++k) {
    const double before = norm(subtract(x, o.x_star));
    x = ns_step(p, o, x);
    const double after = norm(subtract(x, o.x_star));
    if (after > floor) worst = std::max(worst, after / (before * before));
    if (reached < 0 && p.value_P(x) - o.P_star <= 1e-16) reached = k;
  }
  const bool ok = worst <= C && reached > 0;
  return {ok, "max ratio=" + sci(worst) + " <= C=" + sci(C) + ", gap<=1e-16 at iteration " +
                  std::to_string(reached)};
}

Outcome nl1_local_rate() {
  const auto& s = a2a();
  const Problem& p = s.p3;
  const Oracles& o = s.o3;
  MethodParams mp;
  mp.compressor = CompressorSpec::random_r(1);  // eta defaults to 1/(omega+1)
  RunOptions ro;
  ro.budget.max_iters = 400;
  const Trace t = run_experiment(MethodKind::kNl1, p, mp, &o, Vector(p.dim(), 0.0), 4, ro);
  const double radius_sq = neighborhood_radius_sq(p, MethodKind::kNl1, o);
  const double floor = 100.0 * 2.220446049250313e-16 * std::max(1.0, norm(o.x_star));

  std::size_t steps = 0, nonincreasing = 0, entered = 0;
  std::size_t last_pre_floor = 0;
  bool inside = false;
  for (std::size_t k = 0; k + 1 < t.rows.size(); ++k) {
    if (t.rows[k + 1].dist <= floor) break;
    last_pre_floor = k + 1;
    if (!inside && t.rows[k].dist * t.rows[k].dist <= radius_sq) {
      inside = true;
      entered = k;
    }
    if (!inside) continue;
    ++steps;
    if (t.rows[k + 1].phi <= t.rows[k].phi) ++nonincreasing;
  }
  if (!inside || last_pre_floor < 6) return {false, "never entered the neighborhood before the floor"};
  const double frac = static_cast<double>(nonincreasing) / static_cast<double>(steps);

  // Distance ratios of the last five pre-floor iterations.
  std::vector<double> ratios;
  for (std::size_t k = last_pre_floor - 4; k <= last_pre_floor; ++k) {
    ratios.push_back(t.rows[k].dist / t.rows[k - 1].dist);
  }
  double slope = 0.0;
  for (std::size_t k = 0; k < 5; ++k) slope += (static_cast<double>(k) - 2.0) * ratios[k];
  bool strict = true;
  for (std::size_t k = 1; k < 5; ++k) strict = strict && ratios[k] < ratios[k - 1];
  std::ostringstream ds;
  ds << "entered at iteration " << entered << ", Phi nonincreasing in " << nonincreasing << "/"
     << steps << " steps (" << format_double(std::round(frac * 1000) / 10) << "%); tail ratios";
  for (double r : ratios) ds << ' ' << format_double(std::round(r * 10000) / 10000);
  ds << " (trend slope " << sci(slope / 10.0) << (strict ? ", strictly decreasing)" : ", not strictly monotone)");
  return {frac >= 0.95 && slope < 0.0, ds.str()};
}

Outcome domination_and_monotonicity() {
  const auto& s = a2a();
  const Problem& p = s.p4;
  double worst_nl2 = INFINITY, worst_cnl = INFINITY, worst_increase = -INFINITY;
  std::size_t clamps = 0;
  {
    MethodParams mp;
    mp.compressor = CompressorSpec::random_r(1);
    mp.check_domination = true;
    LearnState st = init_learn_state(p, MethodKind::kNl2, mp, Vector(p.dim(), 0.0));
    for (int k = 0; k < 100; ++k) {
      const RoundResult r = nl2_round(p, st, mp, 31);
      worst_nl2 = std::min(worst_nl2, *r.info.domination_min_eig);
      clamps += r.info.clamp_events;
    }
  }
  {
    MethodParams mp;
    mp.compressor = CompressorSpec::bernoulli(CompressorSpec::random_r(1), 1.0 / 20);
    mp.check_domination = true;
    LearnState st = init_learn_state(p, MethodKind::kCnl, mp, Vector(p.dim(), 0.0));
    double prev = p.value_P(st.x);
    for (int k = 0; k < 100; ++k) {
      const RoundResult r = cnl_round(p, st, mp, 32);
      worst_cnl = std::min(worst_cnl, *r.info.domination_min_eig);
      clamps += r.info.clamp_events;
      const double now = p.value_P(st.x);
      worst_increase = std::max(worst_increase, now - prev);
      prev = now;
    }
  }
  const bool ok = worst_nl2 >= -1e-8 && worst_cnl >= -1e-8 && worst_increase <= 1e-12;
  return {ok, "min eig NL2=" + sci(worst_nl2) + ", CNL=" + sci(worst_cnl) +
                  ", max P increase CNL=" + sci(worst_increase) +
                  ", clamp events=" + std::to_string(clamps)};
}

Outcome communication_ordering() {
  const auto& s = a2a();
  const Problem& p = s.p3;
  const Oracles& o = s.o3;
  RunOptions ro;
  ro.budget.max_iters = 2000;
  ro.budget.target_gap = 1e-7;
  ro.keep_payloads = false;
  MethodParams nl1;
  nl1.compressor = CompressorSpec::random_r(1);
  auto bits = [&](MethodKind kind, const MethodParams& mp) {
    return bits_to_gap(run_experiment(kind, p, mp, &o, Vector(p.dim(), 0.0), 6, ro), 1e-7);
  };
  const auto b_nl1 = bits(MethodKind::kNl1, nl1);
  const auto b_bfgs = bits(MethodKind::kBfgs, MethodParams{});
  const auto b_newton = bits(MethodKind::kNewton, MethodParams{});
  if (!b_nl1 || !b_bfgs || !b_newton) return {false, "a method did not reach gap 1e-7"};
  const double f_bfgs = static_cast<double>(*b_bfgs) / static_cast<double>(*b_nl1);
  const double f_newton = static_cast<double>(*b_newton) / static_cast<double>(*b_nl1);
  std::ostringstream ds;
  ds << "bits to 1e-7: NL1(r=1)=" << *b_nl1 << ", BFGS=" << *b_bfgs << ", Newton=" << *b_newton
     << "; factors BFGS/NL1=" << format_double(std::round(f_bfgs * 100) / 100)
     << ", Newton/NL1=" << format_double(std::round(f_newton * 100) / 100) << " (need >= 10)";
  return {f_bfgs >= 10.0 && f_newton >= 10.0, ds.str()};
}

// Closed-form bit cost of one round, written independently of the ledger.
std::uint64_t closed_form_bits(const RoundPayload& r, std::size_t d, std::size_t nm) {
  std::uint64_t index_bits = 0;
  while ((std::uint64_t{1} << index_bits) < nm) ++index_bits;
  std::uint64_t total = 0;
  for (const auto& w : r.workers) {
    total += 32 * (w.gradient_floats + w.scalar_floats + w.matrix_floats + w.coefficient_floats +
                   r.setup_floats_per_worker);
    for (const auto& c : w.compressed) {
      if (!c.fired) {
        total += 1;
        continue;
      }
      const CompressorSpec& s = c.spec.kind == CompressorKind::kBernoulli ? *c.spec.inner : c.spec;
      switch (s.kind) {
        case CompressorKind::kIdentity: total += 32 * c.length; break;
        case CompressorKind::kNatural: total += 9 * c.length; break;
        case CompressorKind::kDithering: total += (28 * c.length + 9) / 10 + 32; break;
        case CompressorKind::kRandomR: {
          long double l = 0.0L;
          for (std::size_t k = 0; k < s.r; ++k) {
            l += std::log2(static_cast<long double>(c.length - k) / static_cast<long double>(k + 1));
          }
          total += 32 * s.r + static_cast<std::uint64_t>(std::ceil(l - 1e-9L));
          break;
        }
        default: break;
      }
    }
    total += w.data_vectors * (32 * d + index_bits);
  }
  return total;
}

Outcome ledger_exactness() {
  const auto& s = a2a();
  const Problem& p = s.p3;
  const std::vector<std::pair<MethodKind, CompressorSpec>> cases{
      {MethodKind::kGd, CompressorSpec::identity()},
      {MethodKind::kDcgd, CompressorSpec::random_r(30)},
      {MethodKind::kDiana, CompressorSpec::natural()},
      {MethodKind::kBfgs, CompressorSpec::identity()},
      {MethodKind::kNewton, CompressorSpec::identity()},
      {MethodKind::kNewtonCoef, CompressorSpec::identity()},
      {MethodKind::kNewtonStar, CompressorSpec::identity()},
      {MethodKind::kMaxNewton, CompressorSpec::identity()},
      {MethodKind::kNl1, CompressorSpec::random_r(1)},
      {MethodKind::kNl2, CompressorSpec::bernoulli(CompressorSpec::random_r(1), 1.0 / 20)},
      {MethodKind::kCnl, CompressorSpec::dithering()},
  };
  std::ostringstream ds;
  bool ok = true;
  for (const auto& [kind, spec] : cases) {
    MethodParams mp;
    mp.compressor = spec;
    RunOptions ro;
    ro.budget.max_iters = 12;
    const Trace t = run_experiment(kind, p, mp, &s.o3, Vector(p.dim(), 0.0), 8, ro);
    std::uint64_t closed = 0, per_round_sum = 0;
    for (const auto& r : t.payloads) closed += closed_form_bits(r, p.dim(), p.n() * p.m());
    for (const auto& e : t.ledger.rounds()) per_round_sum += e.upstream_total;
    const bool good = closed == t.rows.back().bits_up_cum && per_round_sum == closed;
    ok = ok && good;
    if (!good) ds << to_string(kind) << " ledger " << t.rows.back().bits_up_cum << " vs " << closed << "; ";
  }
  ds << cases.size() << " methods checked";
  return {ok, ds.str()};
}

Outcome replica_consistency() {
  const auto& s = a2a();
  MethodParams mp;
  mp.compressor = CompressorSpec::bernoulli(CompressorSpec::random_r(1), 1.0 / 20);
  auto opt = make_optimizer(MethodKind::kNl2, s.p3, mp, nullptr, Vector(s.p3.dim(), 0.0), 9);
  std::size_t bad_rounds = 0, fired = 0;
  for (int k = 0; k < 1000; ++k) {
    const RoundResult r = opt->step();
    for (const auto& w : r.payload.workers) fired += w.compressed[0].fired;
    if (!verify_replicas(*opt->learn_state()).ok) ++bad_rounds;
  }
  return {bad_rounds == 0, std::to_string(bad_rounds) + " inconsistent rounds of 1000 (" +
                               std::to_string(fired) + " fired messages)"};
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "path to the dnl tool not given"};
  const fs::path work = fs::temp_directory_path() / "dnl_acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path cfg = work / "run.json";
  write_text_file(cfg, R"({"dataset": {"kind": "a2a_like"}, "n": 15, "lambda": 0.001,
    "method": "nl1", "params": {"compressor": {"kind": "random_r", "r": 1}},
    "budget": {"max_iters": 60}, "seed": 12, "output_dir": "out"})");
  std::vector<std::string> csv;
  for (const char* root : {"a", "b"}) {
    const std::string cmd = "DNL_OUTPUT_ROOT='" + (work / root).string() + "' '" + cli +
                            "' run -c '" + cfg.string() + "' > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "run failed: " + cmd};
    for (const auto& e : fs::directory_iterator(work / root / "out")) {
      if (e.path().extension() == ".csv") csv.push_back(read_text_file(e.path()));
    }
  }
  if (csv.size() != 2) return {false, "expected one CSV per run"};
  return {csv[0] == csv[1] && !csv[0].empty(),
          csv[0] == csv[1] ? std::to_string(csv[0].size()) + " bytes identical" : "CSV traces differ"};
}

Outcome calculus_checks() {
  double worst_g = 0.0, worst_h = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t n = 2 + k % 3, m = 4 + k % 5, d = 2 + k % 7;
    RngStream rng(k, StreamTag::kTest, 9, 0);
    std::vector<double> f(n * m * d);
    std::vector<int> b(n * m);
    for (auto& v : f) v = rng.normal();
    for (auto& l : b) l = rng.bernoulli(0.5) ? 1 : -1;
    Dataset ds(d, std::move(f), std::move(b));
    const LossKind loss = k % 4 == 3 ? LossKind::kSquared : LossKind::kLogistic;
    const Problem p(ds, partition(ds, n, k), LossModel{loss}, 0.05 * static_cast<double>(k % 3));
    const Vector x = gaussian(d, k, 10);
    const double h = 1e-5 * (1.0 + norm(x));
    const Vector g = p.grad_P(x);
    const SymMatrix H = p.hessian_P(x);
    Vector fd(d);
    SymMatrix fdh(d);
    for (std::size_t j = 0; j < d; ++j) {
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (p.value_P(xp) - p.value_P(xm)) / (2 * h);
      const Vector col = scaled(1.0 / (2 * h), subtract(p.grad_P(xp), p.grad_P(xm)));
      for (std::size_t i = 0; i <= j; ++i) fdh.set(i, j, col[i]);
    }
    worst_g = std::max(worst_g, norm(subtract(fd, g)) / norm(g));
    worst_h = std::max(worst_h, (fdh - H).frobenius_norm() / H.frobenius_norm());
  }
  return {worst_g <= 1e-5 && worst_h <= 1e-4,
          "max relative gradient error=" + sci(worst_g) + ", Hessian error=" + sci(worst_h)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  report(1, "compressor contract", 10, compressor_contract);
  report(2, "cubic subproblem", 5, cubic_subproblem);
  a2a();  // shared setup, not charged to a criterion
  report(3, "NEWTON-STAR quadratic rate", 30, newton_star_rate);
  report(4, "NL1 local rate", 120, nl1_local_rate);
  report(5, "NL2/CNL domination and CNL monotonicity", 120, domination_and_monotonicity);
  report(6, "communication-efficiency ordering", 300, communication_ordering);
  report(7, "ledger exactness", 0, ledger_exactness);
  report(8, "replica consistency", 0, replica_consistency);
  report(9, "determinism", 0, [&] { return determinism(cli); });
  report(10, "calculus checks", 0, calculus_checks);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
