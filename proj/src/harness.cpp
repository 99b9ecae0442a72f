#include "dnl/harness.hpp"

#include <bit>
#include <chrono>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "dnl/error.hpp"

namespace dnl {

void CommLedger::append(LedgerEntry entry) {
  up_ += entry.upstream_total;
  down_ += entry.downstream;
  rounds_.push_back(std::move(entry));
}

namespace {

std::uint64_t ceil_log2(std::uint64_t v) {
  return v <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(v - 1));
}

}  // namespace

std::uint64_t worker_upstream_bits(const WorkerPayload& w, std::uint64_t setup_floats,
                                   const LedgerShape& shape) {
  std::uint64_t bits = 32 * (w.gradient_floats + w.scalar_floats + w.matrix_floats +
                             w.coefficient_floats + setup_floats);
  for (const auto& msg : w.compressed) {
    if (msg.spec.kind == CompressorKind::kBernoulli && !msg.fired) {
      bits += 1;
    } else {
      bits += bit_cost(msg.spec, msg.length);
    }
  }
  bits += w.data_vectors * (32 * shape.d + ceil_log2(shape.nm));
  return bits;
}

LedgerEntry charge_round(CommLedger& ledger, const RoundPayload& payload,
                         const LedgerShape& shape) {
  LedgerEntry e;
  e.upstream.reserve(payload.workers.size());
  for (const auto& w : payload.workers) {
    const std::uint64_t b = worker_upstream_bits(w, payload.setup_floats_per_worker, shape);
    e.upstream.push_back(b);
    e.upstream_total += b;
  }
  e.downstream = 32 * payload.broadcast_floats;
  ledger.append(e);
  return e;
}

ReplicaCheck verify_replicas(const LearnState& s) {
  ReplicaCheck out;
  if (s.h.size() != s.h_server.size()) {
    out.ok = false;
    return out;
  }
  for (std::size_t i = 0; i < s.h.size(); ++i) {
    const auto& a = s.h[i];
    const auto& b = s.h_server[i];
    for (std::size_t j = 0; j < std::max(a.size(), b.size()); ++j) {
      if (j >= a.size() || j >= b.size() ||
          std::bit_cast<std::uint64_t>(a[j]) != std::bit_cast<std::uint64_t>(b[j])) {
        out.mismatches.emplace_back(i, j);
      }
    }
  }
  out.ok = out.mismatches.empty();
  return out;
}

void require_replicas(const LearnState& s) {
  const ReplicaCheck c = verify_replicas(s);
  if (c.ok) return;
  std::string msg = "replica mismatch at";
  for (std::size_t k = 0; k < c.mismatches.size() && k < 8; ++k) {
    msg += " (" + std::to_string(c.mismatches[k].first) + ", " +
           std::to_string(c.mismatches[k].second) + ")";
  }
  if (c.mismatches.size() > 8) msg += " and " + std::to_string(c.mismatches.size() - 8) + " more";
  throw ConsistencyError(msg);
}

namespace {

double lyapunov(const Problem& p, MethodKind kind, const MethodParams& params,
                const Optimizer& opt, const Oracles& o, double dist_sq) {
  if (!is_learning_method(kind)) return dist_sq;
  const auto c = p.constants();
  const double eta = effective_eta(p, params);
  const double denom = static_cast<double>(p.n() * p.m()) * eta * c.nu * c.nu * c.R * c.R;
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return dist_sq + lyapunov_weight(kind) / denom * *opt.learning_error(o);
}

}  // namespace

Trace run_experiment(MethodKind kind, const Problem& p, const MethodParams& params,
                     const Oracles* oracles, const Vector& x0, std::uint64_t seed,
                     const RunOptions& options) {
  if (kind == MethodKind::kNl1 && !(p.lambda() > 0.0)) {
    throw ConfigError("method nl1 requires lambda > 0");
  }
  if (needs_oracles(kind) && oracles == nullptr) {
    throw ConfigError(std::string(to_string(kind)) + " requires reference-optimum oracles");
  }
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const LedgerShape shape{p.dim(), p.n() * p.m()};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Trace trace;
  trace.method = kind;
  auto opt = make_optimizer(kind, p, params, oracles, x0, seed);

  auto record = [&](const RoundInfo* info) {
    TraceRow row;
    row.iter = opt->iteration();
    const Vector& x = opt->x();
    row.value = p.value_P(x);
    row.grad_norm = norm(p.grad_P(x));
    row.bits_up_cum = trace.ledger.upstream_cum();
    row.bits_down_cum = trace.ledger.downstream_cum();
    if (oracles != nullptr && !oracles->x_star.empty()) {
      row.gap = row.value - oracles->P_star;
      const double dsq = squared_norm(subtract(x, oracles->x_star));
      row.dist = std::sqrt(dsq);
      if (!oracles->h_star.empty()) row.learning_error = opt->learning_error(*oracles);
      row.phi = (is_learning_method(kind) && !row.learning_error)
                    ? nan
                    : lyapunov(p, kind, params, *opt, *oracles, dsq);
    } else {
      row.gap = row.dist = row.phi = nan;
    }
    if (info != nullptr) {
      row.beta = info->beta;
      row.domination_min_eig = info->domination_min_eig;
      row.clamp_events = info->clamp_events;
      row.hull_violations = info->hull_violations;
      row.bfgs_skipped = info->bfgs_skipped;
    }
    if (options.timing) {
      row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }
    trace.rows.push_back(row);
    return row;
  };

  auto stop = [&](const TraceRow& row) -> const char* {
    if (options.budget.target_gap && row.gap <= *options.budget.target_gap) return "target_gap";
    if (options.budget.bit_budget && row.bits_up_cum >= *options.budget.bit_budget) {
      return "bit_budget";
    }
    if (!std::isfinite(row.value)) return "diverged";
    if (row.iter >= options.budget.max_iters) return "max_iters";
    return nullptr;
  };

  const char* reason = stop(record(nullptr));
  while (reason == nullptr) {
    RoundResult r = opt->step();
    charge_round(trace.ledger, r.payload, shape);
    if (options.keep_payloads) trace.payloads.push_back(std::move(r.payload));
    if (options.check_replicas && opt->learn_state() != nullptr) {
      require_replicas(*opt->learn_state());
    }
    reason = stop(record(&r.info));
  }
  trace.stop_reason = reason;
  trace.x_final = opt->x();
  return trace;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "iter,gap,grad_norm,bits_up_cum,bits_down_cum,phi,wall_ms\n";
  for (const auto& r : trace.rows) {
    out << r.iter << ',' << format_double(r.gap) << ',' << format_double(r.grad_norm) << ','
        << r.bits_up_cum << ',' << r.bits_down_cum << ',' << format_double(r.phi) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

std::optional<std::uint64_t> bits_to_gap(const Trace& trace, double threshold) {
  for (const auto& r : trace.rows) {
    if (r.gap <= threshold) return r.bits_up_cum;
  }
  return std::nullopt;
}

}  // namespace dnl
