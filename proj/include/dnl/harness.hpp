#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnl/methods.hpp"
#include "dnl/payload.hpp"
#include "dnl/problem.hpp"

namespace dnl {

/// Bits of one round, 32-bit scalar convention.
struct LedgerEntry {
  std::vector<std::uint64_t> upstream;  // per worker
  std::uint64_t upstream_total = 0;
  std::uint64_t downstream = 0;
};

class CommLedger {
 public:
  void append(LedgerEntry entry);
  const std::vector<LedgerEntry>& rounds() const noexcept { return rounds_; }
  std::uint64_t upstream_cum() const noexcept { return up_; }
  std::uint64_t downstream_cum() const noexcept { return down_; }

 private:
  std::vector<LedgerEntry> rounds_;
  std::uint64_t up_ = 0;
  std::uint64_t down_ = 0;
};

/// Problem shape the ledger formulas depend on.
struct LedgerShape {
  std::size_t d = 0;
  std::size_t nm = 0;  // total data points, for Option 1 index bits
};

/// Upstream bits of one worker message:
///   32 (gradient + scalar + matrix + coefficient + setup floats)
///   + compressed message costs (1 bit for a silent Bernoulli wrapper)
///   + data vectors * (32 d + ceil(log2(nm))).
std::uint64_t worker_upstream_bits(const WorkerPayload& w, std::uint64_t setup_floats,
                                   const LedgerShape& shape);
LedgerEntry charge_round(CommLedger& ledger, const RoundPayload& payload, const LedgerShape& shape);

struct Budget {
  std::size_t max_iters = 100;
  std::optional<std::uint64_t> bit_budget;  // cumulative upstream bits
  std::optional<double> target_gap;

  friend bool operator==(const Budget&, const Budget&) = default;
};

struct TraceRow {
  std::size_t iter = 0;
  double gap = 0.0;  // P(x) - P*, NaN without oracles
  double grad_norm = 0.0;
  std::uint64_t bits_up_cum = 0;
  std::uint64_t bits_down_cum = 0;
  double phi = 0.0;  // Lyapunov value, NaN when undefined
  double wall_ms = 0.0;
  double value = 0.0;
  double dist = 0.0;  // ||x - x*||, NaN without oracles
  double beta = 1.0;
  std::optional<double> learning_error;
  std::optional<double> domination_min_eig;
  std::size_t clamp_events = 0;
  std::size_t hull_violations = 0;
  bool bfgs_skipped = false;
};

struct ReplicaCheck {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::size_t>> mismatches;  // (worker, index)
};

/// Bitwise comparison of the server replicas against the worker vectors.
ReplicaCheck verify_replicas(const LearnState& s);
/// Throws ConsistencyError naming the first mismatches.
void require_replicas(const LearnState& s);

struct RunOptions {
  Budget budget;
  bool timing = false;          // wall_ms stays 0 unless set, so traces are reproducible
  bool check_replicas = false;  // learning methods: verify every round
  bool keep_payloads = true;
};

struct Trace {
  MethodKind method = MethodKind::kGd;
  std::vector<TraceRow> rows;
  std::vector<RoundPayload> payloads;  // one per round, for independent bit recomputation
  CommLedger ledger;
  std::string stop_reason;
  Vector x_final;
};

/// Runs rounds until the first budget condition holds. The initial row
/// (iter 0, no bits) is always recorded. oracles may be null unless the
/// method needs them; without them gap, dist and phi are NaN.
Trace run_experiment(MethodKind kind, const Problem& p, const MethodParams& params,
                     const Oracles* oracles, const Vector& x0, std::uint64_t seed,
                     const RunOptions& options);

/// iter,gap,grad_norm,bits_up_cum,bits_down_cum,phi,wall_ms
void write_trace_csv(std::ostream& out, const Trace& trace);
/// Shortest round-trip decimal form ("nan", "inf" for non-finite values).
std::string format_double(double v);

/// Upstream bits of the first row with gap <= threshold.
std::optional<std::uint64_t> bits_to_gap(const Trace& trace, double threshold);

}  // namespace dnl
