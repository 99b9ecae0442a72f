#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnl/compressors.hpp"
#include "dnl/cubic.hpp"
#include "dnl/linalg.hpp"
#include "dnl/payload.hpp"
#include "dnl/problem.hpp"

namespace dnl {

enum class MethodKind {
  kGd,
  kDcgd,
  kDiana,
  kBfgs,
  kNewton,       // naive: workers ship local Hessians
  kNewtonCoef,   // workers ship the m coefficients h_ij(x)
  kNewtonStar,
  kMaxNewton,
  kNl1,
  kNl2,
  kCnl,
};

std::string_view to_string(MethodKind kind);
MethodKind method_kind_from_string(std::string_view name);
bool is_learning_method(MethodKind kind);
bool needs_oracles(MethodKind kind);

/// Reference solution and the curvature data some methods assume known.
struct Oracles {
  Vector x_star;
  std::vector<Vector> h_star;  // h_i(x*) per worker
  SymMatrix H_star;            // H(x*) = Hessian of f at x* (no lambda)
  double P_star = 0.0;
  double grad_norm = 0.0;      // ||grad P(x*)||
  double mu_star = 0.0;        // smallest eigenvalue of H(x*) + lambda I
};

/// x_star = 20 Newton steps from 0; everything else evaluated there.
Oracles reference_optimum(const Problem& p, int newton_steps = 20);

Vector newton_step(const Problem& p, std::span<const double> x);
Vector ns_step(const Problem& p, const Oracles& oracles, std::span<const double> x);
Vector mn_step(const Problem& p, const Oracles& oracles, std::span<const double> x);

enum class CoefficientInit { kAtStart, kZero };

struct MethodParams {
  CompressorSpec compressor = CompressorSpec::identity();
  std::optional<double> eta;         // learning rate; default 1/(omega+1)
  std::optional<double> stepsize;    // GD/DCGD/DIANA; default from smoothness
  std::optional<double> shift_rate;  // DIANA; default 1/(omega+1)
  bool option1 = true;               // ship a_ij with nonzero coefficient updates
  bool clamp = true;                 // NL2/CNL: clamp h to [-gamma, gamma]
  CoefficientInit h_init = CoefficientInit::kAtStart;
  std::size_t rebuild_every = 200;   // full rebuild of the learned matrix
  bool charge_setup = true;          // BFGS: charge the initial Hessian upload
  bool check_domination = false;     // NL2/CNL: eigenvalue check per round
  bool track_hull = false;           // NL: convex-combination check per round
  // Testing hook: this worker updates its own coefficients with a draw from a
  // different stream than the message it transmits.
  std::optional<std::size_t> fault_worker;

  friend bool operator==(const MethodParams&, const MethodParams&) = default;
};

/// Per-round observations that are not part of the iterate.
struct RoundInfo {
  double beta = 1.0;
  std::optional<double> domination_min_eig;  // lambda_min(H^k + lambda I - grad^2 P(x^k))
  std::size_t clamp_events = 0;
  std::size_t hull_violations = 0;
  bool bfgs_skipped = false;
  std::optional<double> cubic_residual;
  std::optional<double> model_decrease;  // T(x^k, s^k)
};

struct RoundResult {
  RoundPayload payload;
  RoundInfo info;
};

/// Server and worker state of the coefficient-learning methods.
struct LearnState {
  Vector x;
  std::vector<Vector> h;         // worker-side h_i^k
  std::vector<Vector> h_server;  // server replicas of h_i^k
  SymMatrix learned;             // NL1: H^k; NL2/CNL: A^k
  double beta = 1.0;
  std::size_t iter = 0;
  // Trajectory envelope of h_ij(x^t), filled when track_hull is set.
  std::vector<Vector> hull_lo, hull_hi;
};

LearnState init_learn_state(const Problem& p, MethodKind kind, const MethodParams& params,
                            Vector x0);
/// Rebuilds the learned matrix from the server replicas.
SymMatrix rebuild_learned(const Problem& p, MethodKind kind, const LearnState& s);

RoundResult nl1_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed);
RoundResult nl2_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed);
RoundResult cnl_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed);

/// Learning rate actually used: params.eta or 1/(omega+1) on R^m.
double effective_eta(const Problem& p, const MethodParams& params);

/// Lyapunov constant c_q in ||x - x*||^2 + c_q/(m n eta nu^2 R^2) sum ||h_i - h_i*||^2.
double lyapunov_weight(MethodKind kind);
/// Squared radius of the local neighborhood where the NL1/NL2/CNL local rates hold.
double neighborhood_radius_sq(const Problem& p, MethodKind kind, const Oracles& oracles);

/// Uniform round-by-round driver over every method.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual MethodKind kind() const = 0;
  virtual const Vector& x() const = 0;
  virtual RoundResult step() = 0;
  /// sum_i ||h_i - h_i(x*)||^2 for learning methods.
  virtual std::optional<double> learning_error(const Oracles&) const { return std::nullopt; }
  virtual const LearnState* learn_state() const { return nullptr; }
  std::size_t iteration() const noexcept { return iter_; }

 protected:
  std::size_t iter_ = 0;
};

std::unique_ptr<Optimizer> make_optimizer(MethodKind kind, const Problem& p,
                                          const MethodParams& params, const Oracles* oracles,
                                          Vector x0, std::uint64_t seed);

}  // namespace dnl
