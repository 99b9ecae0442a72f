#include "dnl/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dnl/error.hpp"
#include "dnl/rng.hpp"

namespace dnl {

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::kGd: return "gd";
    case MethodKind::kDcgd: return "dcgd";
    case MethodKind::kDiana: return "diana";
    case MethodKind::kBfgs: return "bfgs";
    case MethodKind::kNewton: return "newton";
    case MethodKind::kNewtonCoef: return "newton_coef";
    case MethodKind::kNewtonStar: return "ns";
    case MethodKind::kMaxNewton: return "mn";
    case MethodKind::kNl1: return "nl1";
    case MethodKind::kNl2: return "nl2";
    case MethodKind::kCnl: return "cnl";
  }
  return "?";
}

MethodKind method_kind_from_string(std::string_view name) {
  for (auto k : {MethodKind::kGd, MethodKind::kDcgd, MethodKind::kDiana, MethodKind::kBfgs,
                 MethodKind::kNewton, MethodKind::kNewtonCoef, MethodKind::kNewtonStar,
                 MethodKind::kMaxNewton, MethodKind::kNl1, MethodKind::kNl2, MethodKind::kCnl}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool is_learning_method(MethodKind kind) {
  return kind == MethodKind::kNl1 || kind == MethodKind::kNl2 || kind == MethodKind::kCnl;
}

bool needs_oracles(MethodKind kind) {
  return kind == MethodKind::kNewtonStar || kind == MethodKind::kMaxNewton;
}

Vector newton_step(const Problem& p, std::span<const double> x) {
  const Vector step = solve_spd(p.hessian_P(x), p.grad_P(x));
  return subtract(x, step);
}

Oracles reference_optimum(const Problem& p, int newton_steps) {
  Vector x(p.dim(), 0.0);
  for (int k = 0; k < newton_steps; ++k) x = newton_step(p, x);
  Oracles o;
  o.x_star = x;
  o.P_star = p.value_P(x);
  o.grad_norm = norm(p.grad_P(x));
  o.h_star.resize(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) o.h_star[i] = p.h_coeffs(i, x);
  o.H_star = p.weighted_gram(o.h_star);
  SymMatrix reg = o.H_star;
  reg.add_diagonal(p.lambda());
  o.mu_star = min_eigenvalue(reg);
  return o;
}

namespace {

Vector average_gradient(const Problem& p, std::span<const double> x) {
  // Ordered reduction over workers, then the regularizer.
  return p.grad_P(x);
}

SymMatrix regularized(SymMatrix a, double lambda) {
  a.add_diagonal(lambda);
  return a;
}

void require_oracles(const Oracles* o, MethodKind kind) {
  if (o == nullptr || o->h_star.empty()) {
    throw ConfigError(std::string(to_string(kind)) + " requires reference-optimum oracles");
  }
}

SymMatrix max_newton_matrix(const Problem& p, const Oracles& o,
                            const std::vector<SymMatrix>& local_star, std::span<const double> x,
                            std::vector<double>* betas) {
  SymMatrix H(p.dim());
  for (std::size_t i = 0; i < p.n(); ++i) {
    const Vector hx = p.h_coeffs(i, x);
    double beta = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.m(); ++j) beta = std::max(beta, hx[j] / o.h_star[i][j]);
    if (betas) betas->push_back(beta);
    H.add_scaled(beta / static_cast<double>(p.n()), local_star[i]);
  }
  return H;
}

std::vector<SymMatrix> local_star_grams(const Problem& p, const Oracles& o) {
  std::vector<SymMatrix> out;
  out.reserve(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) {
    for (double h : o.h_star[i]) {
      if (!(h > 0.0)) throw ConfigError("max-newton: h(x*) has a non-positive entry");
    }
    out.push_back(p.local_weighted_gram(i, o.h_star[i]));
  }
  return out;
}

}  // namespace

Vector ns_step(const Problem& p, const Oracles& oracles, std::span<const double> x) {
  require_oracles(&oracles, MethodKind::kNewtonStar);
  const Vector step = solve_spd(regularized(oracles.H_star, p.lambda()), p.grad_P(x));
  return subtract(x, step);
}

Vector mn_step(const Problem& p, const Oracles& oracles, std::span<const double> x) {
  require_oracles(&oracles, MethodKind::kMaxNewton);
  const auto local = local_star_grams(p, oracles);
  const SymMatrix H = max_newton_matrix(p, oracles, local, x, nullptr);
  return subtract(x, solve_spd(regularized(H, p.lambda()), p.grad_P(x)));
}

double effective_eta(const Problem& p, const MethodParams& params) {
  if (params.eta) return *params.eta;
  return 1.0 / (omega(params.compressor, p.m()) + 1.0);
}

double lyapunov_weight(MethodKind kind) {
  switch (kind) {
    case MethodKind::kNl1:
    case MethodKind::kNl2:
      return 1.0 / 3.0;
    case MethodKind::kCnl:
      return 4.0 / 9.0;
    default:
      return 0.0;
  }
}

double neighborhood_radius_sq(const Problem& p, MethodKind kind, const Oracles& oracles) {
  const auto c = p.constants();
  const double denom_base = c.nu * c.nu * std::pow(c.R, 6);
  if (denom_base == 0.0) return std::numeric_limits<double>::infinity();
  if (kind == MethodKind::kNl1) return p.lambda() * p.lambda() / (12.0 * denom_base);
  const double nm = static_cast<double>(p.n() * p.m());
  return oracles.mu_star * oracles.mu_star / (432.0 * nm * denom_base);
}

// ---------------------------------------------------------------------------
// Coefficient learning (NL1, NL2, CNL)

LearnState init_learn_state(const Problem& p, MethodKind kind, const MethodParams& params,
                            Vector x0) {
  if (!is_learning_method(kind)) throw InputError("init_learn_state: not a learning method");
  if (x0.size() != p.dim()) throw InputError("init_learn_state: x0 has wrong dimension");
  params.compressor.validate(p.m());
  LearnState s;
  s.x = std::move(x0);
  s.h.resize(p.n());
  const double gamma = p.loss().gamma();
  for (std::size_t i = 0; i < p.n(); ++i) {
    s.h[i] = params.h_init == CoefficientInit::kAtStart ? p.h_coeffs(i, s.x) : Vector(p.m(), 0.0);
    for (double& v : s.h[i]) {
      if (kind == MethodKind::kNl1) {
        v = std::max(v, 0.0);
      } else if (params.clamp) {
        v = std::clamp(v, -gamma, gamma);
      }
    }
  }
  s.h_server = s.h;
  s.learned = rebuild_learned(p, kind, s);
  return s;
}

SymMatrix rebuild_learned(const Problem& p, MethodKind kind, const LearnState& s) {
  if (kind == MethodKind::kNl1) return p.weighted_gram(s.h_server);
  const double shift = 2.0 * p.loss().gamma();
  std::vector<Vector> shifted = s.h_server;
  for (auto& hi : shifted) {
    for (double& v : hi) v += shift;
  }
  return p.weighted_gram(shifted);
}

namespace {

constexpr std::uint64_t kFaultSeedMix = 0x9E3779B97F4A7C15ull;

// Applies h_j <- post(h_j + eta * delta_j) on the support of delta.
template <typename Post>
void apply_update(Vector& h, std::span<const double> delta, double eta, Post post) {
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (delta[j] != 0.0) h[j] = post(h[j] + eta * delta[j]);
  }
}

RoundResult learning_round(const Problem& p, LearnState& s, const MethodParams& params,
                           std::uint64_t seed, MethodKind kind) {
  const std::size_t n = p.n(), m = p.m(), d = p.dim();
  const double eta = effective_eta(p, params);
  const double gamma = p.loss().gamma();
  const double lambda = p.lambda();
  const bool nl1 = kind == MethodKind::kNl1;

  auto post = [&](double v) {
    if (nl1) return std::max(v, 0.0);
    return params.clamp ? std::clamp(v, -gamma, gamma) : v;
  };

  RoundResult out;
  out.payload.workers.resize(n);
  out.payload.broadcast_floats = d;

  Vector grad_sum(d, 0.0);
  std::vector<SparseMessage> wire(n);
  double beta = -std::numeric_limits<double>::infinity();
  const auto iter32 = static_cast<std::uint32_t>(s.iter);

  for (std::size_t i = 0; i < n; ++i) {
    const auto worker32 = static_cast<std::uint32_t>(i);
    axpy(1.0, p.local_grad(i, s.x), grad_sum);
    const Vector hx = p.h_coeffs(i, s.x);
    const Vector diff = subtract(hx, s.h[i]);

    RngStream rng(seed, StreamTag::kCompressor, worker32, iter32);
    const CompressedVector msg = compress(params.compressor, diff, rng);
    wire[i] = encode(msg);

    if (!nl1) {
      double beta_i = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        beta_i = std::max(beta_i, (hx[j] + 2.0 * gamma) / (s.h[i][j] + 2.0 * gamma));
      }
      beta = std::max(beta, beta_i);
    }

    if (params.track_hull) {
      if (s.hull_lo.empty()) {
        s.hull_lo.assign(n, {});
        s.hull_hi.assign(n, {});
      }
      if (s.hull_lo[i].empty()) {
        s.hull_lo[i] = hx;
        s.hull_hi[i] = hx;
      } else {
        for (std::size_t j = 0; j < m; ++j) {
          s.hull_lo[i][j] = std::min(s.hull_lo[i][j], hx[j]);
          s.hull_hi[i][j] = std::max(s.hull_hi[i][j], hx[j]);
        }
      }
    }

    // Worker-side update.
    const Vector before = s.h[i];
    if (params.fault_worker && *params.fault_worker == i) {
      RngStream other(seed ^ kFaultSeedMix, StreamTag::kCompressor, worker32, iter32);
      apply_update(s.h[i], compress(params.compressor, diff, other).values, eta, post);
    } else {
      apply_update(s.h[i], msg.values, eta, post);
    }

    WorkerPayload& w = out.payload.workers[i];
    w.gradient_floats = d;
    w.scalar_floats = nl1 ? 0 : 1;
    w.compressed.push_back({params.compressor, m, msg.fired, wire[i].indices.size()});
    std::size_t changed = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.h[i][j] != before[j]) ++changed;
      if (!nl1 && params.clamp && s.h[i][j] != before[j] &&
          std::abs(before[j] + eta * msg.values[j]) > gamma) {
        ++out.info.clamp_events;
      }
      if (params.track_hull) {
        const double tol = 1e-14 * (1.0 + std::abs(s.h[i][j]));
        if (s.h[i][j] < s.hull_lo[i][j] - tol || s.h[i][j] > s.hull_hi[i][j] + tol) {
          ++out.info.hull_violations;
        }
      }
    }
    w.data_vectors = params.option1 ? changed : 0;
  }

  Vector g = scaled(1.0 / static_cast<double>(n), grad_sum);
  axpy(lambda, s.x, g);

  // Server: model step from the pre-update estimate.
  if (!nl1) {
    s.beta = beta;
    out.info.beta = beta;
  }
  auto model_matrix = [&] {
    if (nl1) return regularized(s.learned, lambda);
    SymMatrix h = s.learned;
    h.scale(beta);
    h.add_scaled(-2.0 * gamma, p.gram());
    h.add_diagonal(lambda);
    return h;
  };
  SymMatrix H_reg = model_matrix();
  if (!nl1 && params.check_domination) {
    out.info.domination_min_eig = min_eigenvalue(H_reg - p.hessian_P(s.x));
  }

  Vector x_next;
  if (kind == MethodKind::kCnl) {
    const CubicSolution sol = solve_cubic_model(H_reg, g, p.constants().M);
    out.info.cubic_residual = sol.residual;
    out.info.model_decrease = cubic_model_value(H_reg, g, p.constants().M, sol.step);
    x_next = add(s.x, sol.step);
  } else {
    try {
      x_next = subtract(s.x, solve_spd(H_reg, g));
    } catch (const SingularityError&) {
      // Accumulated rank-one drift can cost definiteness; rebuild once and retry.
      s.learned = rebuild_learned(p, kind, s);
      H_reg = model_matrix();
      x_next = subtract(s.x, solve_spd(H_reg, g));
    }
  }

  // Server: replica update from the wire messages, then the learned matrix.
  const double w_nm = 1.0 / static_cast<double>(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector delta = decode(wire[i], m);
    const Vector before = s.h_server[i];
    apply_update(s.h_server[i], delta, eta, post);
    for (std::size_t j = 0; j < m; ++j) {
      const double change = s.h_server[i][j] - before[j];
      if (change != 0.0) s.learned.add_rank1(w_nm * change, p.point(i, j));
    }
  }

  s.x = std::move(x_next);
  ++s.iter;
  if (params.rebuild_every > 0 && s.iter % params.rebuild_every == 0) {
    s.learned = rebuild_learned(p, kind, s);
  }
  return out;
}

}  // namespace

RoundResult nl1_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed) {
  if (!(p.lambda() > 0.0)) throw ConfigError("nl1 requires lambda > 0");
  return learning_round(p, s, params, seed, MethodKind::kNl1);
}

RoundResult nl2_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed) {
  return learning_round(p, s, params, seed, MethodKind::kNl2);
}

RoundResult cnl_round(const Problem& p, LearnState& s, const MethodParams& params,
                      std::uint64_t seed) {
  return learning_round(p, s, params, seed, MethodKind::kCnl);
}

// ---------------------------------------------------------------------------
// Optimizer adapters

namespace {

class LearnOptimizer final : public Optimizer {
 public:
  LearnOptimizer(MethodKind kind, const Problem& p, MethodParams params, Vector x0,
                 std::uint64_t seed)
      : kind_(kind), p_(p), params_(std::move(params)), seed_(seed),
        state_(init_learn_state(p, kind, params_, std::move(x0))) {
    if (kind == MethodKind::kNl1 && !(p.lambda() > 0.0)) {
      throw ConfigError("nl1 requires lambda > 0");
    }
  }

  MethodKind kind() const override { return kind_; }
  const Vector& x() const override { return state_.x; }
  const LearnState* learn_state() const override { return &state_; }

  RoundResult step() override {
    RoundResult r = learning_round(p_, state_, params_, seed_, kind_);
    iter_ = state_.iter;
    return r;
  }

  std::optional<double> learning_error(const Oracles& o) const override {
    if (o.h_star.empty()) return std::nullopt;
    double s = 0.0;
    for (std::size_t i = 0; i < p_.n(); ++i) s += squared_norm(subtract(state_.h[i], o.h_star[i]));
    return s;
  }

 private:
  MethodKind kind_;
  const Problem& p_;
  MethodParams params_;
  std::uint64_t seed_;
  LearnState state_;
};

class NewtonOptimizer final : public Optimizer {
 public:
  NewtonOptimizer(MethodKind kind, const Problem& p, Vector x0)
      : kind_(kind), p_(p), x_(std::move(x0)) {}

  MethodKind kind() const override { return kind_; }
  const Vector& x() const override { return x_; }

  RoundResult step() override {
    RoundResult r;
    const std::size_t d = p_.dim();
    r.payload.broadcast_floats = d;
    r.payload.workers.assign(p_.n(), {});
    for (auto& w : r.payload.workers) {
      w.gradient_floats = d;
      if (kind_ == MethodKind::kNewton) {
        w.matrix_floats = d * (d + 1) / 2;
      } else {
        w.coefficient_floats = p_.m();
      }
    }
    x_ = newton_step(p_, x_);
    ++iter_;
    return r;
  }

 private:
  MethodKind kind_;
  const Problem& p_;
  Vector x_;
};

class NewtonStarOptimizer final : public Optimizer {
 public:
  NewtonStarOptimizer(const Problem& p, const Oracles& o, Vector x0)
      : p_(p), factor_(regularized(o.H_star, p.lambda())), x_(std::move(x0)) {}

  MethodKind kind() const override { return MethodKind::kNewtonStar; }
  const Vector& x() const override { return x_; }

  RoundResult step() override {
    RoundResult r;
    r.payload.broadcast_floats = p_.dim();
    r.payload.workers.assign(p_.n(), {});
    for (auto& w : r.payload.workers) w.gradient_floats = p_.dim();
    x_ = subtract(x_, factor_.solve(average_gradient(p_, x_)));
    ++iter_;
    return r;
  }

 private:
  const Problem& p_;
  Cholesky factor_;
  Vector x_;
};

class MaxNewtonOptimizer final : public Optimizer {
 public:
  MaxNewtonOptimizer(const Problem& p, const Oracles& o, Vector x0)
      : p_(p), o_(o), local_(local_star_grams(p, o)), x_(std::move(x0)) {}

  MethodKind kind() const override { return MethodKind::kMaxNewton; }
  const Vector& x() const override { return x_; }

  RoundResult step() override {
    RoundResult r;
    r.payload.broadcast_floats = p_.dim();
    r.payload.workers.assign(p_.n(), {});
    for (auto& w : r.payload.workers) {
      w.gradient_floats = p_.dim();
      w.scalar_floats = 1;
    }
    std::vector<double> betas;
    const SymMatrix H = max_newton_matrix(p_, o_, local_, x_, &betas);
    r.info.beta = *std::max_element(betas.begin(), betas.end());
    x_ = subtract(x_, solve_spd(regularized(H, p_.lambda()), average_gradient(p_, x_)));
    ++iter_;
    return r;
  }

 private:
  const Problem& p_;
  const Oracles& o_;
  std::vector<SymMatrix> local_;
  Vector x_;
};

class FirstOrderOptimizer final : public Optimizer {
 public:
  FirstOrderOptimizer(MethodKind kind, const Problem& p, MethodParams params, Vector x0,
                      std::uint64_t seed)
      : kind_(kind), p_(p), params_(std::move(params)), seed_(seed), x_(std::move(x0)) {
    const double w = kind == MethodKind::kGd ? 0.0 : omega(params_.compressor, p.dim());
    const auto c = p.constants();
    const double smooth = c.gamma * c.R * c.R + p.lambda();
    stepsize_ = params_.stepsize.value_or(
        1.0 / ((1.0 + 2.0 * w / static_cast<double>(p.n())) * smooth));
    shift_rate_ = params_.shift_rate.value_or(1.0 / (w + 1.0));
    if (kind == MethodKind::kDiana) shifts_.assign(p.n(), Vector(p.dim(), 0.0));
  }

  MethodKind kind() const override { return kind_; }
  const Vector& x() const override { return x_; }
  double stepsize() const { return stepsize_; }

  RoundResult step() override {
    const std::size_t n = p_.n(), d = p_.dim();
    RoundResult r;
    r.payload.broadcast_floats = d;
    r.payload.workers.assign(n, {});
    Vector est(d, 0.0);
    const auto iter32 = static_cast<std::uint32_t>(iter_);
    for (std::size_t i = 0; i < n; ++i) {
      Vector gi = p_.local_grad(i, x_);
      axpy(p_.lambda(), x_, gi);
      WorkerPayload& w = r.payload.workers[i];
      if (kind_ == MethodKind::kGd) {
        w.gradient_floats = d;
        axpy(1.0, gi, est);
        continue;
      }
      RngStream rng(seed_, StreamTag::kCompressor, static_cast<std::uint32_t>(i), iter32);
      if (kind_ == MethodKind::kDcgd) {
        const CompressedVector c = compress(params_.compressor, gi, rng);
        w.compressed.push_back({params_.compressor, d, c.fired, encode(c).indices.size()});
        axpy(1.0, c.values, est);
      } else {
        const CompressedVector c = compress(params_.compressor, subtract(gi, shifts_[i]), rng);
        w.compressed.push_back({params_.compressor, d, c.fired, encode(c).indices.size()});
        axpy(1.0, shifts_[i], est);
        axpy(1.0, c.values, est);
        axpy(shift_rate_, c.values, shifts_[i]);
      }
    }
    axpy(-stepsize_ / static_cast<double>(n), est, x_);
    ++iter_;
    return r;
  }

 private:
  MethodKind kind_;
  const Problem& p_;
  MethodParams params_;
  std::uint64_t seed_;
  Vector x_;
  double stepsize_ = 0.0;
  double shift_rate_ = 1.0;
  std::vector<Vector> shifts_;
};

class BfgsOptimizer final : public Optimizer {
 public:
  BfgsOptimizer(const Problem& p, const MethodParams& params, Vector x0)
      : p_(p), charge_setup_(params.charge_setup), x_(std::move(x0)) {
    const Cholesky chol(p.hessian_P(x_));
    const std::size_t d = p.dim();
    std::vector<double> full(d * d);
    Vector e(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      e[k] = 1.0;
      const Vector col = chol.solve(e);
      e[k] = 0.0;
      for (std::size_t r = 0; r < d; ++r) full[r * d + k] = col[r];
    }
    inv_ = SymMatrix::from_upper(d, full);
  }

  MethodKind kind() const override { return MethodKind::kBfgs; }
  const Vector& x() const override { return x_; }

  RoundResult step() override {
    const std::size_t d = p_.dim();
    RoundResult r;
    r.payload.broadcast_floats = d;
    r.payload.workers.assign(p_.n(), {});
    for (auto& w : r.payload.workers) w.gradient_floats = d;
    if (iter_ == 0 && charge_setup_) r.payload.setup_floats_per_worker = d * (d + 1) / 2;

    Vector g = average_gradient(p_, x_);
    if (!prev_x_.empty()) {
      const Vector s = subtract(x_, prev_x_);
      const Vector y = subtract(g, prev_g_);
      const double sy = dot(s, y);
      if (sy > 1e-12 * norm(s) * norm(y)) {
        const double rho = 1.0 / sy;
        const Vector u = inv_.multiply(y);
        inv_.add_rank1(rho + rho * rho * dot(y, u), s);
        // -(rho)(s u^T + u s^T) as a difference of two symmetric rank-one terms.
        inv_.add_rank1(-0.5 * rho, add(s, u));
        inv_.add_rank1(0.5 * rho, subtract(s, u));
      } else {
        r.info.bfgs_skipped = true;
      }
    }
    prev_x_ = x_;
    prev_g_ = g;
    x_ = subtract(x_, inv_.multiply(g));
    ++iter_;
    return r;
  }

 private:
  const Problem& p_;
  bool charge_setup_;
  Vector x_;
  SymMatrix inv_;
  Vector prev_x_, prev_g_;
};

}  // namespace

std::unique_ptr<Optimizer> make_optimizer(MethodKind kind, const Problem& p,
                                          const MethodParams& params, const Oracles* oracles,
                                          Vector x0, std::uint64_t seed) {
  if (x0.size() != p.dim()) throw ConfigError("x0 has the wrong dimension");
  switch (kind) {
    case MethodKind::kGd:
    case MethodKind::kDcgd:
    case MethodKind::kDiana:
      return std::make_unique<FirstOrderOptimizer>(kind, p, params, std::move(x0), seed);
    case MethodKind::kBfgs:
      return std::make_unique<BfgsOptimizer>(p, params, std::move(x0));
    case MethodKind::kNewton:
    case MethodKind::kNewtonCoef:
      return std::make_unique<NewtonOptimizer>(kind, p, std::move(x0));
    case MethodKind::kNewtonStar:
      require_oracles(oracles, kind);
      return std::make_unique<NewtonStarOptimizer>(p, *oracles, std::move(x0));
    case MethodKind::kMaxNewton:
      require_oracles(oracles, kind);
      return std::make_unique<MaxNewtonOptimizer>(p, *oracles, std::move(x0));
    case MethodKind::kNl1:
    case MethodKind::kNl2:
    case MethodKind::kCnl:
      return std::make_unique<LearnOptimizer>(kind, p, params, std::move(x0), seed);
  }
  throw ConfigError("unsupported method");
}

}  // namespace dnl
