#include "dnl/cubic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dnl/error.hpp"

namespace dnl {

namespace {

Vector optimality_residual(const SymMatrix& h, std::span<const double> g, double M,
                           std::span<const double> s) {
  Vector r = h.multiply(s);
  axpy(1.0, g, r);
  axpy(0.5 * M * norm(s), s, r);
  return r;
}

CubicSolution finish(const SymMatrix& h, std::span<const double> g, double M, Vector s,
                     int iterations) {
  CubicSolution out;
  out.radius = norm(s);
  out.residual = norm(optimality_residual(h, g, M, s));
  out.iterations = iterations;
  out.step = std::move(s);
  const double tol = 1e-9 * (norm(g) + 1.0);
  if (!(out.residual <= tol)) {
    throw NumericalError("cubic subproblem: optimality residual " + std::to_string(out.residual) +
                         " exceeds " + std::to_string(tol));
  }
  return out;
}

}  // namespace

double cubic_model_value(const SymMatrix& h_reg, std::span<const double> g, double M,
                         std::span<const double> s) {
  const double r = norm(s);
  return dot(g, s) + 0.5 * dot(h_reg.multiply(s), s) + M / 6.0 * r * r * r;
}

CubicSolution solve_cubic_model(const SymMatrix& h_reg, std::span<const double> g, double M) {
  if (g.size() != h_reg.dim()) throw InputError("solve_cubic_model: dimension mismatch");
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("solve_cubic_model: M must be >= 0");
  if (!all_finite(g)) throw InputError("solve_cubic_model: non-finite gradient");
  const std::size_t d = g.size();
  const double gnorm = norm(g);

  if (M == 0.0) {
    if (gnorm == 0.0) return finish(h_reg, g, M, Vector(d, 0.0), 0);
    return finish(h_reg, g, M, scaled(-1.0, solve_spd(h_reg, g)), 0);
  }

  const EigDecomposition eig = sym_eig(h_reg);
  const Vector c = eig.rotate(g);
  const Vector& lam = eig.eigenvalues;
  const double lam_min = lam.front();
  if (gnorm == 0.0 && lam_min >= 0.0) return finish(h_reg, g, M, Vector(d, 0.0), 0);

  const double rho_lo = std::max(0.0, -2.0 * lam_min / M);
  auto secular = [&](double rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double den = lam[i] + 0.5 * M * rho;
      if (c[i] == 0.0) continue;
      if (den <= 0.0) return std::numeric_limits<double>::infinity();
      s += (c[i] / den) * (c[i] / den);
    }
    return s - rho * rho;
  };
  auto step_for = [&](double rho) {
    Vector y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (c[i] != 0.0) y[i] = -c[i] / (lam[i] + 0.5 * M * rho);
    }
    return y;
  };

  // Hard case: g has no component along the bottom eigenspace and the secular
  // function is already nonpositive at its pole.
  if (rho_lo > 0.0 && secular(rho_lo) <= 0.0) {
    Vector y(d, 0.0);
    const double tiny = 1e-14 * std::max(1.0, std::abs(lam_min));
    for (std::size_t i = 0; i < d; ++i) {
      const double den = lam[i] - lam_min;
      if (c[i] != 0.0 && den > tiny) y[i] = -c[i] / den;
    }
    const double tau = std::sqrt(std::max(0.0, rho_lo * rho_lo - squared_norm(y)));
    y[0] += tau;
    return finish(h_reg, g, M, eig.unrotate(y), 0);
  }

  double rho_max = lam_min > 0.0 ? 2.0 * (gnorm / lam_min + std::sqrt(2.0 * gnorm / M))
                                 : rho_lo + 2.0 * std::sqrt(2.0 * gnorm / M);
  if (!(secular(rho_max) <= 0.0)) {
    throw NumericalError("cubic subproblem: no root bracketed below rho_max = " +
                         std::to_string(rho_max));
  }

  double lo = rho_lo, hi = rho_max;
  int it = 0;
  constexpr int kMaxBisections = 200;
  for (; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * (1.0 + mid)) break;
    (secular(mid) > 0.0 ? lo : hi) = mid;
  }
  // Newton polish on 1/||y(rho)|| - 1/rho, which is nearly linear in rho.
  double rho = 0.5 * (lo + hi);
  for (int k = 0; k < 5; ++k) {
    const Vector y = step_for(rho);
    const double ny = norm(y);
    if (ny == 0.0) break;
    double dny = 0.0;  // d||y||/drho
    for (std::size_t i = 0; i < d; ++i) {
      if (c[i] == 0.0) continue;
      const double den = lam[i] + 0.5 * M * rho;
      dny += -0.5 * M * (c[i] * c[i]) / (den * den * den);
    }
    dny /= ny;
    const double f = 1.0 / ny - 1.0 / rho;
    const double df = -dny / (ny * ny) + 1.0 / (rho * rho);
    if (!(df != 0.0) || !std::isfinite(f / df)) break;
    const double next = rho - f / df;
    if (!(next > rho_lo && next <= rho_max)) break;
    rho = next;
  }
  return finish(h_reg, g, M, eig.unrotate(step_for(rho)), it);
}

}  // namespace dnl
