#pragma once

#include <span>

#include "dnl/linalg.hpp"

namespace dnl {

struct CubicSolution {
  Vector step;
  double radius = 0.0;    // ||step||
  double residual = 0.0;  // ||g + H s + (M/2)||s|| s||
  int iterations = 0;
};

/// Global minimizer of  <g, s> + 1/2 <H s, s> + (M/6) ||s||^3.
///
/// Works in the eigenbasis of H: the minimizer satisfies
/// s = -(H + (M rho / 2) I)^{-1} g with rho = ||s||, so rho is the root of the
/// decreasing secular function sum_i c_i^2 / (l_i + M rho / 2)^2 - rho^2,
/// bracketed and bisected, then polished by a few Newton steps. M = 0
/// degenerates to a Cholesky solve and requires H positive definite.
///
/// Throws NumericalError when no root can be bracketed or the optimality
/// residual stays above 1e-9 (||g|| + 1).
CubicSolution solve_cubic_model(const SymMatrix& h_reg, std::span<const double> g, double M);

/// Value of the cubic model at s.
double cubic_model_value(const SymMatrix& h_reg, std::span<const double> g, double M,
                         std::span<const double> s);

}  // namespace dnl
