#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "dnl/data.hpp"
#include "dnl/linalg.hpp"

namespace dnl {

enum class LossKind { kLogistic, kSquared };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

/// Scalar GLM loss phi(t, b) with t = a^T x and label b.
struct LossModel {
  LossKind kind = LossKind::kLogistic;

  double phi(double t, int b) const;
  double dphi(double t, int b) const;
  double ddphi(double t, int b) const;
  /// Upper bound on |phi''|.
  double gamma() const;
  /// Lipschitz constant of phi''.
  double nu() const;
};

struct ProblemConstants {
  double gamma = 0.0;
  double nu = 0.0;
  double R = 0.0;  // max row norm
  double M = 0.0;  // nu * R^3, Lipschitz constant of the Hessian
};

/// P(x) = (1/n) sum_i (1/m) sum_j phi(a_ij^T x, b_ij) + (lambda/2) ||x||^2,
/// with the partitioned points copied into contiguous per-worker blocks.
class Problem {
 public:
  Problem(const Dataset& ds, const Partition& part, LossModel loss, double lambda);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t dim() const noexcept { return d_; }
  double lambda() const noexcept { return lambda_; }
  const LossModel& loss() const noexcept { return loss_; }

  std::span<const double> point(std::size_t i, std::size_t j) const {
    return {rows_.data() + (i * m_ + j) * d_, d_};
  }
  int label(std::size_t i, std::size_t j) const { return labels_[i * m_ + j]; }
  double point_norm(std::size_t i, std::size_t j) const { return norms_[i * m_ + j]; }

  /// h_ij(x) = phi''(a_ij^T x, b_ij) for j in [m].
  Vector h_coeffs(std::size_t i, std::span<const double> x) const;
  /// Gradient of f_i (no regularizer).
  Vector local_grad(std::size_t i, std::span<const double> x) const;
  double local_value(std::size_t i, std::span<const double> x) const;
  Vector grad_P(std::span<const double> x) const;
  double value_P(std::span<const double> x) const;
  SymMatrix hessian_P(std::span<const double> x) const;

  /// (1/nm) sum_ij coeffs[i][j] a_ij a_ij^T.
  SymMatrix weighted_gram(const std::vector<Vector>& coeffs) const;
  /// (1/m) sum_j coeffs[j] a_ij a_ij^T for one worker.
  SymMatrix local_weighted_gram(std::size_t i, std::span<const double> coeffs) const;
  /// (1/nm) sum_ij a_ij a_ij^T, computed once.
  const SymMatrix& gram() const noexcept { return gram_; }

  ProblemConstants constants() const;
  /// (1/nm) sum_ij ||a_ij||^3
  double mean_cubed_norm() const;

 private:
  std::size_t n_, m_, d_;
  LossModel loss_;
  double lambda_;
  std::vector<double> rows_;
  std::vector<int> labels_;
  std::vector<double> norms_;
  SymMatrix gram_;
};

}  // namespace dnl
