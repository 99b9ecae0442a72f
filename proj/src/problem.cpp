#include "dnl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dnl/error.hpp"

namespace dnl {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Accumulates c * v v^T into the upper triangle of a row-major d x d array.
void accumulate_upper(std::vector<double>& acc, std::size_t d, double c,
                      std::span<const double> v) {
  if (c == 0.0) return;
  for (std::size_t r = 0; r < d; ++r) {
    const double cv = c * v[r];
    if (cv == 0.0) continue;
    double* row = acc.data() + r * d;
    for (std::size_t s = r; s < d; ++s) row[s] += cv * v[s];
  }
}

}  // namespace

std::string_view to_string(LossKind kind) {
  return kind == LossKind::kLogistic ? "logistic" : "squared";
}

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "squared") return LossKind::kSquared;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected logistic or squared)");
}

double LossModel::phi(double t, int b) const {
  if (kind == LossKind::kLogistic) return softplus(-b * t);
  const double r = t - b;
  return 0.5 * r * r;
}

double LossModel::dphi(double t, int b) const {
  if (kind == LossKind::kLogistic) return -b * sigmoid(-b * t);
  return t - b;
}

double LossModel::ddphi(double t, int /*b*/) const {
  if (kind == LossKind::kLogistic) return sigmoid(t) * sigmoid(-t);
  return 1.0;
}

double LossModel::gamma() const { return kind == LossKind::kLogistic ? 0.25 : 1.0; }

double LossModel::nu() const {
  // max_t |s(1-s)(1-2s)| for the logistic sigmoid s, attained at s = 1/2 +- 1/(2 sqrt 3).
  return kind == LossKind::kLogistic ? 1.0 / (6.0 * std::sqrt(3.0)) : 0.0;
}

Problem::Problem(const Dataset& ds, const Partition& part, LossModel loss, double lambda)
    : n_(part.n), m_(part.m), d_(ds.dim()), loss_(loss), lambda_(lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("Problem: lambda must be finite and nonnegative");
  }
  if (n_ == 0 || m_ == 0 || part.shards.size() != n_) {
    throw InputError("Problem: partition has no points");
  }
  rows_.resize(n_ * m_ * d_);
  labels_.resize(n_ * m_);
  norms_.resize(n_ * m_);
  std::vector<bool> used(ds.size(), false);
  for (std::size_t i = 0; i < n_; ++i) {
    if (part.shards[i].size() != m_) throw InputError("Problem: shard size differs from m");
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t k = part.shards[i][j];
      if (k >= ds.size() || used[k]) throw InputError("Problem: partition inconsistent with dataset");
      used[k] = true;
      const auto a = ds.point(k);
      std::copy(a.begin(), a.end(), rows_.begin() + static_cast<std::ptrdiff_t>((i * m_ + j) * d_));
      labels_[i * m_ + j] = ds.label(k);
      norms_[i * m_ + j] = norm(a);
    }
  }
  std::vector<double> acc(d_ * d_, 0.0);
  const double w = 1.0 / static_cast<double>(n_ * m_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) accumulate_upper(acc, d_, w, point(i, j));
  }
  gram_ = SymMatrix::from_upper(d_, acc);
}

Vector Problem::h_coeffs(std::size_t i, std::span<const double> x) const {
  Vector h(m_);
  for (std::size_t j = 0; j < m_; ++j) h[j] = loss_.ddphi(dot(point(i, j), x), label(i, j));
  return h;
}

Vector Problem::local_grad(std::size_t i, std::span<const double> x) const {
  Vector g(d_, 0.0);
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    const auto a = point(i, j);
    const double c = loss_.dphi(dot(a, x), label(i, j)) * inv_m;
    if (c != 0.0) axpy(c, a, g);
  }
  return g;
}

double Problem::local_value(std::size_t i, std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < m_; ++j) s += loss_.phi(dot(point(i, j), x), label(i, j));
  return s / static_cast<double>(m_);
}

Vector Problem::grad_P(std::span<const double> x) const {
  Vector g(d_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) axpy(1.0, local_grad(i, x), g);
  for (std::size_t k = 0; k < d_; ++k) g[k] = g[k] / static_cast<double>(n_) + lambda_ * x[k];
  return g;
}

double Problem::value_P(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += local_value(i, x);
  return s / static_cast<double>(n_) + 0.5 * lambda_ * squared_norm(x);
}

SymMatrix Problem::hessian_P(std::span<const double> x) const {
  std::vector<Vector> h(n_);
  for (std::size_t i = 0; i < n_; ++i) h[i] = h_coeffs(i, x);
  SymMatrix H = weighted_gram(h);
  H.add_diagonal(lambda_);
  return H;
}

SymMatrix Problem::weighted_gram(const std::vector<Vector>& coeffs) const {
  if (coeffs.size() != n_) throw InputError("weighted_gram: expected one vector per worker");
  std::vector<double> acc(d_ * d_, 0.0);
  const double w = 1.0 / static_cast<double>(n_ * m_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (coeffs[i].size() != m_) throw InputError("weighted_gram: coefficient vector length != m");
    for (std::size_t j = 0; j < m_; ++j) accumulate_upper(acc, d_, w * coeffs[i][j], point(i, j));
  }
  return SymMatrix::from_upper(d_, acc);
}

SymMatrix Problem::local_weighted_gram(std::size_t i, std::span<const double> coeffs) const {
  if (coeffs.size() != m_) throw InputError("local_weighted_gram: coefficient vector length != m");
  std::vector<double> acc(d_ * d_, 0.0);
  const double w = 1.0 / static_cast<double>(m_);
  for (std::size_t j = 0; j < m_; ++j) accumulate_upper(acc, d_, w * coeffs[j], point(i, j));
  return SymMatrix::from_upper(d_, acc);
}

ProblemConstants Problem::constants() const {
  ProblemConstants c;
  c.gamma = loss_.gamma();
  c.nu = loss_.nu();
  c.R = *std::max_element(norms_.begin(), norms_.end());
  c.M = c.nu * c.R * c.R * c.R;
  return c;
}

double Problem::mean_cubed_norm() const {
  double s = 0.0;
  for (double r : norms_) s += r * r * r;
  return s / static_cast<double>(norms_.size());
}

}  // namespace dnl
