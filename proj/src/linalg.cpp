#include "dnl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dnl/error.hpp"

namespace dnl {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "add");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "subtract");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scaled(double alpha, std::span<const double> a) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i];
  return r;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {
  if (dim == 0) throw InputError("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  m.add_diagonal(1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * m.dim_ + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::from_upper(std::size_t dim, std::span<const double> full) {
  if (full.size() != dim * dim) throw InputError("SymMatrix::from_upper: expected dim*dim entries");
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) m.set(i, j, full[i * dim + j]);
  }
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  a_[i * dim_ + j] = v;
  a_[j * dim_ + i] = v;
}

void SymMatrix::add_diagonal(double c) {
  for (std::size_t i = 0; i < dim_; ++i) a_[i * dim_ + i] += c;
}

void SymMatrix::add_rank1(double c, std::span<const double> v) {
  require_same_size(v.size(), dim_, "rank1 update");
  if (c == 0.0) return;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double cvi = c * v[i];
    if (cvi == 0.0) continue;
    for (std::size_t j = i; j < dim_; ++j) {
      if (v[j] == 0.0) continue;
      const double updated = a_[i * dim_ + j] + cvi * v[j];
      a_[i * dim_ + j] = updated;
      a_[j * dim_ + i] = updated;
    }
  }
}

void SymMatrix::add_scaled(double c, const SymMatrix& other) {
  require_same_size(other.dim_, dim_, "add_scaled");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += c * other.a_[k];
}

void SymMatrix::scale(double c) {
  for (double& v : a_) v *= c;
}

Vector SymMatrix::multiply(std::span<const double> x) const {
  require_same_size(x.size(), dim_, "matvec");
  Vector y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = dot(row(i), x);
  return y;
}

double SymMatrix::frobenius_norm() const { return norm(a_); }

bool SymMatrix::is_finite() const { return all_finite(a_); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix r = a;
  r.add_scaled(1.0, b);
  return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix r = a;
  r.add_scaled(-1.0, b);
  return r;
}

Vector EigDecomposition::rotate(std::span<const double> x) const {
  Vector y(dim);
  for (std::size_t k = 0; k < dim; ++k) y[k] = dot(eigenvector(k), x);
  return y;
}

Vector EigDecomposition::unrotate(std::span<const double> y) const {
  Vector x(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) axpy(y[k], eigenvector(k), x);
  return x;
}

EigDecomposition sym_eig(const SymMatrix& input) {
  if (!input.is_finite()) throw InputError("sym_eig: non-finite matrix entry");
  const std::size_t d = input.dim();
  std::vector<double> a(input.data().begin(), input.data().end());
  // v holds eigenvectors as columns while sweeping.
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const double fro = input.frobenius_norm();
  const double stop = 1e-12 * fro;
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * a[i * d + j] * a[i * d + j];
    }
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 50;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0) continue;
        const double app = a[p * d + p];
        const double aqq = a[q * d + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k * d + p];
          const double akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p * d + k];
          const double aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
        a[p * d + q] = 0.0;
        a[q * d + p] = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * d + x] < a[y * d + y]; });

  EigDecomposition out;
  out.dim = d;
  out.eigenvalues.resize(d);
  out.vectors.resize(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t col = order[k];
    out.eigenvalues[k] = a[col * d + col];
    for (std::size_t i = 0; i < d; ++i) out.vectors[k * d + i] = v[i * d + col];
  }
  return out;
}

double min_eigenvalue(const SymMatrix& a) { return sym_eig(a).eigenvalues.front(); }

Cholesky::Cholesky(const SymMatrix& a) : dim_(a.dim()), l_(a.dim() * a.dim(), 0.0) {
  if (!a.is_finite()) throw InputError("Cholesky: non-finite matrix entry");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = 1e-12 * max_diag;
  for (std::size_t j = 0; j < dim_; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l_[j * dim_ + k] * l_[j * dim_ + k];
    if (!(diag > tol)) throw SingularityError(j, diag);
    const double ljj = std::sqrt(diag);
    l_[j * dim_ + j] = ljj;
    for (std::size_t i = j + 1; i < dim_; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_[i * dim_ + k] * l_[j * dim_ + k];
      l_[i * dim_ + j] = s / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  require_same_size(b.size(), dim_, "Cholesky::solve");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_[i * dim_ + k] * y[k];
    y[i] = s / l_[i * dim_ + i];
  }
  for (std::size_t ii = dim_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < dim_; ++k) s -= l_[k * dim_ + ii] * y[k];
    y[ii] = s / l_[ii * dim_ + ii];
  }
  return y;
}

Vector solve_spd(const SymMatrix& a, std::span<const double> b) { return Cholesky(a).solve(b); }

SymMatrix rank1_accumulate(const SymMatrix& a, double c, std::span<const double> v) {
  SymMatrix r = a;
  r.add_rank1(c, v);
  return r;
}

}  // namespace dnl
