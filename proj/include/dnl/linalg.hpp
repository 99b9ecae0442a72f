#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dnl {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_norm(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double alpha, std::span<const double> a);
bool all_finite(std::span<const double> a);

/// Dense symmetric matrix stored as a full row-major array.
///
/// Every mutator writes both (i, j) and (j, i), so the stored array is
/// exactly symmetric at all times.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  /// Builds from a full row-major d*d array; the upper triangle wins.
  static SymMatrix from_upper(std::size_t dim, std::span<const double> full);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v);
  std::span<const double> data() const noexcept { return a_; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * dim_, dim_}; }

  void add_diagonal(double c);
  /// this += c * v v^T
  void add_rank1(double c, std::span<const double> v);
  /// this += c * other
  void add_scaled(double c, const SymMatrix& other);
  void scale(double c);

  Vector multiply(std::span<const double> x) const;
  double frobenius_norm() const;
  bool is_finite() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

/// A = U^T diag(eigenvalues) U, eigenvalues ascending, rows of U are the
/// corresponding unit eigenvectors.
struct EigDecomposition {
  Vector eigenvalues;
  std::size_t dim = 0;
  std::vector<double> vectors;  // row-major dim x dim

  std::span<const double> eigenvector(std::size_t k) const {
    return {vectors.data() + k * dim, dim};
  }
  /// U x
  Vector rotate(std::span<const double> x) const;
  /// U^T y
  Vector unrotate(std::span<const double> y) const;
};

/// Cyclic Jacobi. Sweeps until the off-diagonal Frobenius norm drops below
/// 1e-12 * ||A||_F (at most 50 sweeps). Throws InputError on non-finite input.
EigDecomposition sym_eig(const SymMatrix& a);

double min_eigenvalue(const SymMatrix& a);

/// Lower Cholesky factor, row-major. Throws SingularityError when a pivot is
/// at or below 1e-12 * max diagonal.
class Cholesky {
 public:
  explicit Cholesky(const SymMatrix& a);
  Vector solve(std::span<const double> b) const;
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
  std::vector<double> l_;
};

Vector solve_spd(const SymMatrix& a, std::span<const double> b);

/// Returns a + c * v v^T.
SymMatrix rank1_accumulate(const SymMatrix& a, double c, std::span<const double> v);

}  // namespace dnl
