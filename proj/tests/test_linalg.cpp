#include <doctest.h>

#include <cmath>

#include "dnl/error.hpp"
#include "dnl/linalg.hpp"
#include "helpers.hpp"

using namespace dnl;

namespace {

SymMatrix reconstruct(const EigDecomposition& e) {
  const std::size_t d = e.dim;
  SymMatrix r(d);
  for (std::size_t k = 0; k < d; ++k) r.add_rank1(e.eigenvalues[k], e.eigenvector(k));
  return r;
}

double orthonormality_error(const EigDecomposition& e) {
  double s = 0.0;
  for (std::size_t a = 0; a < e.dim; ++a) {
    for (std::size_t b = 0; b < e.dim; ++b) {
      const double t = dot(e.eigenvector(a), e.eigenvector(b)) - (a == b ? 1.0 : 0.0);
      s += t * t;
    }
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("sym_eig on the identity") {
  const auto e = sym_eig(SymMatrix::identity(3));
  for (double v : e.eigenvalues) CHECK(v == doctest::Approx(1.0));
  CHECK(orthonormality_error(e) <= 1e-10);
}

TEST_CASE("sym_eig on a 2x2 with characteristic polynomial l^2 - 4l + 3") {
  SymMatrix a(2);
  a.set(0, 0, 2);
  a.set(1, 1, 2);
  a.set(0, 1, 1);
  const auto e = sym_eig(a);
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("sym_eig sorts eigenvalues of a diagonal matrix") {
  const Vector diag{5.0, -2.0, 0.0};
  const auto e = sym_eig(SymMatrix::diagonal(diag));
  CHECK(e.eigenvalues[0] == -2.0);
  CHECK(std::abs(e.eigenvalues[1]) < 1e-15);
  CHECK(e.eigenvalues[2] == 5.0);
}

TEST_CASE("sym_eig rejects non-finite entries") {
  SymMatrix a = SymMatrix::identity(2);
  a.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(sym_eig(a), InputError);
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::size_t d = 1 + seed % 50;
    const SymMatrix a = testing::random_symmetric(d, seed);
    const auto e = sym_eig(a);
    CHECK((reconstruct(e) - a).frobenius_norm() <= 1e-10 * a.frobenius_norm());
    CHECK(orthonormality_error(e) <= 1e-10);
    for (std::size_t k = 1; k < d; ++k) CHECK(e.eigenvalues[k - 1] <= e.eigenvalues[k]);
  }
}

TEST_CASE("rotate and unrotate are inverse") {
  const auto e = sym_eig(testing::random_symmetric(7, 3));
  const Vector x = testing::random_vector(7, 4);
  CHECK(testing::max_abs_diff(e.unrotate(e.rotate(x)), x) < 1e-13);
}

TEST_CASE("solve_spd examples") {
  const Vector b{1.5, -2.0, 3.0};
  CHECK(solve_spd(SymMatrix::identity(3), b) == b);

  const Vector diag{4.0, 9.0};
  const Vector x = solve_spd(SymMatrix::diagonal(diag), Vector{8.0, 27.0});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));

  SymMatrix a(2);
  a.set(0, 0, 2);
  a.set(1, 1, 2);
  a.set(0, 1, 1);
  const Vector y = solve_spd(a, Vector{3.0, 3.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("solve_spd names the failing pivot") {
  SymMatrix a = SymMatrix::identity(3);
  a.set(2, 2, -1.0);
  try {
    solve_spd(a, Vector{1, 1, 1});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("solve_spd recovers x for random SPD systems up to condition 1e8") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t d = 2 + seed % 20;
    const auto e = sym_eig(testing::random_symmetric(d, seed + 100));
    // Eigenvalues spread log-uniformly over [1, 1e8].
    SymMatrix a(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double lam = std::pow(10.0, 8.0 * static_cast<double>(k) / static_cast<double>(d - 1));
      a.add_rank1(lam, e.eigenvector(k));
    }
    const Vector x = testing::random_vector(d, seed);
    const Vector b = a.multiply(x);
    const Vector got = solve_spd(a, b);
    CHECK(norm(subtract(got, x)) <= 1e-8 * norm(x));
    CHECK(norm(subtract(a.multiply(got), b)) <= 1e-8 * (a.frobenius_norm() * norm(got) + norm(b)));
  }
}

TEST_CASE("rank1_accumulate examples") {
  const Vector e1{1.0, 0.0};
  const SymMatrix r = rank1_accumulate(SymMatrix(2), 1.0, e1);
  CHECK(r(0, 0) == 1.0);
  CHECK(r(0, 1) == 0.0);
  CHECK(r(1, 1) == 0.0);

  const SymMatrix s = rank1_accumulate(SymMatrix::identity(2), -1.0, Vector{1.0, 1.0});
  CHECK(s(0, 0) == 0.0);
  CHECK(s(1, 1) == 0.0);
  CHECK(s(0, 1) == -1.0);
  CHECK(s(1, 0) == -1.0);

  const SymMatrix a = testing::random_symmetric(4, 9);
  CHECK(rank1_accumulate(a, 0.0, testing::random_vector(4, 1)) == a);
  CHECK_THROWS_AS(rank1_accumulate(a, 1.0, Vector{1.0}), InputError);
}

TEST_CASE("rank1_accumulate keeps exact symmetry") {
  SymMatrix a = testing::random_symmetric(9, 5);
  for (std::uint64_t k = 0; k < 50; ++k) {
    a = rank1_accumulate(a, 0.37 * static_cast<double>(k) - 3.0, testing::random_vector(9, k));
  }
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) CHECK(a(i, j) == a(j, i));
  }
}

TEST_CASE("SymMatrix setters keep symmetry") {
  SymMatrix a(3);
  a.set(2, 0, 4.0);
  CHECK(a(0, 2) == 4.0);
  std::vector<double> full{1, 2, 3, 9, 4, 5, 9, 9, 6};
  const SymMatrix u = SymMatrix::from_upper(3, full);
  CHECK(u(1, 0) == 2.0);
  CHECK(u(2, 1) == 5.0);
}

TEST_CASE("min_eigenvalue") {
  const Vector diag{3.0, -0.5, 2.0};
  CHECK(min_eigenvalue(SymMatrix::diagonal(diag)) == doctest::Approx(-0.5));
}
