#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"
#include "support.hpp"

using namespace stocknet;

namespace {

void check_decomposition(const Matrix& a, const EigenDecomposition& eig) {
  const std::size_t n = a.rows();
  const double norm = a.max_abs();
  Matrix lambda(n, n);
  for (std::size_t k = 0; k < n; ++k) lambda(k, k) = eig.eigenvalues[k];
  const Matrix& v = eig.eigenvectors;
  CHECK((v * lambda * v.transpose() - a).max_abs() <= 1e-8 * norm);
  CHECK((transpose_times(v, v) - Matrix::identity(n)).max_abs() <= 1e-8);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(std::is_sorted(eig.eigenvalues.rbegin(), eig.eigenvalues.rend()));
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < n; ++j) av += a(i, j) * v(j, k);
      residual = std::max(residual, std::abs(av - eig.eigenvalues[k] * v(i, k)));
    }
    CHECK(residual <= 1e-8 * norm);
  }
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("eigh of the identity") {
    const auto eig = eigh(Matrix::identity(3));
    CHECK(eig.eigenvalues == std::vector<double>{1, 1, 1});
    CHECK(eig.eigenvectors == Matrix::identity(3));
  }

  TEST_CASE("eigh of a diagonal matrix returns axis vectors") {
    const auto eig = eigh(Matrix{{2, 0}, {0, 1}});
    CHECK(eig.eigenvalues == std::vector<double>{2, 1});
    CHECK(eig.eigenvectors == Matrix::identity(2));

    const auto swapped = eigh(Matrix{{1, 0}, {0, 2}});
    CHECK(swapped.eigenvalues == std::vector<double>{2, 1});
    CHECK(swapped.eigenvectors == Matrix{{0, 1}, {1, 0}});
  }

  TEST_CASE("eigh reconstructs random symmetric matrices") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 6u, 17u, 40u}) {
      CAPTURE(n);
      const Matrix a = testing::random_symmetric(n, rng);
      check_decomposition(a, eigh(a));
    }
  }

  TEST_CASE("eigh agrees with Eigen's self-adjoint solver") {
    std::mt19937_64 rng(12);
    const std::size_t n = 12;
    const Matrix a = testing::random_symmetric(n, rng);
    Eigen::MatrixXd e(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(e);
    const auto eig = eigh(a);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(eig.eigenvalues[k] == doctest::Approx(oracle.eigenvalues()(n - 1 - k)).epsilon(1e-10));
  }

  TEST_CASE("eigenvalue sum equals trace and product equals determinant") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t n = 2 + rep % 4;
      const Matrix a = testing::random_symmetric(n, rng);
      const auto eig = eigh(a);
      double trace = 0.0, sum = 0.0, prod = 1.0;
      Eigen::MatrixXd e(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        trace += a(i, i);
        for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
      }
      for (double l : eig.eigenvalues) {
        sum += l;
        prod *= l;
      }
      CHECK(std::abs(sum - trace) <= 1e-8);
      const double det = e.determinant();
      CHECK(std::abs(prod - det) <= 1e-6 * std::max(1.0, std::abs(det)));
    }
  }

  TEST_CASE("correlation-matrix spectra sum to N") {
    std::mt19937_64 rng(14);
    const Matrix x = testing::random_matrix(60, 8, rng);
    const Matrix z = standardize_columns(x);
    Matrix c = transpose_times(z, z) * (1.0 / 60.0);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) c(j, i) = c(i, j);
    const auto eig = eigh(c);
    CHECK(std::accumulate(eig.eigenvalues.begin(), eig.eigenvalues.end(), 0.0) ==
          doctest::Approx(8.0).epsilon(1e-10));
  }

  TEST_CASE("eigenvector sign convention: largest-magnitude entry non-negative") {
    std::mt19937_64 rng(15);
    const Matrix a = testing::random_symmetric(9, rng);
    const auto eig = eigh(a);
    for (std::size_t k = 0; k < 9; ++k) {
      const auto col = eig.eigenvectors.column(k);
      const auto it = std::max_element(col.begin(), col.end(),
                                        [](double x, double y) { return std::abs(x) < std::abs(y); });
      CHECK(*it >= 0.0);
    }
    // determinism
    CHECK(eigh(a).eigenvectors == eig.eigenvectors);
  }

  TEST_CASE("eigh rejects non-symmetric input and reports non-convergence") {
    CHECK_THROWS_AS(eigh(Matrix{{1, 2}, {0, 1}}), InputError);
    CHECK_THROWS_AS(eigh(Matrix(2, 3)), InputError);
    std::mt19937_64 rng(16);
    const Matrix a = testing::random_symmetric(10, rng);
    CHECK_THROWS_WITH_AS(eigh(a, JacobiOptions{1e-12, 1}),
                         doctest::Contains("off-diagonal residual"), NumericalError);
  }

  TEST_CASE("solve_spd") {
    const Matrix b{{1, 2}, {3, 4}, {5, 6}};
    CHECK(solve_spd(Matrix::identity(3), b) == b);
    const Matrix x = solve_spd(Matrix{{4, 0}, {0, 9}}, Matrix{{8}, {27}});
    CHECK(x(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(x(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(solve_spd(Matrix{{1, 2}, {2, 1}}, Matrix{{1}, {1}}),
                         doctest::Contains("not positive definite"), NumericalError);
    CHECK_THROWS_AS(solve_spd(Matrix{{1, 1}, {1, 1}}, Matrix{{1}, {1}}), NumericalError);
  }

  TEST_CASE("solve_spd residual on random SPD systems") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix g = testing::random_matrix(8, 8, rng);
      const Matrix a = transpose_times(g, g) + Matrix::identity(8);
      const Matrix b = testing::random_matrix(8, 3, rng);
      const Matrix x = solve_spd(a, b);
      CHECK((a * x - b).max_abs() <= 1e-8 * (a.max_abs() * x.max_abs() + b.max_abs()));
    }
  }

  TEST_CASE("solve_spd agrees with the explicit inverse for small systems") {
    std::mt19937_64 rng(18);
    for (std::size_t n = 1; n <= 5; ++n) {
      const Matrix g = testing::random_matrix(n, n, rng);
      const Matrix a = transpose_times(g, g) + Matrix::identity(n);
      const Matrix b = testing::random_matrix(n, 1, rng);
      Eigen::MatrixXd ea(n, n);
      Eigen::VectorXd eb(n);
      for (std::size_t i = 0; i < n; ++i) {
        eb(i) = b(i, 0);
        for (std::size_t j = 0; j < n; ++j) ea(i, j) = a(i, j);
      }
      const Eigen::VectorXd expected = ea.inverse() * eb;
      const Matrix x = solve_spd(a, b);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x(i, 0) - expected(i)) <= 1e-8);
    }
  }

  TEST_CASE("standardize_columns") {
    const Matrix z = standardize_columns(Matrix{{1}, {2}, {3}});
    CHECK(std::abs(mean(z.column(0))) <= 1e-12);
    CHECK(std::sqrt(population_variance(z.column(0))) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((standardize_columns(z) - z).max_abs() <= 1e-10);
    CHECK_THROWS_AS(standardize_columns(Matrix{{1, 2}, {1, 3}}), InputError);
  }

  TEST_CASE("standardized columns reproduce the literal correlation formula") {
    std::mt19937_64 rng(19);
    const Matrix x = testing::random_matrix(50, 5, rng);
    const Matrix z = standardize_columns(x);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(std::abs(mean(z.column(i))) <= 1e-12);
      CHECK(std::abs(std::sqrt(population_variance(z.column(i))) - 1.0) <= 1e-10);
      for (std::size_t j = 0; j < 5; ++j) {
        double zz = 0.0;
        for (std::size_t t = 0; t < 50; ++t) zz += z(t, i) * z(t, j);
        CHECK(zz / 50.0 == doctest::Approx(testing::eq1a_correlation(x.column(i), x.column(j)))
                               .epsilon(1e-10));
      }
    }
  }

  TEST_CASE("mean is exact on constant series") {
    const std::vector<double> v(7, 0.1 + 0.2);
    CHECK(mean(v) == v.front());
    CHECK(population_variance(v) == 0.0);
  }
}
