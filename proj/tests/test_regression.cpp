#include <doctest.h>

#include <random>
#include <sstream>

#include "stocknet/errors.hpp"
#include "stocknet/numerics.hpp"
#include "stocknet/regression.hpp"
#include "stocknet/synth.hpp"
#include "support.hpp"

using namespace stocknet;

namespace {

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Two-factor OLS by Cramer's rule on the uncentred normal equations.
std::array<double, 3> cramer_fit(const Matrix& f, const std::vector<double>& y) {
  double a[3][3] = {}, b[3] = {};
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double x[3] = {1.0, f(t, 0), f(t, 1)};
    for (int r = 0; r < 3; ++r) {
      b[r] += x[r] * y[t];
      for (int c = 0; c < 3; ++c) a[r][c] += x[r] * x[c];
    }
  }
  const double d = det3(a);
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] = c == k ? b[r] : a[r][c];
    out[k] = det3(m) / d;
  }
  return out;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_SUITE("regression") {
  TEST_CASE("noiseless single factor") {
    const Matrix f{{-1}, {0.5}, {2}, {3}, {-4}};
    std::vector<double> y;
    for (std::size_t t = 0; t < 5; ++t) y.push_back(2.0 + 3.0 * f(t, 0));
    const auto fit = fit_multifactor(y, f, "X");
    CHECK(fit.ticker == "X");
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.betas[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("series orthogonal to the factors has zero R²") {
    std::mt19937_64 rng(41);
    const Matrix f = testing::random_matrix(60, 2, rng);
    auto y = random_vector(60, rng);
    // Project out [1 | F] by Gram–Schmidt.
    std::vector<std::vector<double>> basis{std::vector<double>(60, 1.0), f.column(0), f.column(1)};
    for (std::size_t b = 0; b < basis.size(); ++b) {
      for (std::size_t p = 0; p < b; ++p) {
        const double c = std::inner_product(basis[b].begin(), basis[b].end(), basis[p].begin(), 0.0);
        for (std::size_t t = 0; t < 60; ++t) basis[b][t] -= c * basis[p][t];
      }
      const double nn = std::sqrt(std::inner_product(basis[b].begin(), basis[b].end(), basis[b].begin(), 0.0));
      for (auto& v : basis[b]) v /= nn;
    }
    for (const auto& q : basis) {
      const double c = std::inner_product(y.begin(), y.end(), q.begin(), 0.0);
      for (std::size_t t = 0; t < 60; ++t) y[t] -= c * q[t];
    }
    CHECK(fit_multifactor(y, f).r_squared <= 1e-12);
  }

  TEST_CASE("five-observation two-factor example") {
    const Matrix f{{1, 2}, {2, 1}, {3, 0}, {4, 1}, {5, 3}};
    const std::vector<double> y{1, 3, 2, 5, 4};
    const auto fit = fit_multifactor(y, f);
    CHECK(fit.alpha == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.betas[0] == doctest::Approx(0.825).epsilon(1e-12));
    CHECK(fit.betas[1] == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(0.6475).epsilon(1e-12));

    const auto oracle = cramer_fit(f, y);
    CHECK(oracle[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(oracle[1] == doctest::Approx(0.825).epsilon(1e-12));
    CHECK(oracle[2] == doctest::Approx(-0.125).epsilon(1e-12));
  }

  TEST_CASE("property: agreement with Cramer's rule on random problems") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 50; ++rep) {
      const Matrix f = testing::random_matrix(25, 2, rng);
      const auto y = random_vector(25, rng);
      const auto fit = fit_multifactor(y, f);
      const auto oracle = cramer_fit(f, y);
      CHECK(std::abs(fit.alpha - oracle[0]) <= 1e-10);
      CHECK(std::abs(fit.betas[0] - oracle[1]) <= 1e-10);
      CHECK(std::abs(fit.betas[1] - oracle[2]) <= 1e-10);
    }
  }

  TEST_CASE("error cases") {
    const Matrix f{{1, 2}, {2, 1}, {3, 0}};
    const std::vector<double> y{1, 2, 4};
    CHECK_THROWS_WITH_AS(fit_multifactor(y, f), doctest::Contains("insufficient observations"),
                         InputError);
    const Matrix dup{{1, 1}, {2, 2}, {3, 3}, {5, 5}, {4, 4}};
    const std::vector<double> y5{1, 3, 2, 5, 4};
    CHECK_THROWS_WITH_AS(fit_multifactor(y5, dup), doctest::Contains("collinear factors"),
                         NumericalError);
    const Matrix constant{{1}, {1}, {1}, {1}};
    CHECK_THROWS_AS(fit_multifactor(std::vector<double>{1, 2, 3, 4}, constant), NumericalError);
    CHECK_THROWS_WITH_AS(fit_multifactor(std::vector<double>(5, 2.0), Matrix{{1}, {2}, {3}, {4}, {6}}),
                         doctest::Contains("zero-variance"), InputError);
    CHECK_THROWS_AS(fit_multifactor(y, Matrix{{1}, {2}}), InputError);
  }

  TEST_CASE("property: invariances of the fit") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int rep = 0; rep < 30; ++rep) {
      const Matrix f = testing::random_matrix(80, 3, rng);
      const auto y = random_vector(80, rng);
      const auto base = fit_multifactor(y, f);

      // Affine rescaling of the response.
      const double a = u(rng) + (u(rng) > 0 ? 4.0 : -4.0), b = u(rng);
      std::vector<double> y2(y);
      for (auto& v : y2) v = a * v + b;
      const auto scaled = fit_multifactor(y2, f);
      CHECK(std::abs(scaled.r_squared - base.r_squared) <= 1e-10);
      CHECK(std::abs(scaled.alpha - (a * base.alpha + b)) <= 1e-9);
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(scaled.betas[k] - a * base.betas[k]) <= 1e-9);

      // Any invertible recombination of the factors spans the same space.
      Matrix mix = testing::random_matrix(3, 3, rng);
      for (std::size_t i = 0; i < 3; ++i) mix(i, i) += 4.0;
      const auto mixed = fit_multifactor(y, f * mix);
      CHECK(std::abs(mixed.r_squared - base.r_squared) <= 1e-10);
      for (std::size_t t = 0; t < 80; ++t) CHECK(std::abs(mixed.residuals[t] - base.residuals[t]) <= 1e-10);

      // Adding factors never lowers R².
      double prev = 0.0;
      for (std::size_t k = 1; k <= 3; ++k) {
        const double r2 = fit_multifactor(y, f.leading_columns(k)).r_squared;
        CHECK(r2 >= prev - 1e-12);
        prev = r2;
      }

      // Residuals are orthogonal to every factor and average zero.
      for (std::size_t k = 0; k < 3; ++k) {
        double dot = 0.0;
        for (std::size_t t = 0; t < 80; ++t) dot += base.residuals[t] * f(t, k);
        CHECK(std::abs(dot) <= 1e-8);
      }
      CHECK(std::abs(mean(base.residuals)) <= 1e-12);
      CHECK(base.r_squared >= 0.0);
      CHECK(base.r_squared <= 1.0);
    }
  }

  TEST_CASE("fit_panel") {
    std::mt19937_64 rng(44);
    const Matrix f = testing::random_matrix(40, 2, rng);
    Matrix r(40, 3);
    r.set_column(0, f.column(0));
    r.set_column(1, f.column(1));
    r.set_column(2, random_vector(40, rng));
    const auto fits = fit_panel(testing::make_panel(r), f);
    REQUIRE(fits.size() == 3);
    CHECK(fits[0].ticker == "T0");
    CHECK(fits[0].r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fits[1].r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fits[2].r_squared < 0.5);
    CHECK_THROWS_AS(fit_panel(testing::make_panel(r), f.transpose()), InputError);

    Matrix bad_f(40, 2);
    bad_f.set_column(0, f.column(0));
    bad_f.set_column(1, f.column(0));
    CHECK_THROWS_WITH_AS(fit_panel(testing::make_panel(r), bad_f), doctest::Contains("ticker 'T0'"),
                         NumericalError);
  }

  TEST_CASE("pure noise explains almost nothing") {
    std::mt19937_64 rng(45);
    const Matrix f = testing::random_matrix(5000, 3, rng);
    const Matrix r = testing::random_matrix(5000, 20, rng);
    const auto fits = fit_panel(testing::make_panel(r), f);
    double total = 0.0;
    for (const auto& fit : fits) total += fit.r_squared;
    CHECK(total / fits.size() < 0.01);
    const auto resid = mean_abs_residual_correlation(fits);
    REQUIRE(resid);
    CHECK(*resid < 0.05);
  }

  TEST_CASE("R² ranks stocks by loading strength") {
    SynthSpec spec;
    spec.n_stocks = 50;
    spec.k_factors = 1;
    spec.seed = 46;
    const auto market = generate(spec);
    const auto fits = fit_panel(market.returns, market.true_scores);
    std::vector<double> r2;
    for (const auto& fit : fits) r2.push_back(fit.r_squared);
    CHECK(testing::spearman(r2, market.loading_scale) > 0.9);
  }

  TEST_CASE("regression file round trip") {
    RegressionResult a{"AAA", 0.25, {1.5, -2e-5}, 0.4321, {}};
    RegressionResult b{"BBB", -1.0, {0.0, 3.0}, 1.0, {}};
    std::stringstream buf;
    write_regression(buf, {a, b});
    CHECK(buf.str().substr(0, buf.str().find('\n')) == "ticker,alpha,beta_1,beta_2,r_squared_percent");
    const auto back = read_regression(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].ticker == "AAA");
    CHECK(back[0].betas == a.betas);
    CHECK(back[0].r_squared == doctest::Approx(0.4321).epsilon(1e-12));
    CHECK(back[1].alpha == -1.0);
    std::istringstream bad("ticker,alpha,beta_1,r_squared_percent\nX,1,2,150\n");
    CHECK_THROWS_AS(read_regression(bad), ParseError);
  }
}
