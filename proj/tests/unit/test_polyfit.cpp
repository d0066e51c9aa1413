#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "jnt/error.hpp"
#include "jnt/polyfit.hpp"
#include "jnt/simulate.hpp"
#include "support.hpp"

using namespace jnt;
using jnt::testing::even_poly;
using jnt::testing::normal_equations_fit;
using jnt::testing::rel_diff;
using jnt::testing::uniform_grid;

namespace {

RatioSpectrum spectrum_of(const std::vector<double>& f, const std::vector<double>& coeffs) {
  RatioSpectrum s;
  s.frequencies = f;
  for (double fj : f) s.ratios.push_back(even_poly(coeffs, fj));
  return s;
}

std::vector<std::vector<double>> even_design(const std::vector<double>& f, int terms, double f0 = 1e6) {
  std::vector<std::vector<double>> x;
  for (double fj : f) {
    std::vector<double> row;
    double p = 1.0;
    const double xx = (fj / f0) * (fj / f0);
    for (int i = 0; i < terms; ++i, p *= xx) row.push_back(p);
    x.push_back(row);
  }
  return x;
}

}  // namespace

TEST(PolyModel, Validation) {
  EXPECT_EQ((PolyModel{8, 1e6}).terms(), 5);
  EXPECT_THROW((PolyModel{3, 1e6}).validate(), ArgumentError);
  EXPECT_THROW((PolyModel{0, 1e6}).validate(), ArgumentError);
  EXPECT_THROW((PolyModel{2, 0.0}).validate(), ArgumentError);
}

TEST(Fit, ConstantSpectrumAnyOrder) {
  const auto f = uniform_grid(40, 900, 1800);
  const auto s = spectrum_of(f, {1.0});
  for (int d = 2; d <= 14; d += 2) {
    const auto r = fit({d, 1e6}, s, f.back());
    EXPECT_NEAR(r.a0(), 1.0, 1e-12) << d;
    for (std::size_t i = 1; i < r.coeffs.size(); ++i) EXPECT_NEAR(r.coeffs[i], 0.0, 1e-6) << d;
    EXPECT_NEAR(r.residual_variance, 0.0, 1e-28);
  }
}

TEST(Fit, ExactQuadraticTenBlocks) {
  const auto f = uniform_grid(10, 1e5, 1e5);
  const auto r = fit({2, 1e6}, spectrum_of(f, {1.0, 0.5}), 1e6);
  EXPECT_EQ(r.n_points, 10u);
  EXPECT_NEAR(r.coeffs[0], 1.0, 1e-12);
  EXPECT_NEAR(r.coeffs[1], 0.5, 1e-12);
  for (double e : residuals(r, spectrum_of(f, {1.0, 0.5}), 1e6)) EXPECT_NEAR(e, 0.0, 1e-14);
}

TEST(Fit, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 1e-4);
  std::uniform_int_distribution<int> order(1, 4);
  std::uniform_int_distribution<int> count(30, 400);
  std::uniform_real_distribution<double> fmax(3e5, 1.0e6);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 * order(rng);
    const std::size_t n = static_cast<std::size_t>(count(rng));
    const auto f = uniform_grid(n, 900, fmax(rng) / static_cast<double>(n));
    auto s = spectrum_of(f, {1.0001, -4.33e-4, 1.66e-3});
    for (auto& v : s.ratios) v += noise(rng);
    std::vector<double> w;
    if (trial % 2) {
      std::uniform_real_distribution<double> wd(0.5, 2.0);
      for (std::size_t j = 0; j < n; ++j) w.push_back(wd(rng));
    }
    const auto r = fit({d, 1e6}, s, f.back(), w);
    const auto o = normal_equations_fit(even_design(f, d / 2 + 1), s.ratios, w);
    EXPECT_LT(rel_diff(r.a0(), static_cast<double>(o.beta[0])), 1e-8) << trial;
    EXPECT_LT(rel_diff(r.coeff_cov(0, 0), static_cast<double>(o.cov[0][0])), 1e-8) << trial;
    for (int i = 1; i < d / 2 + 1; ++i) {
      EXPECT_LT(std::fabs(r.coeffs[i] - static_cast<double>(o.beta[i])),
                1e-8 * std::sqrt(static_cast<double>(o.cov[i][i])) + 1e-12)
          << trial;
    }
    EXPECT_DOUBLE_EQ(r.sigma_a0_ran, std::sqrt(r.coeff_cov(0, 0)));
  }
}

TEST(Fit, CovarianceSymmetricPositiveSemidefinite) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1e-5);
  const auto f = uniform_grid(700, 900, 1800);
  auto s = spectrum_of(f, reference_order8_coefficients());
  for (auto& v : s.ratios) v += noise(rng);
  const auto r = fit({14, 1e6}, s, 1.25e6);
  EXPECT_TRUE(r.coeff_cov.isApprox(r.coeff_cov.transpose(), 0.0));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.coeff_cov);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * eig.eigenvalues().maxCoeff());
}

TEST(Fit, ScaleEquivariance) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 1e-5);
  const auto f = uniform_grid(500, 900, 1800);
  auto s = spectrum_of(f, reference_order8_coefficients());
  for (auto& v : s.ratios) v += noise(rng);
  const double c = 0.7;
  const auto a = fit({8, 1e6}, s, 9e5);
  const auto b = fit({8, c * 1e6}, s, 9e5);
  EXPECT_NEAR(a.a0(), b.a0(), 1e-10);
  for (std::size_t i = 1; i < a.coeffs.size(); ++i) {
    EXPECT_LT(rel_diff(b.coeffs[i], a.coeffs[i] * std::pow(c, 2.0 * static_cast<double>(i))), 1e-8);
  }
  const auto pa = predict(a, f);
  const auto pb = predict(b, f);
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_NEAR(pa[j], pb[j], 1e-10);
}

TEST(Fit, NestingRecoversNoiselessTruth) {
  const auto f = uniform_grid(1111, 900, 1800);
  const std::vector<double> truth{1.0, -4.33e-4, 1.66e-3, -2.25e-3};  // order 6
  const auto s = spectrum_of(f, truth);
  for (int d = 6; d <= 14; d += 2) {
    const auto r = fit({d, 1e6}, s, 1.4e6);
    EXPECT_NEAR(r.a0(), 1.0, 1e-10) << d;
    for (std::size_t i = 1; i < r.coeffs.size(); ++i) {
      EXPECT_NEAR(r.coeffs[i], i < truth.size() ? truth[i] : 0.0, 1e-7) << d << " coeff " << i;
    }
  }
}

TEST(Fit, ResidualMeanZeroAndVarianceEstimate) {
  std::mt19937_64 rng(77);
  const double sd = 3e-4;
  std::normal_distribution<double> noise(0.0, sd);
  const auto f = uniform_grid(800, 900, 1800);
  auto s = spectrum_of(f, {1.0});
  for (auto& v : s.ratios) v += noise(rng);
  const auto r = fit({2, 1e6}, s, f.back());
  const auto e = residuals(r, s, f.back());
  EXPECT_NEAR(std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size()), 0.0, 1e-10);
  EXPECT_NEAR(r.residual_variance / (sd * sd), 1.0, 0.2);
}

TEST(Fit, SaturatedFitHasZeroResidualVariance) {
  const auto f = uniform_grid(3, 1e5, 1e5);
  RatioSpectrum s{f, {1.0, 2.0, 0.5}, RatioKind::pooled_raw};
  const auto r = fit({4, 1e6}, s, 1e6);
  EXPECT_EQ(r.residual_variance, 0.0);
  for (double e : residuals(r, s, 1e6)) EXPECT_NEAR(e, 0.0, 1e-9);
}

TEST(Fit, Errors) {
  const auto f = uniform_grid(4, 1e5, 1e5);
  const auto s = spectrum_of(f, {1.0});
  EXPECT_THROW(fit({8, 1e6}, s, 1e6), UnderdeterminedError);
  EXPECT_THROW(fit({2, 1e6}, s, 1.5e5), UnderdeterminedError);
  const std::vector<double> short_w{1.0, 1.0};
  EXPECT_THROW(fit({2, 1e6}, s, 1e6, short_w), ArgumentError);
  const std::vector<double> bad_w{1.0, 0.0, 1.0, 1.0};
  EXPECT_THROW(fit({2, 1e6}, s, 1e6, bad_w), ArgumentError);

  // Only two distinct values of (f/f0)^2, so three even terms are dependent.
  RatioSpectrum sym{{-2e6, -1e6, 1e6, 2e6}, {1, 2, 2, 1}, RatioKind::pooled_raw};
  EXPECT_THROW(fit({4, 1e6}, sym, 2e6), SingularFitError);
  EXPECT_NO_THROW(fit({2, 1e6}, sym, 2e6));
}

TEST(Evaluate, HandValues) {
  const double a0[] = {2.0};
  EXPECT_EQ(evaluate(a0, 1e6, 12345.0), 2.0);
  const double lin[] = {1.0, 0.5};
  EXPECT_DOUBLE_EQ(evaluate(lin, 1e6, 1e6), 1.5);
  const std::vector<double> table{1.000100961 + 2.36e-6, -4.33e-4, 1.66e-3, -2.25e-3, 6.26e-4};
  EXPECT_EQ(evaluate(table, 1e6, 0.0), table[0]);
  EXPECT_NEAR(evaluate(table, 1e6, 1.3e6), even_poly(table, 1.3e6), 1e-15);
}

TEST(NestedBasis, LeadingColumnsSpanNestedDesigns) {
  const auto f = uniform_grid(300, 900, 1800);
  const NestedEvenBasis basis(f, 1e6, 8);
  EXPECT_EQ(basis.rows(), 300u);
  EXPECT_EQ(basis.usable_terms(), 8);
  const Eigen::MatrixXd& q = basis.q();
  EXPECT_TRUE((q.transpose() * q).isIdentity(1e-12));
  // Projection onto the first k columns reproduces the k-term LS fit.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e-4);
  RatioSpectrum s = spectrum_of(f, {1.0, 0.01, -0.02});
  for (auto& v : s.ratios) v += noise(rng);
  const Eigen::Map<const Eigen::VectorXd> y(s.ratios.data(), static_cast<Eigen::Index>(s.size()));
  for (int k = 2; k <= 6; ++k) {
    const Eigen::VectorXd proj = q.leftCols(k) * (q.leftCols(k).transpose() * y);
    const auto pred = predict(fit({2 * (k - 1), 1e6}, s, f.back()), f);
    for (std::size_t j = 0; j < f.size(); j += 37) EXPECT_NEAR(proj(static_cast<Eigen::Index>(j)), pred[j], 1e-11);
  }
}

TEST(NestedBasis, ReportsUsableTermsOnTinyWindows) {
  const std::vector<double> f{900, 2700, 4500};
  const NestedEvenBasis basis(f, 1e6, 8);
  EXPECT_EQ(basis.max_terms(), 3);
  EXPECT_LE(basis.usable_terms(), 3);
}
