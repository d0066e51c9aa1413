#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jnt/data_model.hpp"
#include "jnt/polyfit.hpp"

namespace jnt {

// Per-run offset estimates y_i with asymptotic variances V_i at day t_i
// (days since the earliest run).
struct RunOffsets {
  std::vector<int> run_ids;
  std::vector<double> y;
  std::vector<double> v;
  std::vector<double> t;

  std::size_t size() const noexcept { return y.size(); }
  // Throws ArgumentError unless lengths agree, v > 0 and t is non-decreasing.
  void validate() const;
};

// Fits the model to each corrected single-run ratio spectrum. y_i is the
// run's a_0 minus the weighted mean a0_calc; V_i is the squared asymptotic
// standard uncertainty of that a_0. Runs are ordered by timestamp.
RunOffsets per_run_offsets(const Dataset& dataset, const PolyModel& model, double fmax);

struct TrendFit {
  double beta0 = 0.0;  // intercept at the first run
  double beta1 = 0.0;  // slope per day
  double chi2_obs = 0.0;
  std::vector<double> fitted;
  std::vector<double> hat_diag;
  std::size_t dof = 0;          // n - 2
  double variance_scale = 0.0;  // chi2_obs / dof (NaN when dof == 0)
  double p_consistency = 0.0;   // upper chi-square tail at dof (NaN when dof == 0)
  // Analytic standard errors sqrt((X^T W X)^-1) scaled by sqrt(variance_scale).
  double analytic_se_beta0 = 0.0;
  double analytic_se_beta1 = 0.0;

  // Filled by bootstrap_trend.
  std::size_t n_boot = 0;
  double se_beta0 = 0.0;
  double se_beta1 = 0.0;
  double p_trend = 0.0;
  bool p_trend_is_bound = false;  // no null replicate reached |beta1|; p_trend = 1/n_boot
};

// Weighted least-squares line with weights 1/V_i. Needs n >= 2 and distinct
// times (DesignError otherwise).
TrendFit wls_trend(const RunOffsets& offsets);

// Residual bootstrap with leverage-adjusted residuals
// r_i = (y_i - yhat_i) / sqrt(V_i (1 - h_i)), centred, resampled with
// replacement and scaled back by sqrt(V_i). Standard errors are the sample
// standard deviations of the replicate estimates. The no-trend null
// distribution reuses the same residual pool around the weighted-mean
// constant; p_trend is the fraction of null |slope| >= |beta1|.
// Replicate b draws from its own substream, so any thread count gives the
// same result. Throws LeverageError if some h_i >= 1.
TrendFit bootstrap_trend(const RunOffsets& offsets, std::size_t n_boot, std::uint64_t seed, unsigned threads = 1);

struct ParametricBootstrap {
  double se_beta0 = 0.0;
  double se_beta1 = 0.0;
};

// Replicates yhat_i + N(0, V_i), refitted by WLS.
ParametricBootstrap parametric_bootstrap_trend(const RunOffsets& offsets, std::size_t n_boot, std::uint64_t seed,
                                               unsigned threads = 1);

struct BreuschPagan {
  double lm = 0.0;  // n R^2 of the auxiliary regression
  int dof = 0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Studentized Breusch-Pagan test: squared residuals of `fit` regressed on an
// intercept and the fit's even-power columns; dof = d/2. Throws TestError if
// the squared residuals are constant.
BreuschPagan breusch_pagan(const PolyFit& fit, const RatioSpectrum& spectrum, double fmax);

// Upper-tail chi-square probability.
double chi_square_upper_tail(double x, double dof);

}  // namespace jnt
