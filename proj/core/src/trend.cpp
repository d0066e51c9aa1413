#include "jnt/trend.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "jnt/error.hpp"
#include "jnt/parallel.hpp"
#include "jnt/random.hpp"

namespace jnt {

void RunOffsets::validate() const {
  const std::size_t n = y.size();
  if (v.size() != n || t.size() != n || (!run_ids.empty() && run_ids.size() != n)) {
    throw ArgumentError("run offsets: length mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw ArgumentError("run offsets: variances must be positive");
    if (!std::isfinite(y[i]) || !std::isfinite(t[i])) throw ArgumentError("run offsets: non-finite value");
    if (i > 0 && t[i] < t[i - 1]) throw ArgumentError("run offsets: times must be non-decreasing");
  }
}

RunOffsets per_run_offsets(const Dataset& dataset, const PolyModel& model, double fmax) {
  const Dataset corrected = dataset.corrected() ? dataset : correct_spectra(dataset);
  std::vector<std::size_t> order(corrected.run_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corrected.runs()[a].timestamp < corrected.runs()[b].timestamp;
  });
  const double t0 = corrected.runs()[order.front()].timestamp;

  RunOffsets out;
  for (std::size_t i : order) {
    const auto& run = corrected.runs()[i];
    PolyFit f;
    try {
      f = fit(model, single_run_ratio(corrected, run.run_id, fmax), fmax);
    } catch (const Error& e) {
      throw SingularFitError("run " + std::to_string(run.run_id) + ": " + e.what());
    }
    out.run_ids.push_back(run.run_id);
    out.y.push_back(f.a0() - corrected.a0_calc_bar());
    out.v.push_back(f.sigma_a0_ran * f.sigma_a0_ran);
    out.t.push_back(run.timestamp - t0);
  }
  return out;
}

namespace {

// Precomputed WLS solver for a fixed design and weights.
struct LineSolver {
  std::vector<double> w;
  std::vector<double> t;
  double sw = 0.0;
  double tw = 0.0;   // weighted mean time
  double stt = 0.0;  // sum w (t - tw)^2

  explicit LineSolver(const RunOffsets& o) : t(o.t) {
    w.resize(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) {
      w[i] = 1.0 / o.v[i];
      sw += w[i];
    }
    for (std::size_t i = 0; i < o.size(); ++i) tw += w[i] * t[i];
    tw /= sw;
    for (std::size_t i = 0; i < o.size(); ++i) stt += w[i] * (t[i] - tw) * (t[i] - tw);
    if (!(stt > 0.0)) throw DesignError("trend fit: all run times equal; slope not identifiable");
  }

  // (intercept, slope)
  std::pair<double, double> solve(const std::vector<double>& y) const {
    double yw = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) yw += w[i] * y[i];
    yw /= sw;
    double sty = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sty += w[i] * (t[i] - tw) * (y[i] - yw);
    const double slope = sty / stt;
    return {yw - slope * tw, slope};
  }
};

double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

double chi_square_upper_tail(double x, double dof) {
  if (!(dof > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

TrendFit wls_trend(const RunOffsets& offsets) {
  offsets.validate();
  const std::size_t n = offsets.size();
  if (n < 2) throw ArgumentError("trend fit: need at least two runs");
  const LineSolver solver(offsets);
  const auto [b0, b1] = solver.solve(offsets.y);

  TrendFit out;
  out.beta0 = b0;
  out.beta1 = b1;
  out.fitted.resize(n);
  out.hat_diag.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.fitted[i] = b0 + b1 * offsets.t[i];
    const double e = offsets.y[i] - out.fitted[i];
    out.chi2_obs += solver.w[i] * e * e;
    const double dt = offsets.t[i] - solver.tw;
    out.hat_diag[i] = solver.w[i] * (1.0 / solver.sw + dt * dt / solver.stt);
  }
  out.dof = n - 2;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.variance_scale = out.dof > 0 ? out.chi2_obs / static_cast<double>(out.dof) : nan;
  out.p_consistency = out.dof > 0 ? chi_square_upper_tail(out.chi2_obs, static_cast<double>(out.dof)) : nan;
  const double var_b1 = 1.0 / solver.stt;
  const double var_b0 = 1.0 / solver.sw + solver.tw * solver.tw / solver.stt;
  out.analytic_se_beta0 = std::sqrt(var_b0 * out.variance_scale);
  out.analytic_se_beta1 = std::sqrt(var_b1 * out.variance_scale);
  return out;
}

TrendFit bootstrap_trend(const RunOffsets& offsets, std::size_t n_boot, std::uint64_t seed, unsigned threads) {
  if (n_boot < 2) throw ArgumentError("bootstrap: need at least two replicates");
  TrendFit out = wls_trend(offsets);
  const std::size_t n = offsets.size();
  for (double h : out.hat_diag) {
    if (!(h < 1.0 - 1e-12)) throw LeverageError("bootstrap: leverage h_i >= 1; residuals cannot be rescaled");
  }
  const LineSolver solver(offsets);

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (offsets.y[i] - out.fitted[i]) / std::sqrt(offsets.v[i] * (1.0 - out.hat_diag[i]));
  }
  const double r_bar = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(n);
  for (double& x : r) x -= r_bar;
  std::vector<double> sqrt_v(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_v[i] = std::sqrt(offsets.v[i]);

  // Weighted mean of y: the constant no-trend fit.
  const auto [c0, c1] = solver.solve(offsets.y);
  const double constant = c0 + c1 * solver.tw;

  std::vector<double> b0s(n_boot), b1s(n_boot), null_b1(n_boot);
  parallel_for(n_boot, threads, [&](std::size_t b) {
    std::vector<double> y(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    Rng rng = make_rng(seed, stream::boot_np, b);
    for (std::size_t i = 0; i < n; ++i) y[i] = out.fitted[i] + sqrt_v[i] * r[pick(rng)];
    std::tie(b0s[b], b1s[b]) = solver.solve(y);

    std::uniform_int_distribution<std::size_t> pick_null(0, n - 1);
    Rng rng_null = make_rng(seed, stream::boot_null, b);
    for (std::size_t i = 0; i < n; ++i) y[i] = constant + sqrt_v[i] * r[pick_null(rng_null)];
    null_b1[b] = solver.solve(y).second;
  });

  out.n_boot = n_boot;
  out.se_beta0 = sample_sd(b0s);
  out.se_beta1 = sample_sd(b1s);
  const double observed = std::abs(out.beta1);
  std::size_t exceed = 0;
  for (double s : null_b1) {
    if (std::abs(s) >= observed) ++exceed;
  }
  if (exceed == 0) {
    out.p_trend = 1.0 / static_cast<double>(n_boot);
    out.p_trend_is_bound = true;
  } else {
    out.p_trend = static_cast<double>(exceed) / static_cast<double>(n_boot);
  }
  return out;
}

ParametricBootstrap parametric_bootstrap_trend(const RunOffsets& offsets, std::size_t n_boot, std::uint64_t seed,
                                               unsigned threads) {
  if (n_boot < 2) throw ArgumentError("bootstrap: need at least two replicates");
  const TrendFit base = wls_trend(offsets);
  const LineSolver solver(offsets);
  const std::size_t n = offsets.size();
  std::vector<double> b0s(n_boot), b1s(n_boot);
  parallel_for(n_boot, threads, [&](std::size_t b) {
    Rng rng = make_rng(seed, stream::boot_param, b);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = base.fitted[i] + std::sqrt(offsets.v[i]) * gauss(rng);
    std::tie(b0s[b], b1s[b]) = solver.solve(y);
  });
  return {sample_sd(b0s), sample_sd(b1s)};
}

BreuschPagan breusch_pagan(const PolyFit& fit, const RatioSpectrum& spectrum, double fmax) {
  const auto e = residuals(fit, spectrum, fmax);
  const std::size_t n = e.size();
  const int terms = fit.model.terms();
  if (n <= static_cast<std::size_t>(terms)) throw TestError("Breusch-Pagan: too few blocks for auxiliary regression");

  Eigen::VectorXd u(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) u(static_cast<Eigen::Index>(j)) = e[j] * e[j];
  const double u_mean = u.mean();
  const double sst = (u.array() - u_mean).square().sum();
  if (!(sst > 0.0)) throw TestError("Breusch-Pagan: squared residuals are constant");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), terms);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = spectrum.frequencies[j] / fit.model.f0;
    const double xx = r * r;
    double p = 1.0;
    for (int i = 0; i < terms; ++i) {
      x(static_cast<Eigen::Index>(j), i) = p;
      p *= xx;
    }
  }
  for (int i = 0; i < terms; ++i) x.col(i).normalize();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(terms, terms);
  for (int i = 0; i < terms; ++i) {
    if (!(std::abs(r(i, i)) > kRankTolerance)) throw TestError("Breusch-Pagan: degenerate auxiliary design");
  }
  const Eigen::VectorXd qtu = qr.householderQ().transpose() * u;
  const double ssr = qtu.tail(static_cast<Eigen::Index>(n) - terms).squaredNorm();

  BreuschPagan out;
  out.n = n;
  out.dof = terms - 1;
  const double r2 = 1.0 - ssr / sst;
  out.lm = static_cast<double>(n) * r2;
  out.p_value = chi_square_upper_tail(out.lm, out.dof);
  return out;
}

}  // namespace jnt
