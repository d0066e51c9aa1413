#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jnt/data_model.hpp"

namespace jnt::testing {

inline std::vector<double> uniform_grid(std::size_t n, double start, double step) {
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = start + step * static_cast<double>(j);
  return f;
}

inline double even_poly(const std::vector<double>& coeffs, double f, double f0 = 1e6) {
  const double x = (f / f0) * (f / f0);
  double acc = 0.0, p = 1.0;
  for (double c : coeffs) {
    acc += c * p;
    p *= x;
  }
  return acc;
}

struct RunSpec {
  std::vector<double> s_r;
  std::vector<double> s_q;
  double a0_calc = 1.0;
  double hours = 1.0;
  double day = 0.0;
};

inline Dataset make_dataset(const std::vector<double>& freqs, const std::vector<RunSpec>& specs) {
  std::vector<RunSpectrum> runs;
  std::vector<CalibrationRecord> cals;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    RunSpectrum r;
    r.run_id = static_cast<int>(i + 1);
    r.frequencies = freqs;
    r.s_r = specs[i].s_r;
    r.s_q = specs[i].s_q;
    r.acquisition_time = specs[i].hours;
    r.timestamp = specs[i].day;
    runs.push_back(std::move(r));
    cals.push_back({static_cast<int>(i + 1), specs[i].a0_calc, specs[i].hours});
  }
  return Dataset::create(std::move(runs), std::move(cals));
}

// n identical noiseless runs with s_q = 1 and s_r = a0_calc + poly(f).
inline Dataset poly_dataset(const std::vector<double>& freqs, const std::vector<double>& coeffs, std::size_t n_runs,
                            double a0_calc = 1.0) {
  std::vector<RunSpec> specs(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) {
    specs[i].s_q.assign(freqs.size(), 1.0);
    specs[i].s_r.resize(freqs.size());
    for (std::size_t j = 0; j < freqs.size(); ++j) specs[i].s_r[j] = a0_calc + even_poly(coeffs, freqs[j]);
    specs[i].a0_calc = a0_calc;
    specs[i].day = static_cast<double>(i);
  }
  return make_dataset(freqs, specs);
}

// Brute-force oracle: forms the normal equations in long double and inverts
// them by Gauss-Jordan elimination with partial pivoting.
using LMatrix = std::vector<std::vector<long double>>;

inline LMatrix invert(LMatrix a) {
  const std::size_t n = a.size();
  LMatrix inv(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0L) throw std::runtime_error("oracle: singular normal matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const long double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double m = a[r][c];
      if (m == 0.0L) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= m * a[c][k];
        inv[r][k] -= m * inv[c][k];
      }
    }
  }
  return inv;
}

struct OracleFit {
  std::vector<long double> beta;
  LMatrix cov;  // residual variance times (X^T W X)^-1
  long double ssr = 0.0L;
};

// rows of x are design rows; w may be empty for unit weights.
inline OracleFit normal_equations_fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                      const std::vector<double>& w = {}) {
  const std::size_t n = x.size(), p = x.front().size();
  LMatrix xtx(p, std::vector<long double>(p, 0.0L));
  std::vector<long double> xty(p, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    const long double wi = w.empty() ? 1.0L : w[i];
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += wi * x[i][a] * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += wi * x[i][a] * x[i][b];
    }
  }
  OracleFit out;
  const LMatrix inv = invert(xtx);
  out.beta.assign(p, 0.0L);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) out.beta[a] += inv[a][b] * xty[b];
  for (std::size_t i = 0; i < n; ++i) {
    long double pred = 0.0L;
    for (std::size_t a = 0; a < p; ++a) pred += x[i][a] * out.beta[a];
    const long double r = y[i] - pred;
    out.ssr += (w.empty() ? 1.0L : w[i]) * r * r;
  }
  const long double s2 = n > p ? out.ssr / static_cast<long double>(n - p) : 0.0L;
  out.cov = inv;
  for (auto& row : out.cov)
    for (auto& v : row) v *= s2;
  return out;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace jnt::testing
