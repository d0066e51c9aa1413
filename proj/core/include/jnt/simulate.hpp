#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jnt/data_model.hpp"
#include "jnt/polyfit.hpp"

namespace jnt {

class KeyValueConfig;

// Block midpoints 900 Hz, 2700 Hz, ... below 2 MHz (1.8 kHz blocks).
std::vector<double> default_grid();

// Even-polynomial coefficients (offset 0, a_2, a_4, a_6, a_8) estimated from
// the pooled experimental ratio spectrum at a 1250 kHz bandwidth.
std::vector<double> reference_order8_coefficients();

// Per-run standard deviation that gives the pooled 45-run spectrum an a_0
// statistical uncertainty of about 2.6e-6 to 3.0e-6 for order-8 fits at
// bandwidths of 1000 to 1400 kHz, the scale of the published simulations.
inline constexpr double kDefaultRunNoiseSd = 2.04e-4;

struct SimConfig {
  // Offset relative to a0_calc followed by a_2, a_4, ...
  std::vector<double> truth_coeffs = reference_order8_coefficients();
  double f0 = kDefaultReferenceFrequency;
  std::size_t n_runs = 45;
  std::vector<double> per_run_noise_sd;  // empty: noise_sd for every run
  double noise_sd = kDefaultRunNoiseSd;
  std::vector<double> grid;              // empty: default_grid()
  std::uint64_t seed = 1;
  double trend_slope = 0.0;              // offset drift per day
  double span_days = 90.0;               // runs evenly spaced over this span
  double acquisition_hours = 17.5;
  double a0_calc = 1.0;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

// Keys (all optional): truth_coeffs, f0, n_runs, noise_sd, per_run_noise_sd,
// seed, trend_slope, span_days, acquisition_hours, a0_calc, grid_start,
// grid_step, grid_count.
SimConfig sim_config_from(const KeyValueConfig& kv);

// s_q = 1 everywhere; s_r = a0_calc + truth(f) + trend_slope * day + white
// Gaussian noise with the run's standard deviation. Every calibration carries
// a0_calc with equal weights. Each run draws from its own substream.
Dataset simulate_dataset(const SimConfig& cfg);

// Residual standard deviation of the order-d fit to each corrected run.
std::vector<double> estimate_run_noise_sd(const Dataset& dataset, const PolyModel& model, double fmax);

// Noiseless least-squares projection of an even polynomial onto a lower
// order over the default grid up to fmax; used to build lower-order truths.
std::vector<double> project_truth(std::span<const double> coeffs, int target_order, double fmax,
                                  double f0 = kDefaultReferenceFrequency);

}  // namespace jnt
