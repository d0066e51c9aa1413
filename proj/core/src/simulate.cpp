#include "jnt/simulate.hpp"

#include <cmath>
#include <random>

#include "jnt/error.hpp"
#include "jnt/keyvalue.hpp"
#include "jnt/random.hpp"

namespace jnt {

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double f = 900.0 + 1800.0 * k;
    if (f >= 2.0e6) break;
    grid.push_back(f);
  }
  return grid;
}

std::vector<double> reference_order8_coefficients() { return {0.0, -4.33e-4, 1.66e-3, -2.25e-3, 6.26e-4}; }

void SimConfig::validate() const {
  if (truth_coeffs.empty()) throw ConfigError("simulation: truth_coeffs must not be empty");
  if (n_runs < 1) throw ConfigError("simulation: n_runs must be >= 1");
  if (!per_run_noise_sd.empty() && per_run_noise_sd.size() != n_runs) {
    throw ConfigError("simulation: per_run_noise_sd needs one entry per run");
  }
  for (double sd : per_run_noise_sd) {
    if (!(sd >= 0.0)) throw ConfigError("simulation: noise SDs must be >= 0");
  }
  if (!(noise_sd >= 0.0)) throw ConfigError("simulation: noise_sd must be >= 0");
  if (!(f0 > 0.0)) throw ConfigError("simulation: f0 must be positive");
  if (!(acquisition_hours > 0.0)) throw ConfigError("simulation: acquisition_hours must be positive");
  if (!(a0_calc > 0.0)) throw ConfigError("simulation: a0_calc must be positive");
  if (!(span_days >= 0.0)) throw ConfigError("simulation: span_days must be >= 0");
}

SimConfig sim_config_from(const KeyValueConfig& kv) {
  SimConfig cfg;
  if (kv.has("truth_coeffs")) cfg.truth_coeffs = kv.get_list("truth_coeffs");
  if (auto v = kv.find_double("f0")) cfg.f0 = *v;
  if (kv.has("n_runs")) {
    const auto n = kv.get_integer("n_runs");
    if (n < 1) throw ConfigError("simulation: n_runs must be >= 1");
    cfg.n_runs = static_cast<std::size_t>(n);
  }
  if (auto v = kv.find_double("noise_sd")) cfg.noise_sd = *v;
  if (kv.has("per_run_noise_sd")) cfg.per_run_noise_sd = kv.get_list("per_run_noise_sd");
  if (kv.has("seed")) cfg.seed = static_cast<std::uint64_t>(kv.get_integer("seed"));
  if (auto v = kv.find_double("trend_slope")) cfg.trend_slope = *v;
  if (auto v = kv.find_double("span_days")) cfg.span_days = *v;
  if (auto v = kv.find_double("acquisition_hours")) cfg.acquisition_hours = *v;
  if (auto v = kv.find_double("a0_calc")) cfg.a0_calc = *v;
  if (kv.has("grid_start") || kv.has("grid_step") || kv.has("grid_count")) {
    const double start = kv.get_double("grid_start");
    const double step = kv.get_double("grid_step");
    const auto count = kv.get_integer("grid_count");
    if (!(step > 0.0) || count < 1) throw ConfigError("simulation: invalid grid");
    for (long long k = 0; k < count; ++k) cfg.grid.push_back(start + step * static_cast<double>(k));
  }
  cfg.validate();
  return cfg;
}

Dataset simulate_dataset(const SimConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = cfg.grid.empty() ? default_grid() : cfg.grid;
  std::vector<double> truth(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    truth[j] = cfg.a0_calc + evaluate(cfg.truth_coeffs, cfg.f0, grid[j]);
  }

  std::vector<RunSpectrum> runs(cfg.n_runs);
  std::vector<CalibrationRecord> calibs(cfg.n_runs);
  for (std::size_t i = 0; i < cfg.n_runs; ++i) {
    const double day = cfg.n_runs > 1 ? cfg.span_days * static_cast<double>(i) / static_cast<double>(cfg.n_runs - 1)
                                      : 0.0;
    const double sd = cfg.per_run_noise_sd.empty() ? cfg.noise_sd : cfg.per_run_noise_sd[i];
    const double drift = cfg.trend_slope * day;
    Rng rng = make_rng(cfg.seed, stream::sim_noise, i);
    std::normal_distribution<double> noise(0.0, 1.0);

    auto& run = runs[i];
    run.run_id = static_cast<int>(i + 1);
    run.frequencies = grid;
    run.s_q.assign(grid.size(), 1.0);
    run.s_r.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) run.s_r[j] = truth[j] + drift + sd * noise(rng);
    run.acquisition_time = cfg.acquisition_hours;
    run.timestamp = day;
    calibs[i] = {run.run_id, cfg.a0_calc, 1.0};
  }
  return Dataset::create(std::move(runs), std::move(calibs));
}

std::vector<double> estimate_run_noise_sd(const Dataset& dataset, const PolyModel& model, double fmax) {
  const Dataset corrected = dataset.corrected() ? dataset : correct_spectra(dataset);
  std::vector<double> out;
  out.reserve(corrected.run_count());
  for (const auto& run : corrected.runs()) {
    const PolyFit f = fit(model, single_run_ratio(corrected, run.run_id, fmax), fmax);
    out.push_back(std::sqrt(f.residual_variance));
  }
  return out;
}

std::vector<double> project_truth(std::span<const double> coeffs, int target_order, double fmax, double f0) {
  const auto grid = default_grid();
  RatioSpectrum s;
  s.frequencies = grid;
  s.ratios.reserve(grid.size());
  for (double f : grid) s.ratios.push_back(evaluate(coeffs, f0, f));
  return fit(PolyModel{target_order, f0}, s, fmax).coeffs;
}

}  // namespace jnt
