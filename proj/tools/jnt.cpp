// Command-line front end: select, trend, simulate, fit, bp-test.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "jnt/error.hpp"
#include "jnt/keyvalue.hpp"
#include "jnt/pipeline.hpp"
#include "jnt/simulate.hpp"

namespace {

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  int d = 0;
  while (in >> d) out.push_back(d);
  if (!in.eof()) throw jnt::ConfigError("invalid order list '" + text + "'");
  return out;
}

struct Options {
  jnt::PipelineConfig cfg;
  std::string grid_start = "200kHz";
  std::string grid_stop = "1400kHz";
  std::string grid_step = "25kHz";
  std::string orders = "2,4,6,8,10,12,14";
  std::string validation = "corrected";
  std::string fmax;
  int order = 0;
  bool fast = false;
  bool n_splits_set = false;
  bool n_boot_set = false;

  // simulate
  std::string sim_config;
  long long n_runs = -1;
  double noise_sd = -1.0;
  double trend_slope = 0.0;
  bool trend_slope_set = false;
  int truth_order = 8;
  std::string noise_from_fmax;
  int noise_from_order = 0;
};

void add_input_options(CLI::App* app, Options& o) {
  app->add_option("--spectra", o.cfg.spectra_path, "Spectra file (run_id, frequency_hz, s_r, s_q)");
  app->add_option("--calibrations", o.cfg.calibration_path,
                  "Calibration file (run_id, a0_calc, acquisition_hours, day_offset[, weight])");
  app->add_option("--out", o.cfg.output_dir, "Output directory")->envname("JNT_OUTPUT_DIR");
  app->add_option("--seed", o.cfg.seed, "Master RNG seed");
  app->add_option("--threads", o.cfg.threads, "Worker threads");
  app->add_option("--f0", o.cfg.f0, "Reference frequency in Hz");
  app->add_option("--label", o.cfg.label, "Dataset label used in the summary");
}

void add_cv_options(CLI::App* app, Options& o) {
  app->add_option("--n-splits", o.cfg.n_splits, "Random five-way splits per bandwidth")
      ->each([&o](const std::string&) { o.n_splits_set = true; });
  app->add_option("--orders", o.orders, "Candidate polynomial orders");
  app->add_option("--validation", o.validation, "Validation pooling: corrected or raw")
      ->check(CLI::IsMember({"corrected", "raw"}));
  app->add_flag("--fast", o.fast, "Reduced split and bootstrap counts for quick runs");
}

void finalize(Options& o) {
  o.cfg.grid.start = jnt::parse_frequency(o.grid_start);
  o.cfg.grid.stop = jnt::parse_frequency(o.grid_stop);
  o.cfg.grid.step = jnt::parse_frequency(o.grid_step);
  o.cfg.orders = parse_orders(o.orders);
  o.cfg.validation_corrected = o.validation == "corrected";
  if (o.fast) {
    if (!o.n_splits_set) o.cfg.n_splits = jnt::PipelineConfig::kFastSplits;
    if (!o.n_boot_set) o.cfg.n_boot = jnt::PipelineConfig::kFastBoot;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral model selection and offset uncertainty for noise-thermometry ratio spectra"};
  app.require_subcommand(1);
  Options o;

  auto* select = app.add_subcommand("select", "Scan bandwidths, select order and bandwidth, report uncertainties");
  add_input_options(select, o);
  add_cv_options(select, o);
  select->add_option("--physics", o.cfg.physics_path, "Physical configuration (key = value)");
  select->add_option("--grid-start", o.grid_start, "First bandwidth (e.g. 200kHz)");
  select->add_option("--grid-stop", o.grid_stop, "Last bandwidth (e.g. 1400kHz)");
  select->add_option("--grid-step", o.grid_step, "Bandwidth step (e.g. 25kHz)");
  select->add_option("--k-lowest", o.cfg.k_lowest, "Bandwidths used for the sigma_fmax spread");

  auto* trend = app.add_subcommand("trend", "Per-run offsets, linear trend and bootstrap tests");
  add_input_options(trend, o);
  add_cv_options(trend, o);
  trend->add_option("--fmax", o.fmax, "Fitting bandwidth")->required();
  trend->add_option("--order", o.order, "Polynomial order")->required();
  trend->add_option("--n-boot", o.cfg.n_boot, "Bootstrap replicates")
      ->each([&o](const std::string&) { o.n_boot_set = true; });

  auto* simulate = app.add_subcommand("simulate", "Write a simulated dataset");
  simulate->add_option("--out", o.cfg.output_dir, "Output directory")->envname("JNT_OUTPUT_DIR");
  simulate->add_option("--config", o.sim_config, "Simulation configuration (key = value)");
  simulate->add_option("--seed", o.cfg.seed, "Noise seed");
  simulate->add_option("--n-runs", o.n_runs, "Number of runs");
  simulate->add_option("--noise-sd", o.noise_sd, "Per-run noise standard deviation");
  simulate->add_option("--trend-slope", o.trend_slope, "Offset drift per day")
      ->each([&o](const std::string&) { o.trend_slope_set = true; });
  simulate->add_option("--truth-order", o.truth_order, "8: reference order-8 truth; 6: its order-6 fit at 900 kHz")
      ->check(CLI::IsMember({6, 8}));
  simulate->add_option("--spectra", o.cfg.spectra_path, "Experimental spectra for per-run noise estimates");
  simulate->add_option("--calibrations", o.cfg.calibration_path, "Experimental calibrations");
  simulate->add_option("--noise-fmax", o.noise_from_fmax, "Bandwidth of the per-run noise fits");
  simulate->add_option("--noise-order", o.noise_from_order, "Order of the per-run noise fits");

  auto* fitcmd = app.add_subcommand("fit", "Fit one order at one bandwidth to the pooled spectrum");
  add_input_options(fitcmd, o);
  fitcmd->add_option("--fmax", o.fmax, "Fitting bandwidth")->required();
  fitcmd->add_option("--order", o.order, "Polynomial order")->required();

  auto* bp = app.add_subcommand("bp-test", "Breusch-Pagan heteroscedasticity test on the pooled fit");
  add_input_options(bp, o);
  bp->add_option("--fmax", o.fmax, "Fitting bandwidth")->required();
  bp->add_option("--order", o.order, "Polynomial order")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : jnt::exit_code(jnt::ErrorKind::config);
  }

  try {
    finalize(o);
    if (select->parsed()) {
      jnt::run_select(o.cfg, &std::cerr);
    } else if (trend->parsed()) {
      jnt::run_trend(o.cfg, jnt::parse_frequency(o.fmax), o.order, &std::cerr);
    } else if (simulate->parsed()) {
      jnt::SimConfig sim;
      if (!o.sim_config.empty()) sim = jnt::sim_config_from(jnt::KeyValueConfig::load(o.sim_config));
      if (simulate->count("--seed")) sim.seed = o.cfg.seed;
      if (o.n_runs >= 0) sim.n_runs = static_cast<std::size_t>(o.n_runs);
      if (o.noise_sd >= 0.0) sim.noise_sd = o.noise_sd;
      if (o.trend_slope_set) sim.trend_slope = o.trend_slope;
      if (o.truth_order == 6) sim.truth_coeffs = jnt::project_truth(jnt::reference_order8_coefficients(), 6, 900e3);
      if (!o.cfg.spectra_path.empty()) {
        if (o.noise_from_fmax.empty() || o.noise_from_order == 0) {
          throw jnt::ConfigError("--noise-fmax and --noise-order are required with --spectra");
        }
        const auto ds = jnt::load_dataset_files(o.cfg.spectra_path, o.cfg.calibration_path);
        sim.per_run_noise_sd = jnt::estimate_run_noise_sd(
            ds, jnt::PolyModel{o.noise_from_order, o.cfg.f0}, jnt::parse_frequency(o.noise_from_fmax));
        sim.n_runs = sim.per_run_noise_sd.size();
      }
      jnt::run_simulate(o.cfg, sim, &std::cerr);
    } else if (fitcmd->parsed()) {
      jnt::run_fit(o.cfg, jnt::parse_frequency(o.fmax), o.order, &std::cout);
    } else if (bp->parsed()) {
      jnt::run_bp_test(o.cfg, jnt::parse_frequency(o.fmax), o.order, &std::cout);
    }
  } catch (const jnt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return jnt::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
