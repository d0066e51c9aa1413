#include "jnt/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "jnt/error.hpp"
#include "jnt/physics.hpp"
#include "jnt/tabular.hpp"

namespace jnt {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  grid.validate();
  if (n_splits < 1) throw ConfigError("n_splits must be >= 1");
  if (n_boot < 2) throw ConfigError("n_boot must be >= 2");
  if (k_lowest < 2) throw ConfigError("k_lowest must be >= 2");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  cv().validate();
}

CvConfig PipelineConfig::cv() const {
  CvConfig c;
  c.n_splits = n_splits;
  c.candidate_orders = orders;
  c.seed = seed;
  c.f0 = f0;
  c.validation_corrected = validation_corrected;
  c.threads = threads;
  return c;
}

std::uint64_t PipelineConfig::config_hash() const {
  std::ostringstream s;
  s << "spectra=" << spectra_path << ";calib=" << calibration_path << ";physics=" << physics_path
    << ";grid=" << format_double(grid.start) << ',' << format_double(grid.stop) << ',' << format_double(grid.step)
    << ";splits=" << n_splits << ";orders=";
  for (int d : orders) s << d << ',';
  s << ";seed=" << seed << ";validation=" << validation_corrected << ";k=" << k_lowest << ";boot=" << n_boot
    << ";f0=" << format_double(f0) << ";label=" << label;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double parse_frequency(const std::string& text) {
  std::size_t split = 0;
  while (split < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[split])) || text[split] == '.' || text[split] == 'e' ||
          text[split] == 'E' || text[split] == '+' || text[split] == '-')) {
    // Stop an exponent scan at unit letters such as "MHz".
    if ((text[split] == 'e' || text[split] == 'E') && split + 1 < text.size() &&
        !std::isdigit(static_cast<unsigned char>(text[split + 1])) && text[split + 1] != '+' &&
        text[split + 1] != '-') {
      break;
    }
    ++split;
  }
  std::string unit = text.substr(split);
  for (auto& c : unit) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  double scale = 1.0;
  if (unit.empty() || unit == "hz") {
    scale = 1.0;
  } else if (unit == "khz" || unit == "k") {
    scale = 1e3;
  } else if (unit == "mhz" || unit == "m") {
    scale = 1e6;
  } else {
    throw ConfigError("unrecognized frequency unit in '" + text + "'");
  }
  try {
    return parse_double(text.substr(0, split), "frequency") * scale;
  } catch (const ParseError&) {
    throw ConfigError("invalid frequency '" + text + "'");
  }
}

ArtifactWriter::ArtifactWriter(std::string directory, std::uint64_t seed, std::uint64_t config_hash)
    : dir_(std::move(directory)), seed_(seed), hash_(config_hash) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
}

ArtifactWriter::~ArtifactWriter() {
  if (!finished_) {
    try {
      write_manifest();
    } catch (...) {
    }
  }
}

void ArtifactWriter::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  const fs::path path = fs::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  body(out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  artifacts_.push_back(name);
}

void ArtifactWriter::finish() {
  write_manifest();
  finished_ = true;
}

void ArtifactWriter::write_manifest() const {
  std::ofstream out(fs::path(dir_) / "manifest.txt", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in '" + dir_ + "'");
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(hash_));
  out << "artifact\tseed\tconfig_hash\n";
  for (const auto& a : artifacts_) out << a << '\t' << seed_ << '\t' << hash << '\n';
}

namespace {

Dataset load_inputs(const PipelineConfig& cfg) {
  if (cfg.spectra_path.empty() || cfg.calibration_path.empty()) {
    throw ConfigError("both a spectra file and a calibration file are required");
  }
  return load_dataset_files(cfg.spectra_path, cfg.calibration_path);
}

void log_warnings(std::ostream* log, const std::vector<std::string>& warnings) {
  if (!log) return;
  for (const auto& w : warnings) *log << "warning: " << w << '\n';
}

}  // namespace

ScanResult run_select(const PipelineConfig& cfg, std::ostream* log) {
  cfg.validate();
  const Dataset dataset = load_inputs(cfg);
  std::optional<PhysicalConfig> physics;
  if (!cfg.physics_path.empty()) physics = load_physical_config(cfg.physics_path);
  ArtifactWriter out(cfg.output_dir, cfg.seed, cfg.config_hash());

  if (log) {
    *log << "select: " << dataset.run_count() << " runs, " << dataset.block_count() << " blocks, "
         << cfg.grid.values().size() << " bandwidths, " << cfg.n_splits << " splits\n";
  }
  const ScanResult scan = bandwidth_scan(dataset, cfg.cv(), cfg.grid, cfg.k_lowest);
  log_warnings(log, scan.warnings);

  std::optional<double> k10;
  if (scan.stats.size() >= 10) k10 = sigma_fmax(scan.stats, 10);

  out.write("selection_fractions.txt", [&](std::ostream& o) { write_selection_table(o, scan); });
  out.write("selection_fractions.csv", [&](std::ostream& o) { write_selection_csv(o, scan); });
  out.write("scan.txt", [&](std::ostream& o) { write_scan_table(o, scan); });
  out.write("scan.csv", [&](std::ostream& o) { write_scan_csv(o, scan); });
  out.write("summary.txt", [&](std::ostream& o) {
    write_summary_table(o, cfg.label, scan, k10, physics ? &*physics : nullptr);
  });
  out.write("summary.csv", [&](std::ostream& o) { write_summary_csv(o, cfg.label, scan, k10); });
  out.write("fig2_selected_order.csv", [&](std::ostream& o) { write_selected_order_csv(o, scan); });
  out.write("fig2_sigma_tot.csv", [&](std::ostream& o) { write_sigma_tot_csv(o, scan); });
  out.write("fig2_offset_band.csv", [&](std::ostream& o) { write_offset_band_csv(o, scan); });
  out.write("fig3_lowest.csv", [&](std::ostream& o) { write_lowest_csv(o, scan); });

  const RatioSpectrum pooled = pool_ratio(dataset, dataset.frequencies().back());
  const PolyFit best = fit(PolyModel{scan.star().selected_d, cfg.f0}, pooled, scan.fmax_star);
  out.write("ratio_spectrum.csv", [&](std::ostream& o) { write_ratio_spectrum(o, pooled); });
  out.write("fig1_spectrum_fit.csv", [&](std::ostream& o) { write_spectrum_fit_csv(o, best, pooled); });
  out.write("fit_report.json", [&](std::ostream& o) { write_fit_json(o, best, dataset.a0_calc_bar()); });
  out.finish();

  if (log) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "selected fmax = %.0f kHz, d = %d, a0 - abar = %.3e, sigma_tot* = %.3e, sigma_fmax = %.3e, "
                  "sigma_tot,final = %.3e\n",
                  scan.fmax_star / 1e3, scan.star().selected_d, scan.star().a0_hat - scan.a0_calc_bar,
                  scan.sigma_tot_star, scan.sigma_fmax, scan.sigma_tot_final);
    *log << buf;
  }
  return scan;
}

TrendReportRow run_trend(const PipelineConfig& cfg, double fmax, int order, std::ostream* log) {
  cfg.validate();
  const Dataset dataset = load_inputs(cfg);
  ArtifactWriter out(cfg.output_dir, cfg.seed, cfg.config_hash());
  const PolyModel model{order, cfg.f0};
  model.validate();

  TrendReportRow row;
  row.fmax = fmax;
  row.order = order;
  row.a0_calc_bar = dataset.a0_calc_bar();
  const RunOffsets offsets = per_run_offsets(dataset, model, fmax);
  out.write("fig8_offsets.csv", [&](std::ostream& o) { write_offsets_csv(o, offsets); });

  row.trend = bootstrap_trend(offsets, cfg.n_boot, cfg.seed, cfg.threads);
  row.parametric = parametric_bootstrap_trend(offsets, cfg.n_boot, cfg.seed, cfg.threads);

  const RatioSpectrum pooled = pool_ratio(dataset, fmax);
  const PolyFit pooled_fit = fit(model, pooled, fmax);
  try {
    row.breusch_pagan = breusch_pagan(pooled_fit, pooled, fmax);
  } catch (const TestError& e) {
    if (log) *log << "warning: " << e.what() << '\n';
  }

  CvConfig cv = cfg.cv();
  if (std::find(cv.candidate_orders.begin(), cv.candidate_orders.end(), order) == cv.candidate_orders.end()) {
    cv.candidate_orders.push_back(order);
    std::sort(cv.candidate_orders.begin(), cv.candidate_orders.end());
  }
  try {
    const SelectionFractions fr = selection_fractions(dataset, cv, fmax);
    log_warnings(log, fr.warnings);
    row.pooled = mixture_stats(pooled, fr, cfg.f0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical) throw;
    if (log) *log << "warning: pooled offset unavailable: " << e.what() << '\n';
  }

  out.write("trend.txt", [&](std::ostream& o) { write_trend_table(o, row); });
  out.write("trend.csv", [&](std::ostream& o) { write_trend_csv(o, row); });
  out.finish();
  if (log) write_trend_table(*log, row);
  return row;
}

Dataset run_simulate(const PipelineConfig& cfg, const SimConfig& sim, std::ostream* log) {
  const Dataset ds = simulate_dataset(sim);
  ArtifactWriter out(cfg.output_dir, sim.seed, cfg.config_hash());
  out.write("spectra.csv", [&](std::ostream& o) { write_spectra(o, ds); });
  out.write("calibrations.csv", [&](std::ostream& o) { write_calibrations(o, ds); });
  out.finish();
  if (log) {
    *log << "simulate: wrote " << ds.run_count() << " runs x " << ds.block_count() << " blocks to "
         << cfg.output_dir << '\n';
  }
  return ds;
}

PolyFit run_fit(const PipelineConfig& cfg, double fmax, int order, std::ostream* log) {
  const Dataset dataset = load_inputs(cfg);
  ArtifactWriter out(cfg.output_dir, cfg.seed, cfg.config_hash());
  const RatioSpectrum pooled = pool_ratio(dataset, dataset.frequencies().back());
  const PolyFit f = fit(PolyModel{order, cfg.f0}, pooled, fmax);
  out.write("fit_report.json", [&](std::ostream& o) { write_fit_json(o, f, dataset.a0_calc_bar()); });
  out.write("fig1_spectrum_fit.csv", [&](std::ostream& o) { write_spectrum_fit_csv(o, f, pooled); });
  out.finish();
  if (log) write_fit_json(*log, f, dataset.a0_calc_bar());
  return f;
}

BreuschPagan run_bp_test(const PipelineConfig& cfg, double fmax, int order, std::ostream* log) {
  const Dataset dataset = load_inputs(cfg);
  const RatioSpectrum pooled = pool_ratio(dataset, fmax);
  const PolyFit f = fit(PolyModel{order, cfg.f0}, pooled, fmax);
  const BreuschPagan bp = breusch_pagan(f, pooled, fmax);
  if (log) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "Breusch-Pagan: fmax = %.0f kHz, d = %d, n = %zu, LM = %.4f, dof = %d, p = %.4f\n",
                  fmax / 1e3, order, bp.n, bp.lm, bp.dof, bp.p_value);
    *log << buf;
  }
  return bp;
}

}  // namespace jnt
