#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "jnt/crossval.hpp"
#include "jnt/data_model.hpp"
#include "jnt/report.hpp"
#include "jnt/simulate.hpp"
#include "jnt/trend.hpp"
#include "jnt/uncertainty.hpp"

namespace jnt {

struct PipelineConfig {
  std::string spectra_path;
  std::string calibration_path;
  std::string physics_path;  // optional
  ScanGrid grid;
  std::size_t n_splits = 20000;
  std::vector<int> orders{2, 4, 6, 8, 10, 12, 14};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool validation_corrected = true;
  std::string output_dir = "jnt_out";
  std::size_t k_lowest = 5;
  std::size_t n_boot = 50000;
  double f0 = kDefaultReferenceFrequency;
  std::string label = "dataset";

  static constexpr std::size_t kFastSplits = 2000;
  static constexpr std::size_t kFastBoot = 5000;

  void validate() const;
  CvConfig cv() const;
  // FNV-1a over every setting that affects results (not threads or paths of outputs).
  std::uint64_t config_hash() const;
};

// Parses "600kHz", "1.25MHz", "900Hz" or a bare number of Hz.
double parse_frequency(const std::string& text);

// Writes report files into a directory and records each in manifest.txt with
// the run's seed and config hash. The manifest is also written if the run
// fails part way, listing whatever was flushed.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string directory, std::uint64_t seed, std::uint64_t config_hash);
  ~ArtifactWriter();
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  void write(const std::string& name, const std::function<void(std::ostream&)>& body);
  void finish();
  const std::vector<std::string>& artifacts() const noexcept { return artifacts_; }

 private:
  void write_manifest() const;

  std::string dir_;
  std::uint64_t seed_;
  std::uint64_t hash_;
  std::vector<std::string> artifacts_;
  bool finished_ = false;
};

// Full bandwidth scan with all reports and plot data.
ScanResult run_select(const PipelineConfig& cfg, std::ostream* log = nullptr);

// Per-run offsets, WLS trend, both bootstraps, pooled Breusch-Pagan and the
// pooled offset at (fmax, order).
TrendReportRow run_trend(const PipelineConfig& cfg, double fmax, int order, std::ostream* log = nullptr);

// Writes spectra.csv and calibrations.csv for a simulated dataset.
Dataset run_simulate(const PipelineConfig& cfg, const SimConfig& sim, std::ostream* log = nullptr);

// Single (fmax, order) fit on the raw pooled spectrum.
PolyFit run_fit(const PipelineConfig& cfg, double fmax, int order, std::ostream* log = nullptr);

// Breusch-Pagan test of the (fmax, order) fit on the raw pooled spectrum.
BreuschPagan run_bp_test(const PipelineConfig& cfg, double fmax, int order, std::ostream* log = nullptr);

}  // namespace jnt
