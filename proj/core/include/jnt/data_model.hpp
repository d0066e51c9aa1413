#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace jnt {

// Per-run blocked PSD estimates. frequencies are block midpoints in Hz.
struct RunSpectrum {
  int run_id = 0;
  std::vector<double> frequencies;
  std::vector<double> s_r;  // resistor noise
  std::vector<double> s_q;  // QVNS noise
  double acquisition_time = 0.0;  // hours
  double timestamp = 0.0;         // days since the first run
};

struct CalibrationRecord {
  int run_id = 0;
  double a0_calc = 0.0;
  double weight = 0.0;  // normalized to sum 1 inside a Dataset
};

enum class RatioKind { pooled_raw, pooled_corrected, single_run };

const char* to_string(RatioKind kind) noexcept;

struct RatioSpectrum {
  std::vector<double> frequencies;
  std::vector<double> ratios;
  RatioKind kind = RatioKind::pooled_raw;

  std::size_t size() const noexcept { return frequencies.size(); }
};

// Validated collection of runs sharing one frequency grid, with one
// calibration per run. Immutable after construction.
class Dataset {
 public:
  // Validates every invariant and normalizes calibration weights. Throws
  // GridError, ReferenceError, DomainError or ArgumentError.
  static Dataset create(std::vector<RunSpectrum> runs, std::vector<CalibrationRecord> calibrations);

  const std::vector<RunSpectrum>& runs() const noexcept { return runs_; }
  // Calibrations in the same order as runs().
  const std::vector<CalibrationRecord>& calibrations() const noexcept { return calibrations_; }
  const std::vector<double>& frequencies() const noexcept { return runs_.front().frequencies; }
  std::size_t run_count() const noexcept { return runs_.size(); }
  std::size_t block_count() const noexcept { return frequencies().size(); }
  double a0_calc_bar() const noexcept { return a0_calc_bar_; }
  bool corrected() const noexcept { return corrected_; }

  std::size_t index_of(int run_id) const;
  std::vector<int> run_ids() const;

 private:
  friend Dataset correct_spectra(const Dataset& dataset);

  std::vector<RunSpectrum> runs_;
  std::vector<CalibrationRecord> calibrations_;
  double a0_calc_bar_ = 0.0;
  bool corrected_ = false;
};

// Spectra: columns run_id, frequency_hz, s_r, s_q.
// Calibrations: columns run_id, a0_calc, acquisition_hours, day_offset and an
// optional weight column overriding the acquisition-time weights.
Dataset load_dataset(std::istream& spectra, std::istream& calibrations);
Dataset load_dataset_files(const std::string& spectra_path, const std::string& calibration_path);

// Writes the two files load_dataset reads.
void write_spectra(std::ostream& out, const Dataset& dataset);
void write_calibrations(std::ostream& out, const Dataset& dataset);

// Number of leading grid blocks with midpoint <= fmax.
std::size_t blocks_up_to(std::span<const double> frequencies, double fmax);

// Blockwise sum(s_r) / sum(s_q) over the listed runs, for blocks <= fmax.
RatioSpectrum pool_ratio(const Dataset& dataset, std::span<const int> run_ids, double fmax);
RatioSpectrum pool_ratio(const Dataset& dataset, double fmax);
RatioSpectrum single_run_ratio(const Dataset& dataset, int run_id, double fmax);

// s_r(f,i) -> s_r(f,i) - (a0_calc(i) - a0_calc_bar) * s_q(f,i). The result's
// calibrations are all set to a0_calc_bar, so a second application is a no-op.
Dataset correct_spectra(const Dataset& dataset);

// max(a0_calc) - min(a0_calc).
double spread_a0_calc(const Dataset& dataset);

void write_ratio_spectrum(std::ostream& out, const RatioSpectrum& spectrum);

}  // namespace jnt
