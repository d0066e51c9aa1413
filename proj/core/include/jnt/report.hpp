#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "jnt/physics.hpp"
#include "jnt/polyfit.hpp"
#include "jnt/trend.hpp"
#include "jnt/uncertainty.hpp"

namespace jnt {

// Fixed-width tables scale offsets and uncertainties by 1e6; delimited files
// carry full precision.

// Selection fractions: one row per fmax (kHz), one column per order, 4 decimals.
void write_selection_table(std::ostream& out, const ScanResult& scan);
void write_selection_csv(std::ostream& out, const ScanResult& scan);

// Per-bandwidth offsets and mixture uncertainties.
void write_scan_table(std::ostream& out, const ScanResult& scan);
void write_scan_csv(std::ostream& out, const ScanResult& scan);

// Selected bandwidth and the final uncertainty budget. With a physical
// configuration the Boltzmann constant implied by the selected offset is
// appended.
void write_summary_table(std::ostream& out, const std::string& label, const ScanResult& scan,
                         const std::optional<double>& sigma_fmax_k10 = std::nullopt,
                         const PhysicalConfig* physics = nullptr);
void write_summary_csv(std::ostream& out, const std::string& label, const ScanResult& scan,
                       const std::optional<double>& sigma_fmax_k10 = std::nullopt);

// Plot data, one figure panel per file.
void write_selected_order_csv(std::ostream& out, const ScanResult& scan);
void write_sigma_tot_csv(std::ostream& out, const ScanResult& scan);
void write_offset_band_csv(std::ostream& out, const ScanResult& scan);
void write_lowest_csv(std::ostream& out, const ScanResult& scan);
// Observed, predicted and residual ratio for the blocks of the fit.
void write_spectrum_fit_csv(std::ostream& out, const PolyFit& fit, const RatioSpectrum& spectrum);

// JSON record: order, f0, fmax, n_points, coefficients, covariance, sigma_a0,
// residual variance and the offset relative to the reference.
void write_fit_json(std::ostream& out, const PolyFit& fit, double a0_calc_bar);

struct TrendReportRow {
  double fmax = 0.0;
  int order = 0;
  TrendFit trend;
  std::optional<ParametricBootstrap> parametric;
  std::optional<BreuschPagan> breusch_pagan;
  std::optional<MixtureStats> pooled;  // pooled offset and sigma_tot at this fmax
  double a0_calc_bar = 0.0;
};

// Intercept(se), slope(se), trend p, chi2, consistency p and pooled offset(sigma_tot).
void write_trend_table(std::ostream& out, const TrendReportRow& row);
void write_trend_csv(std::ostream& out, const TrendReportRow& row);

// run_id, day, y_i, sqrt(V_i)
void write_offsets_csv(std::ostream& out, const RunOffsets& offsets);

}  // namespace jnt
