#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jnt/crossval.hpp"
#include "jnt/data_model.hpp"

namespace jnt {

// Offset estimate of one candidate order on the raw pooled spectrum.
struct OrderEstimate {
  double a0 = 0.0;
  double sigma_ran = 0.0;
};

struct MixtureComponent {
  double a0 = 0.0;
  double sigma_ran = 0.0;
  double p = 0.0;
};

// Mean and spread of the Gaussian mixture sum_d p(d) N(a0(d), sigma_ran(d)^2).
struct MixtureStats {
  double fmax = 0.0;
  int selected_d = 0;
  double a0_hat = 0.0;     // offset of the selected order
  double sigma_ran = 0.0;  // its asymptotic standard uncertainty
  double a0_bar = 0.0;     // mixture mean
  double sigma_alpha = 0.0;
  double sigma_beta = 0.0;
  double sigma_tot = 0.0;  // sqrt(sigma_alpha^2 + sigma_beta^2)
  std::map<int, MixtureComponent> per_order;
};

// Evaluates the mixture mean and variance decomposition. Orders with p(d) > 0
// must have an estimate (InconsistencyError otherwise); the selected order is
// argmax p with ties to the smaller order.
MixtureStats mixture_stats(const std::map<int, OrderEstimate>& per_order, const SelectionFractions& fractions);

// Unweighted LS offset and sigma_ran for every order that can be fitted on the
// pooled spectrum. Orders that fail are skipped and noted in `warnings`.
std::map<int, OrderEstimate> fit_orders(const RatioSpectrum& pooled, std::span<const int> orders, double fmax,
                                        double f0, std::vector<std::string>* warnings = nullptr);

// Fits every candidate order to the raw pooled spectrum, then evaluates the mixture.
MixtureStats mixture_stats(const RatioSpectrum& raw_pooled, const SelectionFractions& fractions,
                           double f0 = kDefaultReferenceFrequency);

// Evenly spaced bandwidths start, start+step, ..., up to and including stop.
struct ScanGrid {
  double start = 200e3;
  double stop = 1400e3;
  double step = 25e3;

  std::vector<double> values() const;
  void validate() const;
};

struct ScanResult {
  std::vector<double> grid;                    // surviving bandwidths
  std::vector<MixtureStats> stats;             // one per grid value
  std::vector<SelectionFractions> fractions;   // one per grid value
  std::size_t star_index = 0;
  double fmax_star = 0.0;
  double sigma_tot_star = 0.0;
  double sigma_fmax = 0.0;
  double sigma_tot_final = 0.0;
  std::size_t k_lowest = 5;
  std::vector<std::size_t> lowest;             // indices of the k smallest sigma_tot
  double a0_calc_bar = 0.0;
  std::vector<std::string> warnings;

  const MixtureStats& star() const { return stats.at(star_index); }
};

// Indices of the k bandwidths with smallest sigma_tot, ascending in
// sigma_tot; ties go to the smaller fmax.
std::vector<std::size_t> lowest_sigma_indices(std::span<const MixtureStats> stats, std::size_t k);

// Sample standard deviation (n-1) of the selected-order offsets at the k
// bandwidths with smallest sigma_tot. Throws ArgumentError if k < 2 or fewer
// than k bandwidths.
double sigma_fmax(std::span<const MixtureStats> stats, std::size_t k = 5);

// sqrt(sigma_tot_star^2 + sigma_fmax^2). Throws ArgumentError on negative input.
double sigma_tot_final(double sigma_tot_star, double sigma_fmax);

// Selection fractions on corrected data, offsets on the raw pooled spectrum,
// mixture statistics per bandwidth, then the sigma_tot minimizer, sigma_fmax
// and the combined uncertainty. Bandwidths where nothing can be fitted are
// dropped with a warning; ScanError if none survive.
ScanResult bandwidth_scan(const Dataset& dataset, const CvConfig& cfg, const ScanGrid& grid,
                          std::size_t k_lowest = 5);

}  // namespace jnt
