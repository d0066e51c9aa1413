#include "jnt/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jnt/error.hpp"
#include "jnt/polyfit.hpp"
#include "jnt/tabular.hpp"

namespace jnt {

MixtureStats mixture_stats(const std::map<int, OrderEstimate>& per_order, const SelectionFractions& fractions) {
  MixtureStats out;
  out.fmax = fractions.fmax;
  out.selected_d = fractions.most_selected();

  for (const auto& [d, p] : fractions.p) {
    const auto it = per_order.find(d);
    if (it == per_order.end()) {
      if (p > 0.0) {
        throw InconsistencyError("order " + std::to_string(d) + " has selection fraction " + format_double(p) +
                                 " but no fit at fmax " + format_double(fractions.fmax) + " Hz");
      }
      continue;
    }
    out.per_order[d] = {it->second.a0, it->second.sigma_ran, p};
  }
  for (const auto& [d, est] : per_order) {
    if (!out.per_order.count(d)) out.per_order[d] = {est.a0, est.sigma_ran, 0.0};
  }

  const auto& sel = out.per_order.at(out.selected_d);
  out.a0_hat = sel.a0;
  out.sigma_ran = sel.sigma_ran;

  // Offsets differ from each other by parts in 1e6 of a value near one, so
  // accumulate deviations from the selected offset.
  const double ref = sel.a0;
  double p_sum = 0.0;
  double shift = 0.0;
  double alpha2 = 0.0;
  for (const auto& [d, c] : out.per_order) {
    p_sum += c.p;
    shift += c.p * (c.a0 - ref);
    alpha2 += c.p * c.sigma_ran * c.sigma_ran;
  }
  shift /= p_sum;
  alpha2 /= p_sum;
  double beta2 = 0.0;
  for (const auto& [d, c] : out.per_order) {
    const double dev = (c.a0 - ref) - shift;
    beta2 += c.p * dev * dev;
  }
  beta2 /= p_sum;

  out.a0_bar = ref + shift;
  out.sigma_alpha = std::sqrt(alpha2);
  out.sigma_beta = std::sqrt(beta2);
  out.sigma_tot = std::sqrt(alpha2 + beta2);
  return out;
}

std::map<int, OrderEstimate> fit_orders(const RatioSpectrum& pooled, std::span<const int> orders, double fmax,
                                        double f0, std::vector<std::string>* warnings) {
  std::map<int, OrderEstimate> out;
  for (int d : orders) {
    try {
      const PolyFit f = fit(PolyModel{d, f0}, pooled, fmax);
      out[d] = {f.a0(), f.sigma_a0_ran};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numerical) throw;
      if (warnings) warnings->push_back(std::string("fmax ") + format_double(fmax) + " Hz: " + e.what());
    }
  }
  return out;
}

MixtureStats mixture_stats(const RatioSpectrum& raw_pooled, const SelectionFractions& fractions, double f0) {
  std::vector<int> orders;
  for (const auto& [d, p] : fractions.p) orders.push_back(d);
  return mixture_stats(fit_orders(raw_pooled, orders, fractions.fmax, f0), fractions);
}

std::vector<double> ScanGrid::values() const {
  validate();
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double f = start + static_cast<double>(i) * step;
    if (f > stop + 1e-9 * step) break;
    out.push_back(f);
  }
  return out;
}

void ScanGrid::validate() const {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (!(start < stop)) throw ConfigError("grid start must be below grid stop");
  if (!(start > 0.0)) throw ConfigError("grid start must be positive");
}

std::vector<std::size_t> lowest_sigma_indices(std::span<const MixtureStats> stats, std::size_t k) {
  std::vector<std::size_t> idx(stats.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (stats[a].sigma_tot != stats[b].sigma_tot) return stats[a].sigma_tot < stats[b].sigma_tot;
    return stats[a].fmax < stats[b].fmax;
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

double sigma_fmax(std::span<const MixtureStats> stats, std::size_t k) {
  if (k < 2) throw ArgumentError("sigma_fmax: k must be at least 2");
  if (stats.size() < k) {
    throw ArgumentError("sigma_fmax: need " + std::to_string(k) + " bandwidths, have " +
                        std::to_string(stats.size()));
  }
  const auto idx = lowest_sigma_indices(stats, k);
  const double ref = stats[idx.front()].a0_hat;
  double mean = 0.0;
  for (auto i : idx) mean += stats[i].a0_hat - ref;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (auto i : idx) {
    const double dev = (stats[i].a0_hat - ref) - mean;
    ss += dev * dev;
  }
  return std::sqrt(ss / static_cast<double>(k - 1));
}

double sigma_tot_final(double sigma_tot_star, double sigma_fmax) {
  if (sigma_tot_star < 0.0 || sigma_fmax < 0.0) throw ArgumentError("sigma_tot_final: negative input");
  return std::hypot(sigma_tot_star, sigma_fmax);
}

ScanResult bandwidth_scan(const Dataset& dataset, const CvConfig& cfg, const ScanGrid& grid, std::size_t k_lowest) {
  cfg.validate();
  ScanResult out;
  out.k_lowest = k_lowest;
  out.a0_calc_bar = dataset.a0_calc_bar();
  for (double fmax : grid.values()) {
    if (fmax < dataset.frequencies().front()) {
      out.warnings.push_back("fmax " + format_double(fmax) + " Hz below the first block; skipped");
      continue;
    }
    SelectionFractions fr;
    try {
      fr = selection_fractions(dataset, cfg, fmax);
    } catch (const UnderdeterminedError& e) {
      out.warnings.push_back(std::string(e.what()) + "; bandwidth dropped");
      continue;
    }
    out.warnings.insert(out.warnings.end(), fr.warnings.begin(), fr.warnings.end());
    const RatioSpectrum raw = pool_ratio(dataset, fmax);
    std::vector<int> orders;
    for (const auto& [d, p] : fr.p) orders.push_back(d);
    const auto per_order = fit_orders(raw, orders, fmax, cfg.f0, &out.warnings);
    if (per_order.empty()) {
      out.warnings.push_back("fmax " + format_double(fmax) + " Hz: no order fittable; bandwidth dropped");
      continue;
    }
    out.stats.push_back(mixture_stats(per_order, fr));
    out.fractions.push_back(std::move(fr));
    out.grid.push_back(fmax);
  }
  if (out.stats.empty()) throw ScanError("bandwidth scan: no bandwidth survived");

  // Strict comparison keeps the smaller fmax on ties.
  out.star_index = 0;
  for (std::size_t i = 1; i < out.stats.size(); ++i) {
    if (out.stats[i].sigma_tot < out.stats[out.star_index].sigma_tot) out.star_index = i;
  }
  out.fmax_star = out.grid[out.star_index];
  out.sigma_tot_star = out.stats[out.star_index].sigma_tot;

  const std::size_t k = std::min(k_lowest, out.stats.size());
  out.lowest = lowest_sigma_indices(out.stats, k);
  if (k >= 2) {
    out.sigma_fmax = sigma_fmax(out.stats, k);
    if (k < k_lowest) {
      out.warnings.push_back("only " + std::to_string(k) + " bandwidths available for sigma_fmax");
    }
  } else {
    out.sigma_fmax = 0.0;
    out.warnings.push_back("fewer than two bandwidths; sigma_fmax set to 0");
  }
  out.sigma_tot_final = sigma_tot_final(out.sigma_tot_star, out.sigma_fmax);
  return out;
}

}  // namespace jnt
