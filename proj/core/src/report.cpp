#include "jnt/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <string>

#include "jnt/tabular.hpp"

namespace jnt {

namespace {

constexpr double kScale = 1e6;

std::string fixed(double value, int width, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, value);
  return buf;
}

std::string khz(double fmax) { return fixed(fmax / 1e3, 6, 0); }

std::set<int> all_orders(const ScanResult& scan) {
  std::set<int> orders;
  for (const auto& fr : scan.fractions) {
    for (const auto& [d, p] : fr.p) orders.insert(d);
  }
  return orders;
}

}  // namespace

void write_selection_table(std::ostream& out, const ScanResult& scan) {
  const auto orders = all_orders(scan);
  out << "  fmax   selection fractions p(d)\n";
  out << " (kHz)";
  for (int d : orders) out << (d < 10 ? "     d=" : "    d=") << d;
  out << '\n';
  for (const auto& fr : scan.fractions) {
    out << khz(fr.fmax);
    for (int d : orders) {
      const auto it = fr.p.find(d);
      out << fixed(it == fr.p.end() ? 0.0 : it->second, 8, 4);
    }
    out << '\n';
  }
}

void write_selection_csv(std::ostream& out, const ScanResult& scan) {
  const auto orders = all_orders(scan);
  out << "fmax_hz";
  for (int d : orders) out << ",p_d" << d;
  out << ",n_splits\n";
  for (const auto& fr : scan.fractions) {
    out << format_double(fr.fmax);
    for (int d : orders) {
      const auto it = fr.p.find(d);
      out << ',' << format_double(it == fr.p.end() ? 0.0 : it->second);
    }
    out << ',' << fr.n_splits << '\n';
  }
}

void write_scan_table(std::ostream& out, const ScanResult& scan) {
  out << "  fmax    d   a0-abar  sig_ran  mix-abar  sig_alp  sig_bet  sig_tot\n";
  out << " (kHz)        x1e6     x1e6     x1e6     x1e6     x1e6     x1e6\n";
  const double bar = scan.a0_calc_bar;
  for (const auto& s : scan.stats) {
    out << khz(s.fmax) << fixed(s.selected_d, 5, 0) << fixed((s.a0_hat - bar) * kScale, 9, 2)
        << fixed(s.sigma_ran * kScale, 9, 2) << fixed((s.a0_bar - bar) * kScale, 9, 2)
        << fixed(s.sigma_alpha * kScale, 9, 2) << fixed(s.sigma_beta * kScale, 9, 3)
        << fixed(s.sigma_tot * kScale, 9, 3) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "fmax_hz,selected_d,a0_minus_abar,sigma_ran,a0_bar_minus_abar,sigma_alpha,sigma_beta,sigma_tot\n";
  const double bar = scan.a0_calc_bar;
  for (const auto& s : scan.stats) {
    out << format_double(s.fmax) << ',' << s.selected_d << ',' << format_double(s.a0_hat - bar) << ','
        << format_double(s.sigma_ran) << ',' << format_double(s.a0_bar - bar) << ','
        << format_double(s.sigma_alpha) << ',' << format_double(s.sigma_beta) << ','
        << format_double(s.sigma_tot) << '\n';
  }
}

void write_summary_table(std::ostream& out, const std::string& label, const ScanResult& scan,
                         const std::optional<double>& sigma_fmax_k10, const PhysicalConfig* physics) {
  const auto& s = scan.star();
  const double bar = scan.a0_calc_bar;
  out << "                    fmax    d  a0-abar  sig_ran mix-abar  sig_alp  sig_bet sig_tot*  sig_fmx sig_finl\n";
  out << "                   (kHz)       x1e6     x1e6     x1e6     x1e6     x1e6     x1e6     x1e6     x1e6\n";
  char name[32];
  std::snprintf(name, sizeof(name), "%-18s", label.substr(0, 18).c_str());
  out << name << khz(scan.fmax_star) << fixed(s.selected_d, 5, 0) << fixed((s.a0_hat - bar) * kScale, 9, 2)
      << fixed(s.sigma_ran * kScale, 9, 2) << fixed((s.a0_bar - bar) * kScale, 9, 2)
      << fixed(s.sigma_alpha * kScale, 9, 2) << fixed(s.sigma_beta * kScale, 9, 2)
      << fixed(scan.sigma_tot_star * kScale, 9, 2) << fixed(scan.sigma_fmax * kScale, 9, 2)
      << fixed(scan.sigma_tot_final * kScale, 9, 2) << '\n';
  out << "\nk_lowest = " << scan.k_lowest << "; bandwidths (kHz):";
  for (auto i : scan.lowest) out << ' ' << fixed(scan.grid[i] / 1e3, 0, 0);
  out << '\n';
  if (sigma_fmax_k10) out << "sigma_fmax with k = 10: " << fixed(*sigma_fmax_k10 * kScale, 0, 2) << " x1e-6\n";
  if (physics) {
    const double k = boltzmann_from_ratio(*physics, s.a0_hat);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "Boltzmann constant from selected offset: %.10e J/K (rel. u %.3e)\n", k,
                  scan.sigma_tot_final / s.a0_hat);
    out << buf;
  }
}

void write_summary_csv(std::ostream& out, const std::string& label, const ScanResult& scan,
                       const std::optional<double>& sigma_fmax_k10) {
  const auto& s = scan.star();
  const double bar = scan.a0_calc_bar;
  out << "label,fmax_hz,selected_d,a0_minus_abar,sigma_ran,a0_bar_minus_abar,sigma_alpha,sigma_beta,"
         "sigma_tot_star,sigma_fmax,sigma_tot_final,k_lowest,sigma_fmax_k10\n";
  out << label << ',' << format_double(scan.fmax_star) << ',' << s.selected_d << ','
      << format_double(s.a0_hat - bar) << ',' << format_double(s.sigma_ran) << ','
      << format_double(s.a0_bar - bar) << ',' << format_double(s.sigma_alpha) << ','
      << format_double(s.sigma_beta) << ',' << format_double(scan.sigma_tot_star) << ','
      << format_double(scan.sigma_fmax) << ',' << format_double(scan.sigma_tot_final) << ',' << scan.k_lowest
      << ',' << (sigma_fmax_k10 ? format_double(*sigma_fmax_k10) : std::string("nan")) << '\n';
}

void write_selected_order_csv(std::ostream& out, const ScanResult& scan) {
  out << "fmax_hz,selected_d\n";
  for (const auto& s : scan.stats) out << format_double(s.fmax) << ',' << s.selected_d << '\n';
}

void write_sigma_tot_csv(std::ostream& out, const ScanResult& scan) {
  out << "fmax_hz,sigma_tot\n";
  for (const auto& s : scan.stats) out << format_double(s.fmax) << ',' << format_double(s.sigma_tot) << '\n';
}

void write_offset_band_csv(std::ostream& out, const ScanResult& scan) {
  out << "fmax_hz,a0_minus_abar,lower,upper\n";
  for (const auto& s : scan.stats) {
    const double y = s.a0_hat - scan.a0_calc_bar;
    out << format_double(s.fmax) << ',' << format_double(y) << ',' << format_double(y - s.sigma_tot) << ','
        << format_double(y + s.sigma_tot) << '\n';
  }
}

void write_lowest_csv(std::ostream& out, const ScanResult& scan) {
  out << "rank,fmax_hz,selected_d,sigma_tot,a0_minus_abar\n";
  for (std::size_t r = 0; r < scan.lowest.size(); ++r) {
    const auto& s = scan.stats[scan.lowest[r]];
    out << r + 1 << ',' << format_double(s.fmax) << ',' << s.selected_d << ',' << format_double(s.sigma_tot)
        << ',' << format_double(s.a0_hat - scan.a0_calc_bar) << '\n';
  }
}

void write_spectrum_fit_csv(std::ostream& out, const PolyFit& fit, const RatioSpectrum& spectrum) {
  const auto res = residuals(fit, spectrum, fit.fmax);
  out << "frequency_hz,observed,predicted,residual\n";
  for (std::size_t j = 0; j < res.size(); ++j) {
    out << format_double(spectrum.frequencies[j]) << ',' << format_double(spectrum.ratios[j]) << ','
        << format_double(spectrum.ratios[j] - res[j]) << ',' << format_double(res[j]) << '\n';
  }
}

void write_fit_json(std::ostream& out, const PolyFit& fit, double a0_calc_bar) {
  nlohmann::ordered_json j;
  j["order"] = fit.model.order;
  j["f0_hz"] = fit.model.f0;
  j["fmax_hz"] = fit.fmax;
  j["n_points"] = fit.n_points;
  j["weighted"] = fit.weighted;
  j["coefficients"] = fit.coeffs;
  std::vector<std::vector<double>> cov(static_cast<std::size_t>(fit.coeff_cov.rows()));
  for (Eigen::Index r = 0; r < fit.coeff_cov.rows(); ++r) {
    for (Eigen::Index c = 0; c < fit.coeff_cov.cols(); ++c) cov[static_cast<std::size_t>(r)].push_back(fit.coeff_cov(r, c));
  }
  j["covariance"] = cov;
  j["sigma_a0"] = fit.sigma_a0_ran;
  j["residual_variance"] = fit.residual_variance;
  j["a0_calc_bar"] = a0_calc_bar;
  j["a0_minus_a0_calc_bar"] = fit.a0() - a0_calc_bar;
  out << j.dump(2) << '\n';
}

void write_trend_table(std::ostream& out, const TrendReportRow& row) {
  const auto& t = row.trend;
  out << " fmax   d      intercept           slope   p(trend)    chi2   p(cons)      pooled offset\n";
  out << "(kHz)            x1e6        x1e6/day                                       x1e6\n";
  char buf[256];
  const std::string p_trend = (t.p_trend_is_bound ? "<" : " ") + fixed(t.p_trend, 0, 3);
  std::string pooled = "         n/a";
  if (row.pooled) {
    const auto it = row.pooled->per_order.find(row.order);
    if (it != row.pooled->per_order.end()) {
      char pb[64];
      std::snprintf(pb, sizeof(pb), "%7.2f(%.2f)", (it->second.a0 - row.a0_calc_bar) * kScale,
                    row.pooled->sigma_tot * kScale);
      pooled = pb;
    }
  }
  std::snprintf(buf, sizeof(buf), "%5.0f %3d %7.2f(%5.2f) %7.3f(%5.3f) %9s %7.1f %9.3f %17s\n", row.fmax / 1e3,
                row.order, t.beta0 * kScale, t.se_beta0 * kScale, t.beta1 * kScale, t.se_beta1 * kScale,
                p_trend.c_str(), t.chi2_obs, t.p_consistency, pooled.c_str());
  out << buf;
  out << "\nruns = " << t.fitted.size() << ", dof = " << t.dof << ", bootstrap replicates = " << t.n_boot << '\n';
  if (row.parametric) {
    std::snprintf(buf, sizeof(buf), "parametric bootstrap slope se = %.4f x1e-6/day (ratio to nonparametric %.3f)\n",
                  row.parametric->se_beta1 * kScale, row.parametric->se_beta1 / t.se_beta1);
    out << buf;
  }
  if (row.breusch_pagan) {
    std::snprintf(buf, sizeof(buf), "Breusch-Pagan on pooled spectrum: LM = %.3f, dof = %d, p = %.3f\n",
                  row.breusch_pagan->lm, row.breusch_pagan->dof, row.breusch_pagan->p_value);
    out << buf;
  }
}

void write_trend_csv(std::ostream& out, const TrendReportRow& row) {
  const auto& t = row.trend;
  out << "fmax_hz,d,intercept,se_intercept,slope_per_day,se_slope,p_trend,p_trend_is_bound,chi2_obs,dof,"
         "p_consistency,variance_scale,parametric_se_slope,bp_lm,bp_dof,bp_p,pooled_a0_minus_abar,pooled_sigma_tot\n";
  out << format_double(row.fmax) << ',' << row.order << ',' << format_double(t.beta0) << ','
      << format_double(t.se_beta0) << ',' << format_double(t.beta1) << ',' << format_double(t.se_beta1) << ','
      << format_double(t.p_trend) << ',' << (t.p_trend_is_bound ? 1 : 0) << ',' << format_double(t.chi2_obs) << ','
      << t.dof << ',' << format_double(t.p_consistency) << ',' << format_double(t.variance_scale) << ',';
  out << (row.parametric ? format_double(row.parametric->se_beta1) : "nan") << ',';
  if (row.breusch_pagan) {
    out << format_double(row.breusch_pagan->lm) << ',' << row.breusch_pagan->dof << ','
        << format_double(row.breusch_pagan->p_value) << ',';
  } else {
    out << "nan,0,nan,";
  }
  std::string a0 = "nan";
  std::string sig = "nan";
  if (row.pooled) {
    const auto it = row.pooled->per_order.find(row.order);
    if (it != row.pooled->per_order.end()) {
      a0 = format_double(it->second.a0 - row.a0_calc_bar);
      sig = format_double(row.pooled->sigma_tot);
    }
  }
  out << a0 << ',' << sig << '\n';
}

void write_offsets_csv(std::ostream& out, const RunOffsets& offsets) {
  out << "run_id,day,offset,sigma\n";
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    out << (offsets.run_ids.empty() ? static_cast<int>(i + 1) : offsets.run_ids[i]) << ','
        << format_double(offsets.t[i]) << ',' << format_double(offsets.y[i]) << ','
        << format_double(std::sqrt(offsets.v[i])) << '\n';
  }
}

}  // namespace jnt
