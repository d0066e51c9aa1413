#pragma once

#include <string>

namespace jnt {

class KeyValueConfig;

// Physical inputs for converting a ratio offset to the Boltzmann constant.
// Constants are inputs so that revised recommended values need no code change.
struct PhysicalConfig {
  double h = 0.0;      // Planck constant, J s
  double e = 0.0;      // elementary charge, C
  double t_w = 0.0;    // triple point of water, K
  double x_r = 0.0;    // resistance in units of R_K = h / e^2
  double f_s = 0.0;    // QVNS clock frequency, Hz
  double m = 0.0;      // bit-length parameter
  double d_amp = 0.0;  // QVNS software amplitude parameter
  long long n_j = 0;   // junctions in the Josephson array

  double josephson_constant() const noexcept { return 2.0 * e / h; }
  double von_klitzing_constant() const noexcept { return h / (e * e); }

  // Throws ConfigError unless every field is strictly positive.
  void validate() const;
};

// Keys: h, e, t_w, x_r, f_s, m, d_amp, n_j.
PhysicalConfig physical_config_from(const KeyValueConfig& kv);
PhysicalConfig load_physical_config(const std::string& path);

// Resistor Johnson-noise PSD 4 k T_W X_R R_K.
double nyquist_psd(const PhysicalConfig& cfg, double k);

// QVNS PSD D^2 N_J^2 f_s M / K_J^2.
double qvns_psd(const PhysicalConfig& cfg);

// Boltzmann constant from the resistor/QVNS PSD ratio. Inverse of
// nyquist_psd / qvns_psd, so the amplitude parameter enters squared:
// k = h D^2 N_J^2 f_s M ratio / (16 T_W X_R). Throws DomainError for ratio <= 0.
double boltzmann_from_ratio(const PhysicalConfig& cfg, double ratio);

}  // namespace jnt
