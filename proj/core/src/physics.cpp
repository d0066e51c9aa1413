#include "jnt/physics.hpp"

#include <cmath>

#include "jnt/error.hpp"
#include "jnt/keyvalue.hpp"

namespace jnt {

void PhysicalConfig::validate() const {
  const struct {
    const char* name;
    double value;
  } fields[] = {{"h", h}, {"e", e}, {"t_w", t_w}, {"x_r", x_r}, {"f_s", f_s}, {"m", m}, {"d_amp", d_amp}};
  for (const auto& f : fields) {
    if (!(f.value > 0.0) || !std::isfinite(f.value)) {
      throw ConfigError(std::string("physical config: ") + f.name + " must be positive");
    }
  }
  if (n_j <= 0) throw ConfigError("physical config: n_j must be a positive integer");
}

PhysicalConfig physical_config_from(const KeyValueConfig& kv) {
  PhysicalConfig cfg;
  cfg.h = kv.get_double("h");
  cfg.e = kv.get_double("e");
  cfg.t_w = kv.get_double("t_w");
  cfg.x_r = kv.get_double("x_r");
  cfg.f_s = kv.get_double("f_s");
  cfg.m = kv.get_double("m");
  cfg.d_amp = kv.get_double("d_amp");
  cfg.n_j = kv.get_integer("n_j");
  cfg.validate();
  return cfg;
}

PhysicalConfig load_physical_config(const std::string& path) {
  return physical_config_from(KeyValueConfig::load(path));
}

double nyquist_psd(const PhysicalConfig& cfg, double k) {
  return 4.0 * k * cfg.t_w * cfg.x_r * cfg.von_klitzing_constant();
}

double qvns_psd(const PhysicalConfig& cfg) {
  const double kj = cfg.josephson_constant();
  const double nj = static_cast<double>(cfg.n_j);
  return cfg.d_amp * cfg.d_amp * nj * nj * cfg.f_s * cfg.m / (kj * kj);
}

double boltzmann_from_ratio(const PhysicalConfig& cfg, double ratio) {
  if (!(ratio > 0.0)) throw DomainError("boltzmann_from_ratio: ratio must be positive");
  const double nj = static_cast<double>(cfg.n_j);
  return cfg.h * cfg.d_amp * cfg.d_amp * nj * nj * cfg.f_s * cfg.m * ratio / (16.0 * cfg.t_w * cfg.x_r);
}

}  // namespace jnt
