#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "jnt/error.hpp"
#include "jnt/keyvalue.hpp"
#include "jnt/physics.hpp"

using namespace jnt;

namespace {

PhysicalConfig representative() {
  PhysicalConfig c;
  c.h = 6.62607015e-34;
  c.e = 1.602176634e-19;
  c.t_w = 273.16;
  c.x_r = 0.25;
  c.f_s = 2.8e9;
  c.m = 1048576;
  c.d_amp = 0.0125;
  c.n_j = 8;
  return c;
}

PhysicalConfig unit() {
  PhysicalConfig c;
  c.h = 2;
  c.e = 1;
  c.t_w = c.x_r = c.f_s = c.m = c.d_amp = 1;
  c.n_j = 1;
  return c;
}

}  // namespace

TEST(Physics, QvnsUnitPlugIn) {
  EXPECT_DOUBLE_EQ(unit().josephson_constant(), 1.0);
  EXPECT_DOUBLE_EQ(qvns_psd(unit()), 1.0);
  auto c = representative();
  const double base = qvns_psd(c);
  c.n_j *= 2;
  EXPECT_NEAR(qvns_psd(c) / base, 4.0, 1e-15);
}

TEST(Physics, QvnsMatchesArbitraryPrecisionValue) {
  // 40-digit evaluation of D^2 N_J^2 f_s M (h / 2e)^2 for representative().
  EXPECT_NEAR(qvns_psd(representative()) / 1.255420524973590597477835e-16, 1.0, 1e-14);
  // 4 k T_W X_R h / e^2 with k = 1.380649e-23
  EXPECT_NEAR(nyquist_psd(representative(), 1.380649e-23) / 9.734992666294538042932564e-17, 1.0, 1e-14);
}

TEST(Physics, BoltzmannRoundTrip) {
  for (double k0 : {1.380649e-23, 1.0e-23, 2.5e-22}) {
    for (double d : {0.0125, 0.5, 3.0}) {
      auto c = representative();
      c.d_amp = d;
      const double ratio = nyquist_psd(c, k0) / qvns_psd(c);
      EXPECT_NEAR(boltzmann_from_ratio(c, ratio) / k0, 1.0, 1e-12);
    }
  }
}

TEST(Physics, BoltzmannHandValuesAndLinearity) {
  EXPECT_DOUBLE_EQ(boltzmann_from_ratio(unit(), 16.0), unit().h);
  const auto c = representative();
  EXPECT_NEAR(boltzmann_from_ratio(c, 3.0 * 0.77) / boltzmann_from_ratio(c, 0.77), 3.0, 1e-15);
  EXPECT_THROW(boltzmann_from_ratio(c, 0.0), DomainError);
  EXPECT_THROW(boltzmann_from_ratio(c, -1.0), DomainError);
}

TEST(Physics, ConfigParsingAndValidation) {
  const auto kv = KeyValueConfig::parse(
      "h = 6.62607015e-34\ne = 1.602176634e-19\nt_w = 273.16\nx_r = 0.25\nf_s = 2.8e9\nm = 1048576\n"
      "d_amp = 0.0125\nn_j = 8\n",
      "phys");
  const auto c = physical_config_from(kv);
  EXPECT_EQ(c.n_j, 8);
  EXPECT_DOUBLE_EQ(c.t_w, 273.16);
  EXPECT_THROW(physical_config_from(KeyValueConfig::parse("h = 1\n", "phys")), ConfigError);

  auto bad = representative();
  bad.x_r = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = representative();
  bad.n_j = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(load_physical_config("/nonexistent/physics.cfg"), IoError);
}
