#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "jnt/data_model.hpp"
#include "jnt/error.hpp"
#include "jnt/simulate.hpp"
#include "support.hpp"

using namespace jnt;
using jnt::testing::make_dataset;
using jnt::testing::RunSpec;

namespace {

RunSpec flat_run(std::size_t n, double sr, double sq, double a0 = 1.0, double hours = 1.0) {
  return RunSpec{std::vector<double>(n, sr), std::vector<double>(n, sq), a0, hours, 0.0};
}

}  // namespace

TEST(Dataset, SingleRunMeanIsItsCalibration) {
  const auto ds = make_dataset({1e3, 2e3}, {flat_run(2, 1.0, 1.0, 1.25)});
  EXPECT_DOUBLE_EQ(ds.a0_calc_bar(), 1.25);
  EXPECT_DOUBLE_EQ(ds.calibrations()[0].weight, 1.0);
}

TEST(Dataset, AcquisitionTimeWeightedMean) {
  // 0.25 * 1 + 0.75 * 2
  const auto ds = make_dataset({1e3}, {flat_run(1, 1, 1, 1.0, 2.0), flat_run(1, 1, 1, 2.0, 6.0)});
  EXPECT_NEAR(ds.a0_calc_bar(), 1.75, 1e-15);
  EXPECT_NEAR(ds.calibrations()[0].weight + ds.calibrations()[1].weight, 1.0, 1e-15);
}

TEST(Dataset, ValidationErrors) {
  EXPECT_THROW(make_dataset({1e3, 2e3}, {flat_run(2, 1, 0)}), DomainError);
  EXPECT_THROW(make_dataset({2e3, 1e3}, {flat_run(2, 1, 1)}), GridError);
  EXPECT_THROW(make_dataset({1e3}, {flat_run(1, 1, 1, 0.0)}), DomainError);
  EXPECT_THROW(make_dataset({1e3}, {flat_run(1, 1, 1, 1.0, 0.0)}), DomainError);

  std::vector<RunSpectrum> runs(2);
  for (int i = 0; i < 2; ++i) {
    runs[i].run_id = i + 1;
    runs[i].frequencies = {1e3, 2e3 + i};  // second grid differs
    runs[i].s_r = {1, 1};
    runs[i].s_q = {1, 1};
    runs[i].acquisition_time = 1;
  }
  EXPECT_THROW(Dataset::create(runs, {{1, 1, 1}, {2, 1, 1}}), GridError);
  runs[1].frequencies = runs[0].frequencies;
  EXPECT_THROW(Dataset::create(runs, {{1, 1, 1}}), ReferenceError);
  EXPECT_THROW(Dataset::create(runs, {{1, 1, 1}, {2, 1, 1}, {3, 1, 1}}), ReferenceError);
  EXPECT_NO_THROW(Dataset::create(runs, {{1, 1, 1}, {2, 1, 1}}));
}

TEST(Dataset, LoadFromTextAndWeightOverride) {
  std::istringstream spectra("run_id,frequency_hz,s_r,s_q\n2,900,2,1\n1,2700,1.5,1\n1,900,1,1\n2,2700,3,1\n");
  std::istringstream calib("run_id,a0_calc,acquisition_hours,day_offset,weight\n1,1.0,2,0,3\n2,2.0,6,1.5,1\n");
  const auto ds = load_dataset(spectra, calib);
  ASSERT_EQ(ds.run_count(), 2u);
  EXPECT_EQ(ds.frequencies(), (std::vector<double>{900, 2700}));
  EXPECT_EQ(ds.runs()[0].s_r, (std::vector<double>{1, 1.5}));
  EXPECT_DOUBLE_EQ(ds.runs()[1].timestamp, 1.5);
  EXPECT_NEAR(ds.a0_calc_bar(), 0.75 * 1.0 + 0.25 * 2.0, 1e-15);
}

TEST(Dataset, LoadErrors) {
  const std::string calib = "run_id,a0_calc,acquisition_hours,day_offset\n1,1,1,0\n2,1,1,0\n";
  {
    // run 2 misses a block
    std::istringstream s("run_id,frequency_hz,s_r,s_q\n1,900,1,1\n1,2700,1,1\n2,900,1,1\n");
    std::istringstream c(calib);
    EXPECT_THROW(load_dataset(s, c), GridError);
  }
  {
    std::istringstream s("run_id,frequency_hz,s_r,s_q\n1,900,1,1\n2,900,1,1\n3,900,1,1\n");
    std::istringstream c(calib);
    EXPECT_THROW(load_dataset(s, c), ReferenceError);
  }
  {
    std::istringstream s("run_id,frequency_hz,s_r,s_q\n1,900,1,0\n2,900,1,1\n");
    std::istringstream c(calib);
    EXPECT_THROW(load_dataset(s, c), DomainError);
  }
  {
    std::istringstream s("run_id,frequency_hz,s_r\n1,900,1\n");
    std::istringstream c(calib);
    EXPECT_THROW(load_dataset(s, c), ParseError);
  }
  EXPECT_THROW(load_dataset_files("/nonexistent/a", "/nonexistent/b"), IoError);
}

TEST(Dataset, DefaultGridHas1111Blocks) {
  SimConfig cfg;
  cfg.noise_sd = 0.0;
  const auto ds = simulate_dataset(cfg);
  EXPECT_EQ(ds.run_count(), 45u);
  EXPECT_EQ(ds.block_count(), 1111u);
  EXPECT_DOUBLE_EQ(ds.frequencies().front(), 900.0);
  // Last 1800 Hz step at or below 1999.8 kHz.
  EXPECT_DOUBLE_EQ(ds.frequencies().back(), 900.0 + 1110 * 1800.0);
}

TEST(Dataset, WriteLoadRoundTrip) {
  SimConfig cfg;
  cfg.n_runs = 6;
  cfg.grid = jnt::testing::uniform_grid(20, 900, 1800);
  const auto ds = simulate_dataset(cfg);
  std::stringstream s, c;
  write_spectra(s, ds);
  write_calibrations(c, ds);
  const auto back = load_dataset(s, c);
  ASSERT_EQ(back.run_count(), ds.run_count());
  for (std::size_t i = 0; i < ds.run_count(); ++i) {
    EXPECT_EQ(back.runs()[i].s_r, ds.runs()[i].s_r);
    EXPECT_EQ(back.runs()[i].timestamp, ds.runs()[i].timestamp);
    EXPECT_EQ(back.calibrations()[i].a0_calc, ds.calibrations()[i].a0_calc);
  }
}

TEST(PoolRatio, HandEvaluations) {
  const auto ds = make_dataset({1e3}, {flat_run(1, 2, 1), flat_run(1, 4, 3)});
  const int both[] = {1, 2};
  EXPECT_DOUBLE_EQ(pool_ratio(ds, both, 1e3).ratios[0], 1.5);  // 6 / 4
  EXPECT_EQ(pool_ratio(ds, both, 1e3).kind, RatioKind::pooled_raw);

  const auto one = make_dataset({1e3, 2e3}, {RunSpec{{3, 5}, {2, 4}, 1, 1, 0}});
  const auto r = pool_ratio(one, 2e3);
  EXPECT_DOUBLE_EQ(r.ratios[0], 1.5);
  EXPECT_DOUBLE_EQ(r.ratios[1], 1.25);
  EXPECT_EQ(single_run_ratio(one, 1, 2e3).kind, RatioKind::single_run);

  const auto twin = make_dataset({1e3, 2e3}, {RunSpec{{3, 5}, {2, 4}, 1, 1, 0}, RunSpec{{3, 5}, {2, 4}, 1, 1, 0}});
  EXPECT_EQ(pool_ratio(twin, 2e3).ratios, r.ratios);
}

TEST(PoolRatio, InclusiveBandwidthAndErrors) {
  const auto ds = make_dataset({1e3, 2e3, 3e3}, {flat_run(3, 1, 1)});
  EXPECT_EQ(pool_ratio(ds, 2e3).size(), 2u);
  EXPECT_EQ(pool_ratio(ds, 2999.0).size(), 2u);
  EXPECT_EQ(pool_ratio(ds, 1e9).size(), 3u);
  EXPECT_THROW(pool_ratio(ds, 999.0), ArgumentError);
  EXPECT_THROW(pool_ratio(ds, std::span<const int>{}, 3e3), ArgumentError);
  const int unknown[] = {7};
  EXPECT_THROW(pool_ratio(ds, unknown, 3e3), ReferenceError);
}

TEST(PoolRatio, InvariantUnderCommonRescalingAndOrder) {
  const std::vector<double> f{1e3, 2e3};
  std::vector<RunSpec> a{RunSpec{{1.1, 2.3}, {1.0, 2.0}, 1, 1, 0}, RunSpec{{0.7, 5.0}, {0.5, 4.5}, 1, 1, 0},
                         RunSpec{{3.0, 1.0}, {2.0, 0.9}, 1, 1, 0}};
  auto scaled = a;
  for (auto& r : scaled) {
    for (auto& v : r.s_r) v *= 37.5;
    for (auto& v : r.s_q) v *= 37.5;
  }
  const auto base = pool_ratio(make_dataset(f, a), 2e3);
  const auto sc = pool_ratio(make_dataset(f, scaled), 2e3);
  const auto ds = make_dataset(f, a);
  const int reversed[] = {3, 1, 2};
  const auto rev = pool_ratio(ds, reversed, 2e3);
  for (std::size_t j = 0; j < 2; ++j) {
    double num = 0, den = 0;
    for (const auto& r : a) {
      num += r.s_r[j];
      den += r.s_q[j];
    }
    EXPECT_NEAR(base.ratios[j], num / den, 1e-15);
    EXPECT_NEAR(sc.ratios[j], base.ratios[j], 1e-15);
    EXPECT_NEAR(rev.ratios[j], base.ratios[j], 1e-15);
  }
}

TEST(Correction, HandEvaluation) {
  // weights 1:1 with a0_calc 1.1 and 0.9 give a mean of 1.0
  const auto ds = make_dataset({1e3}, {flat_run(1, 5, 2, 1.1), flat_run(1, 5, 2, 0.9)});
  const auto c = correct_spectra(ds);
  EXPECT_NEAR(c.runs()[0].s_r[0], 4.8, 1e-14);
  EXPECT_NEAR(c.runs()[1].s_r[0], 5.2, 1e-14);
  EXPECT_TRUE(c.corrected());
  EXPECT_EQ(pool_ratio(c, 1e3).kind, RatioKind::pooled_corrected);
}

TEST(Correction, EqualCalibrationsLeaveSpectraUnchanged) {
  const auto ds = make_dataset({1e3, 2e3}, {flat_run(2, 3, 2, 1.2), flat_run(2, 4, 1, 1.2)});
  const auto c = correct_spectra(ds);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(c.runs()[i].s_r, ds.runs()[i].s_r);
}

TEST(Correction, RemovesInjectedRunOffsetsAndIsIdempotent) {
  const std::vector<double> f = jnt::testing::uniform_grid(8, 900, 1800);
  const std::vector<double> shape{0.0, -4.33e-4, 1.66e-3};
  std::vector<RunSpec> specs;
  const double a0s[] = {1.0, 1.00002, 0.99997, 1.00001};
  for (std::size_t i = 0; i < 4; ++i) {
    RunSpec r;
    r.a0_calc = a0s[i];
    r.hours = 1.0 + static_cast<double>(i);
    for (double fj : f) {
      const double sq = 0.5 + 1e-7 * fj;
      r.s_q.push_back(sq);
      r.s_r.push_back((a0s[i] + jnt::testing::even_poly(shape, fj)) * sq);
    }
    specs.push_back(r);
  }
  const auto ds = make_dataset(f, specs);
  const auto c = correct_spectra(ds);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double expected = ds.a0_calc_bar() + jnt::testing::even_poly(shape, f[j]);
    for (int id = 1; id <= 4; ++id) EXPECT_NEAR(single_run_ratio(c, id, f.back()).ratios[j], expected, 1e-14);
  }
  const auto c2 = correct_spectra(c);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(c2.runs()[i].s_r, c.runs()[i].s_r);
}

TEST(Spread, MaxMinusMin) {
  EXPECT_DOUBLE_EQ(spread_a0_calc(make_dataset({1e3}, {flat_run(1, 1, 1, 1.0), flat_run(1, 1, 1, 1.5),
                                                       flat_run(1, 1, 1, 3.0)})),
                   2.0);
  EXPECT_EQ(spread_a0_calc(make_dataset({1e3}, {flat_run(1, 1, 1, 2.0), flat_run(1, 1, 1, 2.0)})), 0.0);
}
