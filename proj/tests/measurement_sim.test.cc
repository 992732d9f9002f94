#include "spdcsim/measurement_sim.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "spdcsim/errors.h"
#include "testing.h"

namespace spdcsim {
namespace {

SourceModel quiet_source() {
  SourceModel source;
  source.dark_rate_cps = 0.0;
  source.coincidence_window_ns = 1e-9;
  return source;
}

TEST(measurement_sim, ReferenceBudget) {
  EXPECT_NEAR(overall_efficiency(reference_collection_budget()), 0.2831, 1e-4);
  EXPECT_DOUBLE_EQ(overall_efficiency(reference_collection_budget()), 0.526 * 0.897 * 0.60);
  EXPECT_THROW(overall_efficiency({}), DomainError);
  EXPECT_THROW(overall_efficiency({{{"lens", 1.2}}}), DomainError);
  EXPECT_THROW(overall_efficiency({{{"lens", 0.0}}}), DomainError);
}

TEST(measurement_sim, ValidatesSource) {
  SourceModel source;
  EXPECT_NO_THROW(validate(source));
  source.arm_efficiency_1 = 0.0;
  EXPECT_THROW(validate(source), DomainError);
  source = {};
  source.integration_time_s = -1.0;
  EXPECT_THROW(validate(source), DomainError);
  source = {};
  source.dark_rate_cps = -1.0;
  EXPECT_THROW(validate(source), DomainError);
}

TEST(measurement_sim, BellFringeMaximumRate) {
  // 2 kcps/mW at 7 mW is 7 kcps at a fringe maximum of a Bell state.
  const auto state = TwoQubitState::from_ket(psi_minus());
  const auto rates = expected_rates(state, analyzer_ket(0), analyzer_ket(90), SourceModel{});
  EXPECT_NEAR(rates.pair_cps, 7000.0, 1e-9);
  EXPECT_NEAR(rates.singles_1_cps, 7000.0 + 100.0, 1e-9);
  EXPECT_NEAR(rates.singles_2_cps, 7000.0 + 100.0, 1e-9);
  EXPECT_NEAR(rates.accidental_cps, 7100.0 * 7100.0 * 1e-9, 1e-12);
  EXPECT_NEAR(rates.coincidence_cps(), rates.pair_cps + rates.accidental_cps, 1e-12);
}

TEST(measurement_sim, SinglesScaleWithOtherArmEfficiency) {
  SourceModel source;
  source.arm_efficiency_1 = 0.5;
  source.arm_efficiency_2 = 0.25;
  source.dark_rate_cps = 0.0;
  const auto state = TwoQubitState::maximally_mixed();
  const auto rates = expected_rates(state, analyzer_ket(0), analyzer_ket(0), source);
  const double r = 14000.0;
  EXPECT_NEAR(rates.pair_cps, r * 0.25, 1e-9);
  EXPECT_NEAR(rates.singles_1_cps, r * 0.5 / 0.25, 1e-9);
  EXPECT_NEAR(rates.singles_2_cps, r * 0.5 / 0.5, 1e-9);
}

TEST(measurement_sim, SampleCountsIsSeeded) {
  EXPECT_EQ(sample_counts(1000.0, 1.0, 42), sample_counts(1000.0, 1.0, 42));
  EXPECT_EQ(sample_counts(0.0, 1.0, 42), 0);
  EXPECT_THROW(sample_counts(-1.0, 1.0, 1), DomainError);
  EXPECT_THROW(sample_counts(NAN, 1.0, 1), DomainError);
  EXPECT_THROW(sample_counts(1.0, -1.0, 1), DomainError);
}

TEST(measurement_sim, SampleCountsArePoisson) {
  const int n = 4000;
  const double mean = 250.0;
  double sum = 0, sum2 = 0;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(sample_counts(mean, 1.0, 1000 + k));
    sum += x;
    sum2 += x * x;
  }
  const double m = sum / n;
  const double var = sum2 / n - m * m;
  EXPECT_NEAR(m, mean, 5 * std::sqrt(mean / n));
  EXPECT_NEAR(var / mean, 1.0, 0.1);
}

TEST(measurement_sim, CountError) {
  EXPECT_DOUBLE_EQ(count_error(100), 10.0);
  EXPECT_THROW(count_error(-1), DomainError);
}

TEST(measurement_sim, FringeScanRecords) {
  const auto state = testing::werner(psi_minus(), 0.9);
  const std::vector<double> sweep{0, 45, 90, 135, 180};
  const auto records = simulate_fringe_scan(state, 45.0, sweep, SourceModel{}, 7);
  ASSERT_EQ(records.size(), sweep.size());
  EXPECT_EQ(records[1].label, "45/45");
  ASSERT_TRUE(records[1].setting.has_value());
  EXPECT_EQ(records[1].setting->theta2_deg, 45.0);
  EXPECT_EQ(records[1].integration_time_s, 1.0);
  const auto again = simulate_fringe_scan(state, 45.0, sweep, SourceModel{}, 7);
  for (std::size_t k = 0; k < records.size(); ++k) {
    EXPECT_EQ(records[k].coincidences, again[k].coincidences);
  }
  const auto other = simulate_fringe_scan(state, 45.0, sweep, SourceModel{}, 8);
  bool differs = false;
  for (std::size_t k = 0; k < records.size(); ++k) {
    differs |= records[k].coincidences != other[k].coincidences;
  }
  EXPECT_TRUE(differs);
}

TEST(measurement_sim, ExpectedModeIsNoiseless) {
  const auto state = testing::werner(psi_plus(), 0.8);
  std::vector<double> sweep;
  for (double t = 0; t < 360; t += 15) sweep.push_back(t);
  const auto records =
      simulate_fringe_scan(state, 0.0, sweep, quiet_source(), 1, CountMode::kExpected);
  const auto fit = fit_fringe(fringe_points(records, CountMode::kExpected));
  EXPECT_NEAR(fit.visibility, 0.8, 1e-9);
  for (const auto& r : records) {
    EXPECT_DOUBLE_EQ(r.observed(CountMode::kExpected), r.expected_coincidences);
  }
}

TEST(measurement_sim, VariancesFollowCounts) {
  const auto state = TwoQubitState::from_ket(psi_plus());
  const std::vector<double> sweep{0, 90, 180, 270};
  const auto records = simulate_fringe_scan(state, 0.0, sweep, SourceModel{}, 3);
  const auto variances = count_variances(records, CountMode::kPoisson);
  ASSERT_EQ(variances.size(), records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    EXPECT_DOUBLE_EQ(variances[k], static_cast<double>(records[k].coincidences));
  }
}

TEST(measurement_sim, ChshFromExpectedCounts) {
  for (double v : {1.0, 0.983}) {
    const auto state = testing::werner(psi_minus(), v);
    const auto records =
        simulate_chsh(state, chsh_preset("psi-minus"), quiet_source(), 1, CountMode::kExpected);
    ASSERT_EQ(records.size(), 16u);
    const auto m = chsh_from_counts(records, CountMode::kExpected);
    EXPECT_NEAR(m.s, 2 * std::numbers::sqrt2 * v, 1e-6);
  }
}

TEST(measurement_sim, ChshStderrFromCounts) {
  const auto state = testing::werner(psi_minus(), 0.983);
  const auto records = simulate_chsh(state, chsh_preset("psi-minus"), SourceModel{}, 21);
  const auto m = chsh_from_counts(records, CountMode::kPoisson);
  // About 14000 coincidences per correlation: sigma_E ~ sqrt((1 - E^2) / N).
  for (double e : m.correlation_stderr) EXPECT_NEAR(e, std::sqrt((1 - 0.48) / 14000), 1.5e-3);
  EXPECT_NEAR(m.s_stderr, 2 * 0.0061, 2e-3);
  EXPECT_NEAR(m.s, 2.78, 5 * m.s_stderr);
}

}  // namespace
}  // namespace spdcsim
