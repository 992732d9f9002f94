#pragma once

// Detector-level model: brightness, arm efficiencies, accidentals and
// Poisson-sampled counts.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdcsim/polarization_state.h"

namespace spdcsim {

struct SourceModel {
  // Detected coincidences per second per mW summed over all polarization
  // outcomes; a polarizer pair at a Bell-state fringe maximum sees half.
  double pair_rate_per_mw = 2000.0;
  double pump_power_mw = 7.0;
  double arm_efficiency_1 = 1.0;
  double arm_efficiency_2 = 1.0;
  double dark_rate_cps = 100.0;
  double coincidence_window_ns = 1.0;
  double integration_time_s = 1.0;
};

void validate(const SourceModel& source);

struct RateBreakdown {
  double pair_cps = 0.0;
  double singles_1_cps = 0.0;
  double singles_2_cps = 0.0;
  double accidental_cps = 0.0;

  double coincidence_cps() const { return pair_cps + accidental_cps; }
};

// Rates behind analyzers projecting arm 1 onto `arm1` and arm 2 onto `arm2`.
// pair = R p12; singles_k = R p_k / eta_other + dark; accidentals = S1 S2 tau,
// with R = pair_rate_per_mw * pump_power_mw.
RateBreakdown expected_rates(const TwoQubitState& state, const QubitKet& arm1,
                             const QubitKet& arm2, const SourceModel& source);

double expected_coincidence_rate(const TwoQubitState& state, const AnalyzerSetting& setting,
                                 const SourceModel& source);

// Exact Poisson draw with mean rate * time from a generator seeded with
// `seed`. Throws DomainError for negative or non-finite inputs.
std::int64_t sample_counts(double rate_cps, double integration_time_s, std::uint64_t seed);

double count_error(std::int64_t counts);

struct EfficiencyBudget {
  std::vector<std::pair<std::string, double>> components;
};

// Product of the component efficiencies. Throws DomainError for an empty
// budget or an entry outside (0, 1].
double overall_efficiency(const EfficiencyBudget& budget);

// Fiber coupling, RG-715 long-pass filter and Si-APD detection efficiency of
// the reference setup.
EfficiencyBudget reference_collection_budget();

// kExpected reports mean counts instead of sampling (infinite-count limit).
enum class CountMode { kPoisson, kExpected };

struct CountRecord {
  std::string label;
  std::optional<AnalyzerSetting> setting;  // present for polarizer scans
  std::int64_t singles_1 = 0;
  std::int64_t singles_2 = 0;
  std::int64_t coincidences = 0;
  double expected_coincidences = 0.0;
  double accidentals_estimate = 0.0;  // accidental counts in this record
  double integration_time_s = 0.0;

  // Counts used by analysis: sampled counts, or the mean in kExpected mode.
  double observed(CountMode mode) const {
    return mode == CountMode::kExpected ? expected_coincidences
                                        : static_cast<double>(coincidences);
  }
};

// Simulate one record for a pair of analyzer kets. The three Poisson draws
// use seeds derived from `seed`.
CountRecord simulate_record(const TwoQubitState& state, const QubitKet& arm1,
                            const QubitKet& arm2, const SourceModel& source, std::uint64_t seed,
                            CountMode mode);

std::vector<CountRecord> simulate_fringe_scan(const TwoQubitState& state, double theta1_deg,
                                              std::span<const double> sweep_deg,
                                              const SourceModel& source, std::uint64_t seed,
                                              CountMode mode = CountMode::kPoisson);

// Fringe points (theta2, counts) and count variances for fit_fringe.
std::vector<FringePoint> fringe_points(std::span<const CountRecord> records, CountMode mode);
std::vector<double> count_variances(std::span<const CountRecord> records, CountMode mode);

// Sixteen records: for each of (a,b), (a,b'), (a',b), (a',b') the four
// polarizer combinations (t1,t2), (t1+90,t2+90), (t1,t2+90), (t1+90,t2).
std::vector<CountRecord> simulate_chsh(const TwoQubitState& state, const ChshSettings& settings,
                                       const SourceModel& source, std::uint64_t seed,
                                       CountMode mode = CountMode::kPoisson);

struct ChshMeasurement {
  std::array<double, 4> correlations{};
  std::array<double, 4> correlation_stderr{};
  double s = 0.0;
  double s_stderr = 0.0;  // Poisson (sqrt N) propagation
};

ChshMeasurement chsh_from_counts(std::span<const CountRecord> records, CountMode mode);

}  // namespace spdcsim
