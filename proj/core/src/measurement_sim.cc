#include "spdcsim/measurement_sim.h"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "spdcsim/errors.h"
#include "spdcsim/random.h"

namespace spdcsim {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("source.{} must be > 0 (got {})", name, value));
  }
}

void require_efficiency(double value, const char* name) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw DomainError(fmt::format("{} must lie in (0, 1] (got {})", name, value));
  }
}

// Probability that arm `which` (0 or 1) passes its analyzer, ignoring the
// other arm.
double marginal_probability(const TwoQubitState& state, const QubitKet& analyzer, int which) {
  const QubitKet h(1.0, 0.0);
  const QubitKet v(0.0, 1.0);
  if (which == 0) {
    return projection_probability(state, analyzer, h) + projection_probability(state, analyzer, v);
  }
  return projection_probability(state, h, analyzer) + projection_probability(state, v, analyzer);
}

std::string angle_label(double t1, double t2) { return fmt::format("{:g}/{:g}", t1, t2); }

}  // namespace

void validate(const SourceModel& source) {
  if (!(source.pair_rate_per_mw >= 0.0) || !std::isfinite(source.pair_rate_per_mw)) {
    throw DomainError("source.pair_rate_per_mw must be >= 0");
  }
  if (!(source.pump_power_mw >= 0.0) || !std::isfinite(source.pump_power_mw)) {
    throw DomainError("source.pump_power_mw must be >= 0");
  }
  require_efficiency(source.arm_efficiency_1, "source.arm_efficiency_1");
  require_efficiency(source.arm_efficiency_2, "source.arm_efficiency_2");
  if (!(source.dark_rate_cps >= 0.0) || !std::isfinite(source.dark_rate_cps)) {
    throw DomainError("source.dark_rate_cps must be >= 0");
  }
  require_positive(source.coincidence_window_ns, "coincidence_window_ns");
  require_positive(source.integration_time_s, "integration_time_s");
}

RateBreakdown expected_rates(const TwoQubitState& state, const QubitKet& arm1,
                             const QubitKet& arm2, const SourceModel& source) {
  const double detected_pairs = source.pair_rate_per_mw * source.pump_power_mw;
  RateBreakdown rates;
  rates.pair_cps = detected_pairs * projection_probability(state, arm1, arm2);
  rates.singles_1_cps =
      detected_pairs * marginal_probability(state, arm1, 0) / source.arm_efficiency_2 +
      source.dark_rate_cps;
  rates.singles_2_cps =
      detected_pairs * marginal_probability(state, arm2, 1) / source.arm_efficiency_1 +
      source.dark_rate_cps;
  rates.accidental_cps =
      rates.singles_1_cps * rates.singles_2_cps * source.coincidence_window_ns * 1e-9;
  return rates;
}

double expected_coincidence_rate(const TwoQubitState& state, const AnalyzerSetting& setting,
                                 const SourceModel& source) {
  return expected_rates(state, analyzer_ket(setting.theta1_deg, setting.qwp1_deg),
                        analyzer_ket(setting.theta2_deg, setting.qwp2_deg), source)
      .coincidence_cps();
}

std::int64_t sample_counts(double rate_cps, double integration_time_s, std::uint64_t seed) {
  if (!(rate_cps >= 0.0) || !std::isfinite(rate_cps)) {
    throw DomainError(fmt::format("sample_counts: rate must be >= 0 (got {})", rate_cps));
  }
  if (!(integration_time_s >= 0.0) || !std::isfinite(integration_time_s)) {
    throw DomainError("sample_counts: integration time must be >= 0");
  }
  const double mean = rate_cps * integration_time_s;
  if (mean == 0.0) return 0;
  std::mt19937_64 engine(seed);
  std::poisson_distribution<std::int64_t> poisson(mean);
  return poisson(engine);
}

double count_error(std::int64_t counts) {
  if (counts < 0) throw DomainError("count_error: counts must be >= 0");
  return std::sqrt(static_cast<double>(counts));
}

double overall_efficiency(const EfficiencyBudget& budget) {
  if (budget.components.empty()) throw DomainError("efficiency budget is empty");
  double product = 1.0;
  for (const auto& [name, eta] : budget.components) {
    require_efficiency(eta, ("budget." + name).c_str());
    product *= eta;
  }
  return product;
}

EfficiencyBudget reference_collection_budget() {
  return {{{"fiber_coupling", 0.526}, {"long_pass_filter", 0.897}, {"detector", 0.60}}};
}

CountRecord simulate_record(const TwoQubitState& state, const QubitKet& arm1,
                            const QubitKet& arm2, const SourceModel& source, std::uint64_t seed,
                            CountMode mode) {
  const RateBreakdown rates = expected_rates(state, arm1, arm2, source);
  const double t = source.integration_time_s;
  CountRecord record;
  record.integration_time_s = t;
  record.expected_coincidences = rates.coincidence_cps() * t;
  record.accidentals_estimate = rates.accidental_cps * t;
  if (mode == CountMode::kExpected) {
    record.coincidences = std::llround(record.expected_coincidences);
    record.singles_1 = std::llround(rates.singles_1_cps * t);
    record.singles_2 = std::llround(rates.singles_2_cps * t);
  } else {
    record.coincidences = sample_counts(rates.coincidence_cps(), t, derive_seed(seed, 0));
    record.singles_1 = sample_counts(rates.singles_1_cps, t, derive_seed(seed, 1));
    record.singles_2 = sample_counts(rates.singles_2_cps, t, derive_seed(seed, 2));
  }
  return record;
}

std::vector<CountRecord> simulate_fringe_scan(const TwoQubitState& state, double theta1_deg,
                                              std::span<const double> sweep_deg,
                                              const SourceModel& source, std::uint64_t seed,
                                              CountMode mode) {
  validate(source);
  if (sweep_deg.empty()) throw DomainError("simulate_fringe_scan: sweep must be nonempty");
  std::vector<CountRecord> records;
  records.reserve(sweep_deg.size());
  const QubitKet arm1 = analyzer_ket(theta1_deg);
  for (std::size_t k = 0; k < sweep_deg.size(); ++k) {
    const double theta2 = sweep_deg[k];
    CountRecord record =
        simulate_record(state, arm1, analyzer_ket(theta2), source, derive_seed(seed, k), mode);
    record.label = angle_label(theta1_deg, theta2);
    record.setting = AnalyzerSetting{theta1_deg, theta2, std::nullopt, std::nullopt};
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<FringePoint> fringe_points(std::span<const CountRecord> records, CountMode mode) {
  std::vector<FringePoint> points;
  points.reserve(records.size());
  for (const auto& record : records) {
    if (!record.setting) throw AnalysisError("fringe_points: record has no analyzer angles");
    points.push_back({record.setting->theta2_deg, record.observed(mode)});
  }
  return points;
}

std::vector<double> count_variances(std::span<const CountRecord> records, CountMode mode) {
  std::vector<double> variances;
  variances.reserve(records.size());
  for (const auto& record : records) variances.push_back(record.observed(mode));
  return variances;
}

std::vector<CountRecord> simulate_chsh(const TwoQubitState& state, const ChshSettings& settings,
                                       const SourceModel& source, std::uint64_t seed,
                                       CountMode mode) {
  validate(source);
  const std::array<std::pair<double, double>, 4> pairs{{{settings.a_deg, settings.b_deg},
                                                        {settings.a_deg, settings.b_prime_deg},
                                                        {settings.a_prime_deg, settings.b_deg},
                                                        {settings.a_prime_deg, settings.b_prime_deg}}};
  std::vector<CountRecord> records;
  records.reserve(16);
  std::uint64_t index = 0;
  for (const auto& [a, b] : pairs) {
    const std::array<std::pair<double, double>, 4> combos{
        {{a, b}, {a + 90.0, b + 90.0}, {a, b + 90.0}, {a + 90.0, b}}};
    for (const auto& [t1, t2] : combos) {
      CountRecord record = simulate_record(state, analyzer_ket(t1), analyzer_ket(t2), source,
                                           derive_seed(seed, index++), mode);
      record.label = angle_label(t1, t2);
      record.setting = AnalyzerSetting{t1, t2, std::nullopt, std::nullopt};
      records.push_back(std::move(record));
    }
  }
  return records;
}

ChshMeasurement chsh_from_counts(std::span<const CountRecord> records, CountMode mode) {
  if (records.size() != 16) {
    throw AnalysisError(fmt::format("chsh_from_counts: expected 16 records, got {}", records.size()));
  }
  ChshMeasurement m;
  double variance_sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double same = records[4 * k].observed(mode) + records[4 * k + 1].observed(mode);
    const double diff = records[4 * k + 2].observed(mode) + records[4 * k + 3].observed(mode);
    const double total = same + diff;
    if (!(total > 0.0)) throw AnalysisError("chsh_from_counts: no coincidences for a setting");
    const double e = (same - diff) / total;
    // dE/dN = (1 - E)/N for same-sign outcomes, (-1 - E)/N otherwise; var N_i = N_i.
    const double variance =
        (same * (1.0 - e) * (1.0 - e) + diff * (1.0 + e) * (1.0 + e)) / (total * total);
    m.correlations[k] = e;
    m.correlation_stderr[k] = std::sqrt(variance);
    variance_sum += variance;
  }
  m.s = chsh_from_correlations(m.correlations);
  m.s_stderr = std::sqrt(variance_sum);
  return m;
}

}  // namespace spdcsim
