#include "spdcsim/crystal_optics.h"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Thermo-optic polynomial sum_m a_m / lambda^m.
double inverse_power_series(const std::array<double, 4>& a, double wavelength_um) {
  double value = 0.0;
  double inv = 1.0;
  for (double coefficient : a) {
    value += coefficient * inv;
    inv /= wavelength_um;
  }
  return value;
}

double fradkin_konig_emanueli(CrystalAxis axis, double l, double t) {
  const double l2 = l * l;
  const double dt = t - 25.0;
  if (axis == CrystalAxis::kY) {
    const double n2 = 2.09930 + 0.922683 / (1.0 - 0.0467695 / l2) - 0.0138408 * l2;
    constexpr std::array<double, 4> first{6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6};
    constexpr std::array<double, 4> second{-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8};
    return std::sqrt(n2) + inverse_power_series(first, l) * dt +
           inverse_power_series(second, l) * dt * dt;
  }
  const double n2 = 2.12725 + 1.18431 / (1.0 - 0.0514852 / l2) +
                    0.6603 / (1.0 - 100.00507 / l2) - 9.68956e-3 * l2;
  constexpr std::array<double, 4> first{9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6};
  constexpr std::array<double, 4> second{-1.1882e-8, 10.459e-8, -9.8136e-8, 3.1481e-8};
  return std::sqrt(n2) + inverse_power_series(first, l) * dt +
         inverse_power_series(second, l) * dt * dt;
}

double kato2002(CrystalAxis axis, double l, double t) {
  const double l2 = l * l;
  const double dt = t - 20.0;
  if (axis == CrystalAxis::kY) {
    const double n2 = 3.45018 + 0.04341 / (l2 - 0.04597) + 16.98825 / (l2 - 39.43799);
    const double dndt = (0.5014 / (l2 * l) - 2.0030 / l2 + 3.3016 / l + 0.7498) * 1e-5;
    return std::sqrt(n2) + dndt * dt;
  }
  const double n2 = 4.59423 + 0.06206 / (l2 - 0.04763) + 110.80672 / (l2 - 86.12171);
  const double dndt = (0.3896 / (l2 * l) - 1.3332 / l2 + 2.2762 / l + 2.1151) * 1e-5;
  return std::sqrt(n2) + dndt * dt;
}

void check_temperature(double temperature_c, const char* name) {
  if (!std::isfinite(temperature_c) || temperature_c < kMinTemperatureC ||
      temperature_c > kMaxTemperatureC) {
    throw DomainError(fmt::format("{} = {} C is outside the oven range [{}, {}] C", name,
                                  temperature_c, kMinTemperatureC, kMaxTemperatureC));
  }
}

}  // namespace

void validate(const CrystalSpec& crystal) {
  if (!(crystal.length_mm > 0.0) || !std::isfinite(crystal.length_mm)) {
    throw DomainError(fmt::format("crystal.length_mm must be > 0 (got {})", crystal.length_mm));
  }
  if (!(crystal.poling_period_um > 0.0) || !std::isfinite(crystal.poling_period_um)) {
    throw DomainError(fmt::format("crystal.poling_period_um must be > 0 (got {})",
                                  crystal.poling_period_um));
  }
  check_temperature(crystal.temperature_c, "crystal.temperature_c");
  const QpmAxes type_ii{};
  if (crystal.axes.pump != type_ii.pump || crystal.axes.signal != type_ii.signal ||
      crystal.axes.idler != type_ii.idler) {
    throw DomainError("crystal.axes: only type-II y -> y + z is supported");
  }
  // Throws for unknown identifiers.
  (void)refractive_index(CrystalAxis::kY, 0.81, crystal.temperature_c, crystal.dispersion_model);
}

std::vector<std::string> dispersion_models() {
  return {std::string(kKtpFradkinKonigEmanueli), std::string(kKtpKato2002)};
}

double refractive_index(CrystalAxis axis, double wavelength_um, double temperature_c,
                        std::string_view model) {
  if (!std::isfinite(wavelength_um) || wavelength_um < kMinWavelengthUm ||
      wavelength_um > kMaxWavelengthUm) {
    throw DomainError(fmt::format("wavelength_um = {} is outside the dispersion window [{}, {}] um",
                                  wavelength_um, kMinWavelengthUm, kMaxWavelengthUm));
  }
  check_temperature(temperature_c, "temperature_c");
  if (model == kKtpFradkinKonigEmanueli) {
    return fradkin_konig_emanueli(axis, wavelength_um, temperature_c);
  }
  if (model == kKtpKato2002) {
    return kato2002(axis, wavelength_um, temperature_c);
  }
  throw DomainError(fmt::format("dispersion_model '{}' is not registered", model));
}

double effective_poling_period_um(const CrystalSpec& crystal) {
  return crystal.poling_period_um *
         (1.0 + kPolingExpansionPerKelvin * (crystal.temperature_c - kPolingReferenceTemperatureC));
}

double phase_mismatch(double pump_um, double signal_um, double idler_um,
                      const CrystalSpec& crystal) {
  const double t = crystal.temperature_c;
  const auto& model = crystal.dispersion_model;
  const double np = refractive_index(crystal.axes.pump, pump_um, t, model);
  const double ns = refractive_index(crystal.axes.signal, signal_um, t, model);
  const double ni = refractive_index(crystal.axes.idler, idler_um, t, model);
  return kTwoPi * (np / pump_um - ns / signal_um - ni / idler_um -
                   1.0 / effective_poling_period_um(crystal));
}

std::complex<double> phase_matching_function(double delta_k_per_um, double length_mm) {
  const double x = 0.5 * delta_k_per_um * length_mm * 1e3;
  const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
  return sinc * std::polar(1.0, x);
}

DegeneracySolution solve_degenerate_temperature(const CrystalSpec& crystal, double pump_um) {
  constexpr int kMaxIterations = 60;
  constexpr double kBracketTolerance = 1e-10;  // C
  constexpr double kResidualTolerance = 1e-12; // rad/um

  CrystalSpec probe = crystal;
  auto mismatch_at = [&](double t) {
    probe.temperature_c = t;
    return phase_mismatch(pump_um, 2.0 * pump_um, 2.0 * pump_um, probe);
  };

  double lo = kMinTemperatureC;
  double hi = kMaxTemperatureC;
  double f_lo = mismatch_at(lo);
  const double f_hi = mismatch_at(hi);
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw AnalysisError(fmt::format(
        "no phase-matching root for pump {} um in [{}, {}] C (dk = {} .. {} rad/um)", pump_um,
        kMinTemperatureC, kMaxTemperatureC, f_lo, f_hi));
  }

  DegeneracySolution solution;
  double mid = 0.5 * (lo + hi);
  double f_mid = mismatch_at(mid);
  for (solution.iterations = 1; solution.iterations < kMaxIterations; ++solution.iterations) {
    if (std::abs(f_mid) < kResidualTolerance || hi - lo < kBracketTolerance) break;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    f_mid = mismatch_at(mid);
  }
  solution.temperature_c = mid;
  solution.residual_per_um = f_mid;
  return solution;
}

}  // namespace spdcsim
