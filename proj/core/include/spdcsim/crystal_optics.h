#pragma once

// Dispersion and quasi-phase-matching for periodically poled KTP under
// collinear type-II (y -> y + z) down-conversion.
//
// Units: wavelengths in micrometres, temperatures in degrees Celsius, wave
// vector mismatch in rad/um, crystal length in millimetres.

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace spdcsim {

enum class CrystalAxis { kY, kZ };

// Polarization assignment of the three interacting fields. Only the KTP
// type-II process used by the source is supported: pump and signal on y,
// idler on z.
struct QpmAxes {
  CrystalAxis pump = CrystalAxis::kY;
  CrystalAxis signal = CrystalAxis::kY;
  CrystalAxis idler = CrystalAxis::kZ;
};

// Fradkin (n_z) + Koenig & Wong (n_y) room-temperature Sellmeier equations
// with the Emanueli & Arie second-order thermo-optic correction.
inline constexpr std::string_view kKtpFradkinKonigEmanueli = "ktp-fradkin-konig-emanueli";
// Kato & Takaoka 2002 Sellmeier and first-order thermo-optic coefficients.
inline constexpr std::string_view kKtpKato2002 = "ktp-kato2002";
inline constexpr std::string_view kDefaultDispersionModel = kKtpFradkinKonigEmanueli;

inline constexpr double kMinWavelengthUm = 0.35;
inline constexpr double kMaxWavelengthUm = 4.0;
inline constexpr double kMinTemperatureC = 0.0;
inline constexpr double kMaxTemperatureC = 200.0;

// Linear thermal expansion of KTP along the poling (x) axis, applied to the
// poling period relative to kPolingReferenceTemperatureC.
inline constexpr double kPolingExpansionPerKelvin = 6.7e-6;
inline constexpr double kPolingReferenceTemperatureC = 25.0;

struct CrystalSpec {
  double length_mm = 10.0;
  double poling_period_um = 9.825;
  double temperature_c = 25.0;
  QpmAxes axes{};
  std::string dispersion_model{kDefaultDispersionModel};
};

// Throws DomainError naming the first violated invariant.
void validate(const CrystalSpec& crystal);

// Identifiers accepted by refractive_index.
std::vector<std::string> dispersion_models();

double refractive_index(CrystalAxis axis, double wavelength_um, double temperature_c,
                        std::string_view model = kDefaultDispersionModel);

// Poling period at the crystal temperature.
double effective_poling_period_um(const CrystalSpec& crystal);

// dk = 2 pi (n_p/lp - n_s/ls - n_i/li - 1/period_eff) in rad/um. Energy
// conservation between the three wavelengths is not required.
double phase_mismatch(double pump_um, double signal_um, double idler_um,
                      const CrystalSpec& crystal);

// sinc(dk L / 2) exp(i dk L / 2), with sinc(x) = sin(x)/x.
std::complex<double> phase_matching_function(double delta_k_per_um, double length_mm);

struct DegeneracySolution {
  double temperature_c = 0.0;
  double residual_per_um = 0.0;  // phase_mismatch at the returned temperature
  int iterations = 0;
};

// Oven temperature at which pump_um -> 2 pump_um + 2 pump_um is phase
// matched. Bisection over [0, 200] C; throws AnalysisError when dk does not
// change sign in that range. The crystal's own temperature_c is ignored.
DegeneracySolution solve_degenerate_temperature(const CrystalSpec& crystal, double pump_um);

inline double degenerate_temperature(const CrystalSpec& crystal, double pump_um) {
  return solve_degenerate_temperature(crystal, pump_um).temperature_c;
}

}  // namespace spdcsim
