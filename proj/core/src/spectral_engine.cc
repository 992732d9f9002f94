#include "spdcsim/spectral_engine.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

constexpr double kSpeedOfLightNmPerFs = 299.792458;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angular_frequency(double wavelength_nm) {
  return kTwoPi * kSpeedOfLightNmPerFs / wavelength_nm;
}

bool same_axis(const AxisRange& a, const AxisRange& b) {
  return a.min_nm == b.min_nm && a.max_nm == b.max_nm;
}

// x at which the straight line through (x0, y0)-(x1, y1) reaches `level`.
double crossing(double x0, double y0, double x1, double y1, double level) {
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

std::string_view to_string(PumpBandwidth kind) {
  switch (kind) {
    case PumpBandwidth::kIntensityFwhm:
      return "intensity-fwhm";
    case PumpBandwidth::kAmplitudeFwhm:
      return "amplitude-fwhm";
    case PumpBandwidth::kAmplitudeHwhm:
      return "amplitude-hwhm";
  }
  return "unknown";
}

PumpBandwidth parse_pump_bandwidth(std::string_view text) {
  for (auto kind : {PumpBandwidth::kIntensityFwhm, PumpBandwidth::kAmplitudeFwhm,
                    PumpBandwidth::kAmplitudeHwhm}) {
    if (text == to_string(kind)) return kind;
  }
  throw DomainError(fmt::format(
      "pump bandwidth '{}' is not one of intensity-fwhm, amplitude-fwhm, amplitude-hwhm", text));
}

void validate(const PumpSpec& pump) {
  if (!(pump.center_wavelength_nm > 0.0) || !std::isfinite(pump.center_wavelength_nm)) {
    throw DomainError(fmt::format("pump.center_wavelength_nm must be > 0 (got {})",
                                  pump.center_wavelength_nm));
  }
  if (!(pump.fwhm_nm > 0.0) || !std::isfinite(pump.fwhm_nm)) {
    throw DomainError(fmt::format("pump.fwhm_nm must be > 0 (got {})", pump.fwhm_nm));
  }
  const double full_width =
      pump.bandwidth == PumpBandwidth::kAmplitudeHwhm ? 2.0 * pump.fwhm_nm : pump.fwhm_nm;
  if (full_width >= 2.0 * pump.center_wavelength_nm) {
    throw DomainError("pump.fwhm_nm must be small compared to the centre wavelength");
  }
}

PumpSpec simulation_pump_preset() {
  return {405.0, 0.45, PumpEnvelope::kGaussian, PumpBandwidth::kAmplitudeHwhm};
}

PumpSpec measured_diode_pump_preset() {
  return {405.1, 0.53, PumpEnvelope::kGaussian, PumpBandwidth::kIntensityFwhm};
}

double SpectralGrid::signal_nm(int index) const {
  return signal.min_nm + (signal.max_nm - signal.min_nm) * index / (points_per_axis - 1);
}

double SpectralGrid::idler_nm(int index) const {
  return idler.min_nm + (idler.max_nm - idler.min_nm) * index / (points_per_axis - 1);
}

void validate(const SpectralGrid& grid) {
  if (!(grid.signal.min_nm > 0.0) || !(grid.signal.min_nm < grid.signal.max_nm)) {
    throw DomainError("grid: signal range needs 0 < min_nm < max_nm");
  }
  if (!(grid.idler.min_nm > 0.0) || !(grid.idler.min_nm < grid.idler.max_nm)) {
    throw DomainError("grid: idler range needs 0 < min_nm < max_nm");
  }
  if (grid.points_per_axis < 16) {
    throw DomainError(
        fmt::format("grid.points_per_axis must be >= 16 (got {})", grid.points_per_axis));
  }
}

std::complex<double> pump_envelope(double signal_nm, double idler_nm, const PumpSpec& pump) {
  const double center = pump.center_wavelength_nm;
  const double full_width =
      pump.bandwidth == PumpBandwidth::kAmplitudeHwhm ? 2.0 * pump.fwhm_nm : pump.fwhm_nm;
  const double fwhm_omega =
      angular_frequency(center - 0.5 * full_width) - angular_frequency(center + 0.5 * full_width);
  const double sigma = fwhm_omega / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const double detuning =
      angular_frequency(signal_nm) + angular_frequency(idler_nm) - angular_frequency(center);
  // Intensity convention: |alpha|^2 is the Gaussian with the given FWHM.
  const double denominator =
      pump.bandwidth == PumpBandwidth::kIntensityFwhm ? 4.0 * sigma * sigma : 2.0 * sigma * sigma;
  return {std::exp(-detuning * detuning / denominator), 0.0};
}

JointSpectrum compute_jsa(const PumpSpec& pump, const CrystalSpec& crystal,
                          const SpectralGrid& grid) {
  validate(pump);
  validate(crystal);
  validate(grid);

  const int n = grid.points_per_axis;
  JointSpectrum js{grid, Eigen::MatrixXcd(n, n)};
  for (int s = 0; s < n; ++s) {
    const double signal_nm = grid.signal_nm(s);
    for (int i = 0; i < n; ++i) {
      const double idler_nm = grid.idler_nm(i);
      const double pump_nm = 1.0 / (1.0 / signal_nm + 1.0 / idler_nm);
      const double dk = phase_mismatch(pump_nm * 1e-3, signal_nm * 1e-3, idler_nm * 1e-3, crystal);
      js.amplitude(s, i) =
          pump_envelope(signal_nm, idler_nm, pump) * phase_matching_function(dk, crystal.length_mm);
    }
  }
  const double peak = js.amplitude.cwiseAbs().maxCoeff();
  if (peak > 0.0) js.amplitude /= peak;
  return js;
}

SampledSpectrum marginal_spectrum(const JointSpectrum& spectrum, Arm arm) {
  const Eigen::MatrixXd jsi = spectrum.intensity();
  const int n = spectrum.grid.points_per_axis;
  SampledSpectrum out;
  out.wavelength_nm.resize(n);
  out.intensity.resize(n);
  for (int k = 0; k < n; ++k) {
    out.wavelength_nm[k] =
        arm == Arm::kSignal ? spectrum.grid.signal_nm(k) : spectrum.grid.idler_nm(k);
    double sum = 0.0;
    for (int other = 0; other < n; ++other) {
      sum += arm == Arm::kSignal ? jsi(k, other) : jsi(other, k);
    }
    out.intensity[k] = sum;
  }
  const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
  if (peak > 0.0) {
    for (double& v : out.intensity) v /= peak;
  }
  return out;
}

double fwhm(const SampledSpectrum& spectrum) {
  const auto& x = spectrum.wavelength_nm;
  const auto& y = spectrum.intensity;
  if (x.size() != y.size() || x.size() < 3) {
    throw AnalysisError("fwhm: spectrum needs at least three (wavelength, intensity) samples");
  }
  const auto peak_it = std::max_element(y.begin(), y.end());
  const double half = 0.5 * *peak_it;
  if (!(*peak_it > 0.0)) throw AnalysisError("fwhm: spectrum has no positive maximum");

  const auto peak = static_cast<std::size_t>(peak_it - y.begin());
  std::size_t left = peak;
  while (left > 0 && y[left] >= half) --left;
  std::size_t right = peak;
  while (right + 1 < y.size() && y[right] >= half) ++right;
  if (y[left] >= half || y[right] >= half) {
    throw AnalysisError("fwhm: half maximum is not bracketed inside the sampled range");
  }
  const double x_left = crossing(x[left], y[left], x[left + 1], y[left + 1], half);
  const double x_right = crossing(x[right - 1], y[right - 1], x[right], y[right], half);
  return x_right - x_left;
}

SchmidtDecomposition schmidt_decomposition(const JointSpectrum& spectrum) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(spectrum.amplitude);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  const double norm = out.coefficients.norm();
  if (norm > 0.0) out.coefficients /= norm;
  out.purity = out.coefficients.array().pow(4).sum();
  out.schmidt_number = 1.0 / out.purity;
  return out;
}

double hom_visibility(const JointSpectrum& spectrum) {
  if (!same_axis(spectrum.grid.signal, spectrum.grid.idler)) {
    throw DomainError("hom_visibility: signal and idler axes must cover the same window");
  }
  const auto& f = spectrum.amplitude;
  double overlap = 0.0;
  double norm = 0.0;
  for (Eigen::Index s = 0; s < f.rows(); ++s) {
    for (Eigen::Index i = 0; i < f.cols(); ++i) {
      overlap += std::real(f(s, i) * std::conj(f(i, s)));
      norm += std::norm(f(s, i));
    }
  }
  if (!(norm > 0.0)) throw AnalysisError("hom_visibility: spectrum is identically zero");
  return overlap / norm;
}

}  // namespace spdcsim
