#include "spdcsim/spectral_engine.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "gtest/gtest.h"
#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

constexpr double kC = 299.792458;  // nm / fs

CrystalSpec degenerate_crystal() {
  CrystalSpec crystal;
  crystal.temperature_c = degenerate_temperature(crystal, 0.405);
  return crystal;
}

SpectralGrid grid_of(int points) {
  SpectralGrid grid;
  grid.points_per_axis = points;
  return grid;
}

PumpSpec pump_with(PumpBandwidth kind) {
  PumpSpec pump;
  pump.bandwidth = kind;
  return pump;
}

// |alpha| at a pump detuning of `offset` full widths (in angular frequency).
double envelope_at(const PumpSpec& pump, double full_width_nm, double offset) {
  const double w0 = 2 * std::numbers::pi * kC / pump.center_wavelength_nm;
  const double fw = 2 * std::numbers::pi * kC *
                    (1 / (pump.center_wavelength_nm - full_width_nm / 2) -
                     1 / (pump.center_wavelength_nm + full_width_nm / 2));
  const double pump_nm = 2 * std::numbers::pi * kC / (w0 + offset * fw);
  return std::abs(pump_envelope(2 * pump_nm, 2 * pump_nm, pump));
}

TEST(spectral_engine, PumpEnvelopePeaksAtCenter) {
  const PumpSpec pump;
  EXPECT_DOUBLE_EQ(std::abs(pump_envelope(810.0, 810.0, pump)), 1.0);
  EXPECT_EQ(std::arg(pump_envelope(805.0, 815.0, pump)), 0.0);
}

TEST(spectral_engine, PumpBandwidthConventions) {
  EXPECT_NEAR(std::pow(envelope_at(pump_with(PumpBandwidth::kIntensityFwhm), 0.45, 0.5), 2), 0.5,
              1e-12);
  EXPECT_NEAR(envelope_at(pump_with(PumpBandwidth::kAmplitudeFwhm), 0.45, 0.5), 0.5, 1e-12);
  EXPECT_NEAR(envelope_at(pump_with(PumpBandwidth::kAmplitudeHwhm), 0.9, 0.5), 0.5, 1e-12);
}

TEST(spectral_engine, PumpBandwidthNames) {
  for (auto kind : {PumpBandwidth::kIntensityFwhm, PumpBandwidth::kAmplitudeFwhm,
                    PumpBandwidth::kAmplitudeHwhm}) {
    EXPECT_EQ(parse_pump_bandwidth(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_pump_bandwidth("fwhm"), DomainError);
}

TEST(spectral_engine, Presets) {
  const auto sim = simulation_pump_preset();
  EXPECT_EQ(sim.center_wavelength_nm, 405.0);
  EXPECT_EQ(sim.fwhm_nm, 0.45);
  EXPECT_EQ(sim.bandwidth, PumpBandwidth::kAmplitudeHwhm);
  const auto ld = measured_diode_pump_preset();
  EXPECT_EQ(ld.center_wavelength_nm, 405.1);
  EXPECT_EQ(ld.fwhm_nm, 0.53);
  EXPECT_EQ(ld.bandwidth, PumpBandwidth::kIntensityFwhm);
}

TEST(spectral_engine, ValidatesInputs) {
  PumpSpec pump;
  pump.fwhm_nm = 0.0;
  EXPECT_THROW(validate(pump), DomainError);
  SpectralGrid grid = grid_of(8);
  EXPECT_THROW(validate(grid), DomainError);
  grid = grid_of(64);
  grid.signal.max_nm = grid.signal.min_nm;
  EXPECT_THROW(validate(grid), DomainError);
}

TEST(spectral_engine, JsaShapeAndNormalization) {
  const auto jsa = compute_jsa(PumpSpec{}, degenerate_crystal(), grid_of(64));
  ASSERT_EQ(jsa.amplitude.rows(), 64);
  ASSERT_EQ(jsa.amplitude.cols(), 64);
  EXPECT_DOUBLE_EQ(jsa.amplitude.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(jsa.grid.signal_nm(0), 790.0);
  EXPECT_DOUBLE_EQ(jsa.grid.signal_nm(63), 830.0);
}

TEST(spectral_engine, JsaIsDeterministic) {
  const auto a = compute_jsa(PumpSpec{}, degenerate_crystal(), grid_of(96));
  const auto b = compute_jsa(PumpSpec{}, degenerate_crystal(), grid_of(96));
  EXPECT_TRUE((a.amplitude.array() == b.amplitude.array()).all());
}

struct Reference {
  PumpBandwidth kind;
  double signal_fwhm;
  double idler_fwhm;
  double purity;
  double hom;
};

void PrintTo(const Reference& ref, std::ostream* os) { *os << to_string(ref.kind); }

// numpy evaluation of the same JSA at 256 x 256 on 790-830 nm.
class SpectrumReference : public ::testing::TestWithParam<Reference> {};

TEST_P(SpectrumReference, MatchesIndependentEvaluation) {
  const auto ref = GetParam();
  const auto jsa = compute_jsa(pump_with(ref.kind), degenerate_crystal(), grid_of(256));
  EXPECT_NEAR(fwhm(marginal_spectrum(jsa, Arm::kSignal)), ref.signal_fwhm, 1e-7);
  EXPECT_NEAR(fwhm(marginal_spectrum(jsa, Arm::kIdler)), ref.idler_fwhm, 1e-7);
  const auto schmidt = schmidt_decomposition(jsa);
  EXPECT_NEAR(schmidt.purity, ref.purity, 1e-9);
  EXPECT_NEAR(schmidt.schmidt_number, 1.0 / ref.purity, 1e-6);
  EXPECT_NEAR(hom_visibility(jsa), ref.hom, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(
    spectral_engine, SpectrumReference,
    ::testing::Values(
        Reference{PumpBandwidth::kIntensityFwhm, 3.80956266710848, 5.605518485527682,
                  0.0346633956138346, 0.0016154415416542935},
        Reference{PumpBandwidth::kAmplitudeFwhm, 2.734347209227394, 4.000885008797582,
                  0.04773839536037025, 0.0016099914442448964},
        Reference{PumpBandwidth::kAmplitudeHwhm, 5.3345909710660635, 7.877579169464639,
                  0.024964097598196712, 0.0016280973224380739}),
    [](const auto& info) {
      std::string name(to_string(info.param.kind));
      std::replace(name.begin(), name.end(), '-', '_');
      return name;
    });

TEST(spectral_engine, SignalNarrowerThanIdler) {
  for (auto kind : {PumpBandwidth::kIntensityFwhm, PumpBandwidth::kAmplitudeHwhm}) {
    const auto jsa = compute_jsa(pump_with(kind), degenerate_crystal(), grid_of(256));
    EXPECT_LT(fwhm(marginal_spectrum(jsa, Arm::kSignal)), fwhm(marginal_spectrum(jsa, Arm::kIdler)));
  }
}

TEST(spectral_engine, FwhmOfSampledGaussian) {
  SampledSpectrum g;
  const double sigma = 1.7;
  for (int k = 0; k <= 2000; ++k) {
    const double x = 790.0 + 0.02 * k;
    g.wavelength_nm.push_back(x);
    g.intensity.push_back(std::exp(-(x - 810.0) * (x - 810.0) / (2 * sigma * sigma)));
  }
  EXPECT_NEAR(fwhm(g), 2 * std::sqrt(2 * std::numbers::ln2) * sigma, 1e-4);
}

TEST(spectral_engine, ClippedSpectrumIsAnError) {
  SpectralGrid grid = grid_of(64);
  grid.signal = {808.0, 812.0};
  grid.idler = {808.0, 812.0};
  const auto jsa = compute_jsa(PumpSpec{}, degenerate_crystal(), grid);
  EXPECT_THROW(fwhm(marginal_spectrum(jsa, Arm::kIdler)), AnalysisError);
}

TEST(spectral_engine, SeparableSpectrumIsPure) {
  const SpectralGrid grid = grid_of(32);
  Eigen::VectorXcd u(32), v(32);
  for (int k = 0; k < 32; ++k) {
    u(k) = std::exp(-0.01 * (k - 12) * (k - 12));
    v(k) = std::polar(1.0 / (1 + k), 0.1 * k);
  }
  const JointSpectrum js{grid, u * v.transpose()};
  const auto schmidt = schmidt_decomposition(js);
  EXPECT_NEAR(schmidt.purity, 1.0, 1e-12);
  EXPECT_NEAR(schmidt.coefficients.squaredNorm(), 1.0, 1e-12);
}

TEST(spectral_engine, SymmetricSpectrumHasUnitHomVisibility) {
  const SpectralGrid grid = grid_of(32);
  Eigen::MatrixXcd f(32, 32);
  for (int s = 0; s < 32; ++s) {
    for (int i = 0; i < 32; ++i) f(s, i) = std::exp(-0.02 * (s - i) * (s - i) - 0.001 * (s + i));
  }
  EXPECT_NEAR(hom_visibility(JointSpectrum{grid, f}), 1.0, 1e-12);
}

TEST(spectral_engine, HomRequiresMatchingAxes) {
  SpectralGrid grid = grid_of(32);
  grid.idler = {800.0, 840.0};
  const JointSpectrum js{grid, Eigen::MatrixXcd::Ones(32, 32)};
  EXPECT_THROW(hom_visibility(js), DomainError);
}

}  // namespace
}  // namespace spdcsim
