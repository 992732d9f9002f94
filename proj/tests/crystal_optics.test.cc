#include "spdcsim/crystal_optics.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

// Reference values from an independent numpy implementation of the same
// Sellmeier and thermo-optic formulas.
TEST(crystal_optics, RefractiveIndexMatchesReference) {
  EXPECT_NEAR(refractive_index(CrystalAxis::kZ, 0.81, 25.0), 1.844367226392699, 1e-12);
  EXPECT_NEAR(refractive_index(CrystalAxis::kY, 0.81, 25.0), 1.756053272484952, 1e-12);
  EXPECT_NEAR(refractive_index(CrystalAxis::kY, 0.405, 25.0), 1.8405819044745724, 1e-12);
  EXPECT_NEAR(refractive_index(CrystalAxis::kZ, 0.81, 92.5), 1.8455879582636998, 1e-12);
}

TEST(crystal_optics, KatoModelMatchesReference) {
  EXPECT_NEAR(refractive_index(CrystalAxis::kZ, 0.81, 25.0, kKtpKato2002), 1.844013469768194,
              1e-12);
  EXPECT_NEAR(refractive_index(CrystalAxis::kY, 0.81, 20.0, kKtpKato2002), 1.7559279078737635,
              1e-12);
}

TEST(crystal_optics, IndexIncreasesWithTemperature) {
  for (double lambda : {0.405, 0.81, 1.55}) {
    for (auto axis : {CrystalAxis::kY, CrystalAxis::kZ}) {
      EXPECT_GT(refractive_index(axis, lambda, 120.0), refractive_index(axis, lambda, 30.0));
    }
  }
}

TEST(crystal_optics, NormalDispersion) {
  for (auto axis : {CrystalAxis::kY, CrystalAxis::kZ}) {
    EXPECT_GT(refractive_index(axis, 0.405, 50.0), refractive_index(axis, 0.81, 50.0));
  }
}

TEST(crystal_optics, RejectsOutOfDomainInputs) {
  EXPECT_THROW(refractive_index(CrystalAxis::kY, 0.2, 25.0), DomainError);
  EXPECT_THROW(refractive_index(CrystalAxis::kY, 5.0, 25.0), DomainError);
  EXPECT_THROW(refractive_index(CrystalAxis::kY, 0.81, 250.0), DomainError);
  EXPECT_THROW(refractive_index(CrystalAxis::kY, 0.81, 25.0, "bbo"), DomainError);
  EXPECT_THROW(refractive_index(CrystalAxis::kY, std::nan(""), 25.0), DomainError);
}

TEST(crystal_optics, ValidateCrystal) {
  CrystalSpec crystal;
  EXPECT_NO_THROW(validate(crystal));
  crystal.length_mm = -1.0;
  EXPECT_THROW(validate(crystal), DomainError);
  crystal = {};
  crystal.poling_period_um = 0.0;
  EXPECT_THROW(validate(crystal), DomainError);
  crystal = {};
  crystal.temperature_c = 201.0;
  EXPECT_THROW(validate(crystal), DomainError);
  crystal = {};
  crystal.axes.idler = CrystalAxis::kY;
  EXPECT_THROW(validate(crystal), DomainError);
}

TEST(crystal_optics, DispersionModelsListed) {
  const auto models = dispersion_models();
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(models[0], kKtpFradkinKonigEmanueli);
  EXPECT_EQ(models[1], kKtpKato2002);
}

TEST(crystal_optics, PolingPeriodExpands) {
  CrystalSpec crystal;
  EXPECT_DOUBLE_EQ(effective_poling_period_um(crystal), 9.825);
  crystal.temperature_c = 125.0;
  EXPECT_NEAR(effective_poling_period_um(crystal), 9.825 * (1.0 + 6.7e-4), 1e-12);
}

TEST(crystal_optics, PhaseMismatchMatchesReference) {
  CrystalSpec crystal;
  crystal.temperature_c = 92.5;
  EXPECT_NEAR(phase_mismatch(0.405, 0.81, 0.81, crystal), 0.0012428074175913524, 1e-12);
}

TEST(crystal_optics, SignalIdlerSwapChangesMismatch) {
  CrystalSpec crystal;
  crystal.temperature_c = 87.30271335693784;
  const double idler = 1.0 / (1.0 / 0.405 - 1.0 / 0.80);
  EXPECT_NEAR(phase_mismatch(0.405, 0.80, idler, crystal), 0.010047488974591203, 1e-12);
  EXPECT_NEAR(phase_mismatch(0.405, idler, 0.80, crystal), -0.010448620642234192, 1e-12);
}

TEST(crystal_optics, PhaseMatchingFunction) {
  EXPECT_NEAR(std::abs(phase_matching_function(0.0, 10.0) - 1.0), 0.0, 1e-15);
  // First zero of sinc(dk L / 2).
  const double zero = 2.0 * std::numbers::pi / 10e3;
  EXPECT_NEAR(std::abs(phase_matching_function(zero, 10.0)), 0.0, 1e-15);
  const double dk = 3e-4;
  const double x = dk * 10e3 / 2.0;
  const auto pmf = phase_matching_function(dk, 10.0);
  EXPECT_NEAR(std::abs(pmf), std::abs(std::sin(x) / x), 1e-15);
  EXPECT_NEAR(std::arg(pmf), x, 1e-12);
  EXPECT_EQ(phase_matching_function(dk, 10.0), phase_matching_function(dk, 10.0));
}

TEST(crystal_optics, DegeneracyTemperatureIsRoot) {
  const auto solution = solve_degenerate_temperature(CrystalSpec{}, 0.405);
  EXPECT_NEAR(solution.temperature_c, 87.30271335693784, 1e-7);
  EXPECT_LT(std::abs(solution.residual_per_um), 1e-9);
  CrystalSpec at_root;
  at_root.temperature_c = solution.temperature_c;
  EXPECT_LT(std::abs(phase_mismatch(0.405, 0.81, 0.81, at_root)), 1e-9);
  EXPECT_LE(solution.iterations, 60);
}

TEST(crystal_optics, DegeneracyTemperatureDependsOnModel) {
  CrystalSpec crystal;
  crystal.dispersion_model = kKtpKato2002;
  EXPECT_NEAR(degenerate_temperature(crystal, 0.405), 127.4, 0.05);
}

TEST(crystal_optics, DegeneracyWithoutRootThrows) {
  CrystalSpec crystal;
  crystal.poling_period_um = 20.0;
  EXPECT_THROW(solve_degenerate_temperature(crystal, 0.405), AnalysisError);
}

TEST(crystal_optics, DegeneracyIgnoresCrystalTemperature) {
  CrystalSpec a;
  CrystalSpec b;
  b.temperature_c = 150.0;
  EXPECT_EQ(degenerate_temperature(a, 0.405), degenerate_temperature(b, 0.405));
}

}  // namespace
}  // namespace spdcsim
