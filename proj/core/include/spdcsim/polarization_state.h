#pragma once

// Two-qubit polarization states over the ordered basis {HH, HV, VH, VV},
// polarizer projections, fringes, CHSH and state metrics.
//
// Angles are in degrees at every interface.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace spdcsim {

using Ket = Eigen::Vector4cd;
using QubitKet = Eigen::Vector2cd;
using DensityMatrix = Eigen::Matrix4cd;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

// Visibility needed in every basis for a CHSH violation (1/sqrt(2)).
inline constexpr double kBellViolationVisibility = 0.70710678118654752;

// A validated density matrix: Hermitian, unit trace, positive semidefinite
// within the tolerances above.
class TwoQubitState {
 public:
  // Throws DomainError if `rho` violates an invariant.
  static TwoQubitState from_density_matrix(const DensityMatrix& rho);
  // Normalizes `ket`; throws DomainError for a zero or non-finite ket.
  static TwoQubitState from_ket(const Ket& ket);
  static TwoQubitState maximally_mixed();

  const DensityMatrix& rho() const noexcept { return rho_; }

 private:
  explicit TwoQubitState(const DensityMatrix& rho) : rho_(rho) {}
  DensityMatrix rho_;
};

struct SagnacParams {
  double phi_rad = 0.0;  // relative phase between the two loop directions
  double beta = 1.0;     // amplitude ratio of the counter-clockwise term
};

// Linear polarizer angles per arm, optionally preceded by a quarter-wave
// plate (fast-axis angle) in the same arm.
struct AnalyzerSetting {
  double theta1_deg = 0.0;
  double theta2_deg = 0.0;
  std::optional<double> qwp1_deg;
  std::optional<double> qwp2_deg;
};

// (|HV> + e^{i phi} beta |VH>) / sqrt(1 + beta^2)
Ket sagnac_ket(const SagnacParams& params);
TwoQubitState sagnac_state(const SagnacParams& params);

Ket psi_plus();   // (|HV> + |VH>) / sqrt 2
Ket psi_minus();  // (|HV> - |VH>) / sqrt 2

// v rho + (1 - v) I/4, 0 <= v <= 1.
TwoQubitState mix_with_white_noise(const TwoQubitState& state, double v);

// Single-qubit state transmitted by the analyzer: cos t |H> + sin t |V>,
// mapped back through the wave plate when one is present.
QubitKet analyzer_ket(double theta_deg, std::optional<double> qwp_deg = std::nullopt);

// <a1 a2| rho |a1 a2>
double projection_probability(const TwoQubitState& state, const QubitKet& arm1,
                              const QubitKet& arm2);
double coincidence_probability(const TwoQubitState& state, const AnalyzerSetting& setting);

struct FringePoint {
  double theta2_deg = 0.0;
  double value = 0.0;
};

std::vector<FringePoint> fringe_curve(const TwoQubitState& state, double theta1_deg,
                                      std::span<const double> sweep_deg);

// Least-squares fit of A + B sin^2(theta2 - theta0), done linearly as
// c0 + c1 cos 2 theta2 + c2 sin 2 theta2. Visibility B / (B + 2A).
struct FringeFit {
  double offset = 0.0;     // A
  double amplitude = 0.0;  // B
  double phase_deg = 0.0;  // theta0
  double visibility = 0.0;
  double visibility_stderr = 0.0;  // from `variances`; 0 when unweighted
};

// `variances` (optional, one per point) weights the fit and propagates to
// visibility_stderr. Throws AnalysisError when the sweep spans less than
// 180 degrees, has fewer than three points, or the fitted max + min is 0.
FringeFit fit_fringe(std::span<const FringePoint> curve, std::span<const double> variances = {});
double visibility(std::span<const FringePoint> curve);

// E(a, b) = P(a,b) + P(a+90,b+90) - P(a,b+90) - P(a+90,b)
double correlation(const TwoQubitState& state, double a_deg, double b_deg);

struct ChshSettings {
  double a_deg = 0.0;
  double a_prime_deg = 45.0;
  double b_deg = 22.5;
  double b_prime_deg = 67.5;
};

// "psi-minus" (0, 45, 22.5, 67.5) or "psi-plus" (0, 45, 22.5, -22.5).
ChshSettings chsh_preset(std::string_view name);

// Correlations ordered (a,b), (a,b'), (a',b), (a',b'). Returns the maximum
// over the four placements of a single minus sign of |sum +- E|.
double chsh_from_correlations(const std::array<double, 4>& correlations);
// Index (0..3) of the correlation carrying the minus sign in the maximizing
// placement.
int chsh_minus_index(const std::array<double, 4>& correlations);
double chsh_s(const TwoQubitState& state, const ChshSettings& settings);

// <psi| rho |psi>; throws DomainError if |psi| differs from 1 by > 1e-9.
double fidelity_to_pure(const TwoQubitState& state, const Ket& target);
// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const TwoQubitState& rho, const TwoQubitState& sigma);
// Wootters concurrence.
double concurrence(const TwoQubitState& state);

}  // namespace spdcsim
