#pragma once

// Two-qubit polarization tomography: projector sets, simulated count sets,
// linear inversion and maximum-likelihood reconstruction.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "spdcsim/measurement_sim.h"
#include "spdcsim/polarization_state.h"

namespace spdcsim {

struct Projector {
  std::string label;  // e.g. "HV": arm 1 onto H, arm 2 onto V
  QubitKet arm1;
  QubitKet arm2;

  Ket ket() const;
};

// Single-qubit analyzer states used by the presets:
//   H = |H>, V = |V>, D = (|H> + |V>)/sqrt2, A = (|H> - |V>)/sqrt2,
//   R = (|H> - i|V>)/sqrt2, L = (|H> + i|V>)/sqrt2.
QubitKet polarization_ket(char name);

class ProjectorSet {
 public:
  // Throws AnalysisError unless every ket is unit norm, there are at least
  // 16 settings and the probability map has rank 16.
  explicit ProjectorSet(std::vector<Projector> projectors);

  // The 16-row James-Kwiat table:
  //   HH HV VV VH RH RV DV DH DR DD RD HD VD VL HL RL
  static ProjectorSet standard16();
  // All 36 pairs of {H, V, D, A, R, L}.
  static ProjectorSet full36();
  // "standard-16" or "full-36".
  static ProjectorSet from_name(std::string_view name);

  const std::vector<Projector>& projectors() const noexcept { return projectors_; }
  std::size_t size() const noexcept { return projectors_.size(); }

  // K x 16 real matrix mapping Pauli coordinates r (rho = sum r_ij s_i x s_j / 4)
  // to <psi_k| rho |psi_k>.
  const Eigen::MatrixXd& probability_map() const noexcept { return map_; }

 private:
  std::vector<Projector> projectors_;
  Eigen::MatrixXd map_;
};

std::vector<CountRecord> simulate_tomography(const TwoQubitState& state,
                                             const ProjectorSet& projectors,
                                             const SourceModel& source, std::uint64_t seed,
                                             CountMode mode = CountMode::kPoisson);

// Counts in projector order, matched by record label. Throws AnalysisError
// for a missing or duplicated label.
std::vector<double> counts_for(std::span<const CountRecord> records,
                               const ProjectorSet& projectors, CountMode mode);

// Least-squares inversion of the linear probability map followed by
// Hermitian symmetrization and unit-trace normalization. Not necessarily
// positive semidefinite.
Eigen::Matrix4cd linear_inversion(std::span<const double> counts, const ProjectorSet& projectors);

// Clip negative eigenvalues of a Hermitian matrix and renormalize.
TwoQubitState project_to_physical(const Eigen::Matrix4cd& matrix);

// Poisson log-likelihood sum n ln mu - mu, mu_k = N <psi_k|rho|psi_k>, with
// the global exposure N at its closed-form optimum sum n / sum p.
double poisson_log_likelihood(std::span<const double> counts, const ProjectorSet& projectors,
                              const TwoQubitState& state);

struct MleOptions {
  int max_iterations = 10000;
  // Off by default: near a rank-deficient optimum the small eigenvalues of
  // T^+ T shrink slowly, so per-step gains can be tiny long before the
  // state has converged (noticeably so for small count totals).
  double likelihood_tolerance = 0.0;
  double step_tolerance = 1e-9;
  bool record_history = false;
};

struct TomographyResult {
  TwoQubitState rho = TwoQubitState::maximally_mixed();
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> fidelity_vs_target;
  std::optional<double> fidelity_std;
  // mle_objective after every accepted step (log-likelihood up to a
  // count-dependent constant); filled when record_history is set.
  std::vector<double> likelihood_history;
};

// Maximizes the Poisson likelihood over rho = T^+ T / tr(T^+ T) with T lower
// triangular (16 real parameters) by BFGS with a backtracking line search,
// starting from the physical projection of linear_inversion.
TomographyResult mle_reconstruct(std::span<const double> counts, const ProjectorSet& projectors,
                                 const MleOptions& options = {});

struct FidelityEstimate {
  double mean = 0.0;
  double std = 0.0;
  int trials = 0;
};

// Parametric bootstrap: each trial redraws every count as Poisson(observed)
// (trial seed derived from seed and trial index), reconstructs and records
// the fidelity to `target`. With CountMode::kExpected the counts are used
// as-is in every trial.
FidelityEstimate monte_carlo_fidelity(std::span<const double> counts,
                                      const ProjectorSet& projectors, const Ket& target,
                                      int trials, std::uint64_t seed,
                                      CountMode mode = CountMode::kPoisson,
                                      const MleOptions& options = {});

// Exposed for tests: parameter vector <-> triangular factor.
Eigen::Matrix4cd cholesky_factor_from_parameters(const Eigen::Matrix<double, 16, 1>& t);
Eigen::Matrix<double, 16, 1> parameters_from_state(const TwoQubitState& state);
// Objective maximized by mle_reconstruct (log-likelihood up to a constant)
// and its analytic gradient.
double mle_objective(const Eigen::Matrix<double, 16, 1>& t, std::span<const double> counts,
                     const ProjectorSet& projectors,
                     Eigen::Matrix<double, 16, 1>* gradient = nullptr);

}  // namespace spdcsim
