#include "spdcsim/tomography.h"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "spdcsim/errors.h"
#include "spdcsim/random.h"

namespace spdcsim {
namespace {

using cd = std::complex<double>;
using Params = Eigen::Matrix<double, 16, 1>;

constexpr std::array<std::pair<int, int>, 6> kOffDiagonal{
    {{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}}};

std::array<Eigen::Matrix2cd, 4> paulis() {
  std::array<Eigen::Matrix2cd, 4> s;
  s[0] << 1, 0, 0, 1;
  s[1] << 0, 1, 1, 0;
  s[2] << 0, cd(0, -1), cd(0, 1), 0;
  s[3] << 1, 0, 0, -1;
  return s;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

const std::array<Eigen::Matrix4cd, 16>& pauli_basis() {
  static const std::array<Eigen::Matrix4cd, 16> basis = [] {
    const auto s = paulis();
    std::array<Eigen::Matrix4cd, 16> b;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) b[4 * i + j] = kron(s[i], s[j]);
    }
    return b;
  }();
  return basis;
}

void check_counts(std::span<const double> counts, const ProjectorSet& projectors) {
  if (counts.size() != projectors.size()) {
    throw AnalysisError(fmt::format("{} counts given for {} projectors", counts.size(),
                                    projectors.size()));
  }
  double total = 0.0;
  for (double n : counts) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw AnalysisError("counts must be finite and >= 0");
    total += n;
  }
  if (!(total > 0.0)) throw AnalysisError("total counts must be > 0");
}

std::vector<Ket> projector_kets(const ProjectorSet& projectors) {
  std::vector<Ket> kets;
  kets.reserve(projectors.size());
  for (const auto& p : projectors.projectors()) kets.push_back(p.ket());
  return kets;
}

double objective(const Params& t, std::span<const double> counts, const std::vector<Ket>& kets,
                 Params* gradient) {
  const Eigen::Matrix4cd factor = cholesky_factor_from_parameters(t);
  std::vector<Eigen::Vector4cd> mapped(kets.size());
  std::vector<double> q(kets.size());
  double total_q = 0.0;
  double total_n = 0.0;
  for (std::size_t k = 0; k < kets.size(); ++k) {
    mapped[k] = factor * kets[k];
    q[k] = mapped[k].squaredNorm();
    total_q += q[k];
    total_n += counts[k];
  }
  double value = -total_n * std::log(total_q);
  for (std::size_t k = 0; k < kets.size(); ++k) {
    if (counts[k] > 0.0) value += counts[k] * std::log(q[k]);
  }
  if (gradient != nullptr) {
    Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
    for (std::size_t k = 0; k < kets.size(); ++k) {
      const double c = (counts[k] > 0.0 ? counts[k] / q[k] : 0.0) - total_n / total_q;
      g += c * mapped[k] * kets[k].adjoint();
    }
    for (int a = 0; a < 4; ++a) (*gradient)(a) = 2.0 * g(a, a).real();
    for (std::size_t m = 0; m < kOffDiagonal.size(); ++m) {
      const auto [r, c] = kOffDiagonal[m];
      (*gradient)(4 + 2 * m) = 2.0 * g(r, c).real();
      (*gradient)(5 + 2 * m) = 2.0 * g(r, c).imag();
    }
  }
  return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
}

Params numerical_gradient(const Params& t, std::span<const double> counts,
                          const std::vector<Ket>& kets) {
  Params g;
  for (int i = 0; i < 16; ++i) {
    const double h = 1e-7 * std::max(1.0, std::abs(t(i)));
    Params up = t;
    Params down = t;
    up(i) += h;
    down(i) -= h;
    g(i) = (objective(up, counts, kets, nullptr) - objective(down, counts, kets, nullptr)) /
           (2.0 * h);
  }
  return g;
}

TwoQubitState state_from_parameters(const Params& t) {
  const Eigen::Matrix4cd factor = cholesky_factor_from_parameters(t);
  Eigen::Matrix4cd rho = factor.adjoint() * factor;
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return TwoQubitState::from_density_matrix(rho);
}

TomographyResult reconstruct(std::span<const double> counts, const ProjectorSet& projectors,
                             const std::vector<Ket>& kets, const MleOptions& options) {
  const TwoQubitState linear = project_to_physical(linear_inversion(counts, projectors));
  // Keep the starting point full rank so every ln q_k is finite.
  constexpr double kStartMixing = 1e-3;
  Params t = parameters_from_state(TwoQubitState::from_density_matrix(
      (1.0 - kStartMixing) * linear.rho() + kStartMixing * DensityMatrix::Identity() / 4.0));

  TomographyResult result;
  auto evaluate = [&](const Params& x, Params& g) {
    const double value = objective(x, counts, kets, &g);
    if (std::isfinite(value) && !g.allFinite()) g = numerical_gradient(x, counts, kets);
    return value;
  };

  Params grad;
  double value = evaluate(t, grad);
  if (options.record_history) result.likelihood_history.push_back(value);
  Eigen::Matrix<double, 16, 16> inverse_hessian = Eigen::Matrix<double, 16, 16>::Identity();
  bool scaled = false;

  for (result.iterations = 0; result.iterations < options.max_iterations;) {
    ++result.iterations;
    // Ascent direction on the log-likelihood.
    Params direction = inverse_hessian * grad;
    double slope = grad.dot(direction);
    if (!(slope > 0.0)) {
      inverse_hessian.setIdentity();
      direction = grad;
      slope = grad.squaredNorm();
    }
    if (!scaled) {
      // First step: unit parameter move along the gradient.
      const double gn = grad.norm();
      if (gn > 0.0) {
        direction /= gn;
        slope /= gn;
      }
    }

    double alpha = 1.0;
    Params trial;
    Params trial_grad;
    double trial_value = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, alpha *= 0.5) {
      trial = t + alpha * direction;
      trial_value = evaluate(trial, trial_grad);
      if (std::isfinite(trial_value) && trial_value >= value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent possible at machine precision: stationary point.
      result.converged = true;
      break;
    }

    const Params s = trial - t;
    const Params y = grad - trial_grad;  // gradient of the minimized -L
    const double improvement = trial_value - value;
    t = trial;
    value = trial_value;
    grad = trial_grad;
    if (options.record_history) result.likelihood_history.push_back(value);

    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        inverse_hessian *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::Matrix<double, 16, 16> eye = Eigen::Matrix<double, 16, 16>::Identity();
      inverse_hessian = (eye - rho * s * y.transpose()) * inverse_hessian *
                            (eye - rho * y * s.transpose()) +
                        rho * s * s.transpose();
    }

    // The objective is invariant under t -> c t; keep the scale bounded.
    const double norm = t.norm();
    if (norm < 0.5 || norm > 2.0) {
      t /= norm;
      grad *= norm;
      inverse_hessian.setIdentity();
      scaled = false;
    }

    if (improvement < options.likelihood_tolerance || s.norm() < options.step_tolerance) {
      result.converged = true;
      break;
    }
  }

  result.rho = state_from_parameters(t);
  result.log_likelihood = poisson_log_likelihood(counts, projectors, result.rho);
  return result;
}

}  // namespace

Ket Projector::ket() const {
  Ket k;
  k << arm1(0) * arm2(0), arm1(0) * arm2(1), arm1(1) * arm2(0), arm1(1) * arm2(1);
  return k;
}

QubitKet polarization_ket(char name) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (name) {
    case 'H':
      return {1.0, 0.0};
    case 'V':
      return {0.0, 1.0};
    case 'D':
      return {r, r};
    case 'A':
      return {r, -r};
    case 'R':
      return {cd(r, 0.0), cd(0.0, -r)};
    case 'L':
      return {cd(r, 0.0), cd(0.0, r)};
    default:
      throw DomainError(fmt::format("unknown polarization '{}' (H V D A R L)", name));
  }
}

ProjectorSet::ProjectorSet(std::vector<Projector> projectors)
    : projectors_(std::move(projectors)) {
  if (projectors_.size() < 16) {
    throw AnalysisError(
        fmt::format("projector set needs >= 16 settings (got {})", projectors_.size()));
  }
  const auto& basis = pauli_basis();
  map_.resize(static_cast<Eigen::Index>(projectors_.size()), 16);
  for (std::size_t k = 0; k < projectors_.size(); ++k) {
    const auto& p = projectors_[k];
    if (std::abs(p.arm1.norm() - 1.0) > 1e-12 || std::abs(p.arm2.norm() - 1.0) > 1e-12) {
      throw AnalysisError(fmt::format("projector '{}' is not unit norm", p.label));
    }
    const Ket psi = p.ket();
    for (int j = 0; j < 16; ++j) {
      map_(static_cast<Eigen::Index>(k), j) = (psi.adjoint() * basis[j] * psi)(0, 0).real() / 4.0;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map_);
  const auto& sv = svd.singularValues();
  if (sv(15) < 1e-10 * sv(0)) {
    throw AnalysisError("projector set is not informationally complete (rank < 16)");
  }
}

ProjectorSet ProjectorSet::standard16() {
  static constexpr std::array<const char*, 16> kRows{"HH", "HV", "VV", "VH", "RH", "RV",
                                                     "DV", "DH", "DR", "DD", "RD", "HD",
                                                     "VD", "VL", "HL", "RL"};
  std::vector<Projector> list;
  for (const char* row : kRows) {
    list.push_back({row, polarization_ket(row[0]), polarization_ket(row[1])});
  }
  return ProjectorSet(std::move(list));
}

ProjectorSet ProjectorSet::full36() {
  constexpr std::string_view kNames = "HVDARL";
  std::vector<Projector> list;
  for (char a : kNames) {
    for (char b : kNames) {
      list.push_back({std::string{a, b}, polarization_ket(a), polarization_ket(b)});
    }
  }
  return ProjectorSet(std::move(list));
}

ProjectorSet ProjectorSet::from_name(std::string_view name) {
  if (name == "standard-16") return standard16();
  if (name == "full-36") return full36();
  throw DomainError(fmt::format("unknown projector set '{}' (standard-16, full-36)", name));
}

std::vector<CountRecord> simulate_tomography(const TwoQubitState& state,
                                             const ProjectorSet& projectors,
                                             const SourceModel& source, std::uint64_t seed,
                                             CountMode mode) {
  validate(source);
  std::vector<CountRecord> records;
  records.reserve(projectors.size());
  std::uint64_t index = 0;
  for (const auto& p : projectors.projectors()) {
    CountRecord record =
        simulate_record(state, p.arm1, p.arm2, source, derive_seed(seed, index++), mode);
    record.label = p.label;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<double> counts_for(std::span<const CountRecord> records,
                               const ProjectorSet& projectors, CountMode mode) {
  std::map<std::string, double, std::less<>> by_label;
  for (const auto& record : records) {
    if (!by_label.emplace(record.label, record.observed(mode)).second) {
      throw AnalysisError(fmt::format("duplicate count record for setting '{}'", record.label));
    }
  }
  std::vector<double> counts;
  counts.reserve(projectors.size());
  for (const auto& p : projectors.projectors()) {
    const auto it = by_label.find(p.label);
    if (it == by_label.end()) {
      throw AnalysisError(fmt::format("no count record for setting '{}'", p.label));
    }
    counts.push_back(it->second);
  }
  return counts;
}

Eigen::Matrix4cd linear_inversion(std::span<const double> counts, const ProjectorSet& projectors) {
  check_counts(counts, projectors);
  const Eigen::VectorXd n = Eigen::Map<const Eigen::VectorXd>(
      counts.data(), static_cast<Eigen::Index>(counts.size()));
  const Eigen::VectorXd r = projectors.probability_map().colPivHouseholderQr().solve(n);
  const auto& basis = pauli_basis();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < 16; ++j) rho += r(j) * basis[j] / 4.0;
  rho = 0.5 * (rho + rho.adjoint());
  const double trace = rho.trace().real();
  if (!(trace > 0.0)) throw AnalysisError("linear inversion produced a non-positive trace");
  return rho / trace;
}

TwoQubitState project_to_physical(const Eigen::Matrix4cd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(0.5 * (matrix + matrix.adjoint()));
  Eigen::Vector4d values = eig.eigenvalues().cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) throw AnalysisError("matrix has no positive eigenvalue");
  values /= total;
  Eigen::Matrix4cd rho = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return TwoQubitState::from_density_matrix(rho);
}

double poisson_log_likelihood(std::span<const double> counts, const ProjectorSet& projectors,
                              const TwoQubitState& state) {
  check_counts(counts, projectors);
  const auto kets = projector_kets(projectors);
  std::vector<double> p(kets.size());
  double total_p = 0.0;
  double total_n = 0.0;
  for (std::size_t k = 0; k < kets.size(); ++k) {
    p[k] = std::max(0.0, (kets[k].adjoint() * state.rho() * kets[k])(0, 0).real());
    total_p += p[k];
    total_n += counts[k];
  }
  const double exposure = total_n / total_p;
  double value = 0.0;
  for (std::size_t k = 0; k < kets.size(); ++k) {
    const double mu = exposure * p[k];
    if (counts[k] > 0.0) value += counts[k] * std::log(mu);
    value -= mu;
  }
  return value;
}

Eigen::Matrix4cd cholesky_factor_from_parameters(const Params& t) {
  Eigen::Matrix4cd factor = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 4; ++a) factor(a, a) = t(a);
  for (std::size_t m = 0; m < kOffDiagonal.size(); ++m) {
    const auto [r, c] = kOffDiagonal[m];
    factor(r, c) = cd(t(4 + 2 * m), t(5 + 2 * m));
  }
  return factor;
}

Params parameters_from_state(const TwoQubitState& state) {
  // rho = T^+ T with T lower triangular. With J the exchange matrix,
  // J rho J = L L^+ (Cholesky), so T = J L^+ J.
  Eigen::Matrix4cd exchange = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) exchange(i, 3 - i) = 1.0;
  const Eigen::Matrix4cd flipped = exchange * state.rho() * exchange;
  Eigen::LLT<Eigen::Matrix4cd> llt(flipped);
  if (llt.info() != Eigen::Success) {
    throw AnalysisError("state is not positive definite; cannot parameterize");
  }
  const Eigen::Matrix4cd lower = llt.matrixL();
  const Eigen::Matrix4cd factor = exchange * lower.adjoint() * exchange;
  Params t;
  for (int a = 0; a < 4; ++a) t(a) = factor(a, a).real();
  for (std::size_t m = 0; m < kOffDiagonal.size(); ++m) {
    const auto [r, c] = kOffDiagonal[m];
    t(4 + 2 * m) = factor(r, c).real();
    t(5 + 2 * m) = factor(r, c).imag();
  }
  return t;
}

double mle_objective(const Params& t, std::span<const double> counts,
                     const ProjectorSet& projectors, Params* gradient) {
  check_counts(counts, projectors);
  return objective(t, counts, projector_kets(projectors), gradient);
}

TomographyResult mle_reconstruct(std::span<const double> counts, const ProjectorSet& projectors,
                                 const MleOptions& options) {
  check_counts(counts, projectors);
  return reconstruct(counts, projectors, projector_kets(projectors), options);
}

FidelityEstimate monte_carlo_fidelity(std::span<const double> counts,
                                      const ProjectorSet& projectors, const Ket& target,
                                      int trials, std::uint64_t seed, CountMode mode,
                                      const MleOptions& options) {
  if (trials < 10) throw DomainError(fmt::format("monte_carlo_fidelity: trials must be >= 10 (got {})", trials));
  check_counts(counts, projectors);
  const auto kets = projector_kets(projectors);

  FidelityEstimate estimate;
  if (mode == CountMode::kExpected) {
    // Every trial would see the same counts.
    const TomographyResult fit = reconstruct(counts, projectors, kets, options);
    estimate.mean = fidelity_to_pure(fit.rho, target);
    estimate.trials = trials;
    return estimate;
  }

  std::vector<double> fidelities;
  fidelities.reserve(static_cast<std::size_t>(trials));
  std::vector<double> resampled(counts.size());
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
    for (std::size_t k = 0; k < counts.size(); ++k) {
      resampled[k] =
          static_cast<double>(sample_counts(counts[k], 1.0, derive_seed(trial_seed, k)));
    }
    double total = 0.0;
    for (double n : resampled) total += n;
    if (!(total > 0.0)) continue;
    const TomographyResult fit = reconstruct(resampled, projectors, kets, options);
    fidelities.push_back(fidelity_to_pure(fit.rho, target));
  }
  if (fidelities.size() < 2) throw AnalysisError("monte_carlo_fidelity: too few usable trials");

  estimate.trials = static_cast<int>(fidelities.size());
  for (double f : fidelities) estimate.mean += f;
  estimate.mean /= static_cast<double>(fidelities.size());
  double ss = 0.0;
  for (double f : fidelities) ss += (f - estimate.mean) * (f - estimate.mean);
  estimate.std = std::sqrt(ss / static_cast<double>(fidelities.size() - 1));
  return estimate;
}

}  // namespace spdcsim
