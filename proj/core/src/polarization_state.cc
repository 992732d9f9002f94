#include "spdcsim/polarization_state.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

using cd = std::complex<double>;

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Square root of a Hermitian PSD matrix, clipping round-off negatives.
DensityMatrix hermitian_sqrt(const DensityMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(m);
  const Eigen::Vector4d roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

Eigen::Matrix4d spin_flip() {
  Eigen::Matrix4d m;
  m << 0, 0, 0, -1,
       0, 0, 1, 0,
       0, 1, 0, 0,
       -1, 0, 0, 0;
  return m;
}

}  // namespace

TwoQubitState TwoQubitState::from_density_matrix(const DensityMatrix& rho) {
  if (!rho.allFinite()) throw DomainError("density matrix has non-finite entries");
  const double asymmetry = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asymmetry >= kHermiticityTolerance) {
    throw DomainError(fmt::format("density matrix is not Hermitian (max |rho - rho^+| = {:.3e})",
                                  asymmetry));
  }
  const DensityMatrix hermitian = 0.5 * (rho + rho.adjoint());
  const double trace = hermitian.trace().real();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    throw DomainError(fmt::format("density matrix trace is {:.15g}, expected 1", trace));
  }
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(hermitian, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues()(0) < -kPositivityTolerance) {
    throw DomainError(fmt::format("density matrix has negative eigenvalue {:.3e}",
                                  eig.eigenvalues()(0)));
  }
  return TwoQubitState(hermitian);
}

TwoQubitState TwoQubitState::from_ket(const Ket& ket) {
  const double norm = ket.norm();
  if (!std::isfinite(norm) || norm == 0.0) throw DomainError("ket must be finite and nonzero");
  const Ket unit = ket / norm;
  return TwoQubitState(unit * unit.adjoint());
}

TwoQubitState TwoQubitState::maximally_mixed() {
  return TwoQubitState(DensityMatrix::Identity() / 4.0);
}

Ket sagnac_ket(const SagnacParams& params) {
  if (!std::isfinite(params.phi_rad) || !std::isfinite(params.beta)) {
    throw DomainError("sagnac parameters must be finite");
  }
  if (params.beta < 0.0) {
    throw DomainError(fmt::format("state.beta must be >= 0 (got {})", params.beta));
  }
  Ket ket = Ket::Zero();
  ket(1) = 1.0;
  ket(2) = std::polar(params.beta, params.phi_rad);
  return ket / std::sqrt(1.0 + params.beta * params.beta);
}

TwoQubitState sagnac_state(const SagnacParams& params) {
  return TwoQubitState::from_ket(sagnac_ket(params));
}

Ket psi_plus() { return sagnac_ket({0.0, 1.0}); }

Ket psi_minus() {
  Ket ket = Ket::Zero();
  ket(1) = 1.0 / std::numbers::sqrt2;
  ket(2) = -1.0 / std::numbers::sqrt2;
  return ket;
}

TwoQubitState mix_with_white_noise(const TwoQubitState& state, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(fmt::format("white-noise weight v must lie in [0, 1] (got {})", v));
  }
  return TwoQubitState::from_density_matrix(v * state.rho() +
                                            (1.0 - v) * DensityMatrix::Identity() / 4.0);
}

QubitKet analyzer_ket(double theta_deg, std::optional<double> qwp_deg) {
  const double t = radians(theta_deg);
  QubitKet ket(std::cos(t), std::sin(t));
  if (qwp_deg) {
    const double q = radians(*qwp_deg);
    Eigen::Matrix2cd rot;
    rot << std::cos(q), -std::sin(q), std::sin(q), std::cos(q);
    Eigen::Matrix2cd retarder = Eigen::Matrix2cd::Zero();
    retarder(0, 0) = 1.0;
    retarder(1, 1) = cd(0.0, 1.0);
    const Eigen::Matrix2cd plate = rot * retarder * rot.transpose();
    ket = plate.adjoint() * ket;
  }
  return ket;
}

double projection_probability(const TwoQubitState& state, const QubitKet& arm1,
                              const QubitKet& arm2) {
  Ket joint;
  joint << arm1(0) * arm2(0), arm1(0) * arm2(1), arm1(1) * arm2(0), arm1(1) * arm2(1);
  return (joint.adjoint() * state.rho() * joint)(0, 0).real();
}

double coincidence_probability(const TwoQubitState& state, const AnalyzerSetting& setting) {
  return projection_probability(state, analyzer_ket(setting.theta1_deg, setting.qwp1_deg),
                                analyzer_ket(setting.theta2_deg, setting.qwp2_deg));
}

std::vector<FringePoint> fringe_curve(const TwoQubitState& state, double theta1_deg,
                                      std::span<const double> sweep_deg) {
  if (sweep_deg.empty()) throw DomainError("fringe_curve: sweep must be nonempty");
  std::vector<FringePoint> curve;
  curve.reserve(sweep_deg.size());
  const QubitKet arm1 = analyzer_ket(theta1_deg);
  for (double theta2 : sweep_deg) {
    curve.push_back({theta2, projection_probability(state, arm1, analyzer_ket(theta2))});
  }
  return curve;
}

FringeFit fit_fringe(std::span<const FringePoint> curve, std::span<const double> variances) {
  if (curve.size() < 3) throw AnalysisError("fit_fringe: need at least three points");
  if (!variances.empty() && variances.size() != curve.size()) {
    throw AnalysisError("fit_fringe: one variance per point required");
  }
  const auto [lo, hi] = std::minmax_element(
      curve.begin(), curve.end(),
      [](const FringePoint& a, const FringePoint& b) { return a.theta2_deg < b.theta2_deg; });
  if (hi->theta2_deg - lo->theta2_deg < 180.0 - 1e-9) {
    throw AnalysisError("fit_fringe: sweep must span at least 180 degrees of theta2");
  }

  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double x = 2.0 * radians(curve[k].theta2_deg);
    const Eigen::Vector3d row(1.0, std::cos(x), std::sin(x));
    const double w = variances.empty() ? 1.0 : 1.0 / std::max(variances[k], 1.0);
    normal += w * row * row.transpose();
    rhs += w * curve[k].value * row;
  }
  Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12) {
    throw AnalysisError("fit_fringe: sweep angles do not determine a sinusoid");
  }
  const Eigen::Vector3d c = ldlt.solve(rhs);
  const double r = std::hypot(c(1), c(2));
  if (c(0) == 0.0) throw AnalysisError("fit_fringe: max + min of the fitted fringe is zero");

  FringeFit fit;
  fit.amplitude = 2.0 * r;
  fit.offset = c(0) - r;
  fit.phase_deg = 0.5 * std::atan2(-c(2), -c(1)) * 180.0 / std::numbers::pi;
  fit.visibility = r / c(0);
  if (!variances.empty() && r > 0.0) {
    const Eigen::Matrix3d covariance = ldlt.solve(Eigen::Matrix3d::Identity());
    const Eigen::Vector3d gradient(-r / (c(0) * c(0)), c(1) / (r * c(0)), c(2) / (r * c(0)));
    fit.visibility_stderr = std::sqrt(gradient.dot(covariance * gradient));
  }
  return fit;
}

double visibility(std::span<const FringePoint> curve) { return fit_fringe(curve).visibility; }

double correlation(const TwoQubitState& state, double a_deg, double b_deg) {
  const QubitKet a = analyzer_ket(a_deg);
  const QubitKet a_perp = analyzer_ket(a_deg + 90.0);
  const QubitKet b = analyzer_ket(b_deg);
  const QubitKet b_perp = analyzer_ket(b_deg + 90.0);
  return projection_probability(state, a, b) + projection_probability(state, a_perp, b_perp) -
         projection_probability(state, a, b_perp) - projection_probability(state, a_perp, b);
}

ChshSettings chsh_preset(std::string_view name) {
  if (name == "psi-minus") return {0.0, 45.0, 22.5, 67.5};
  if (name == "psi-plus") return {0.0, 45.0, 22.5, -22.5};
  throw DomainError(fmt::format("unknown CHSH preset '{}' (psi-minus, psi-plus)", name));
}

int chsh_minus_index(const std::array<double, 4>& correlations) {
  const double total = correlations[0] + correlations[1] + correlations[2] + correlations[3];
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < 4; ++k) {
    const double value = std::abs(total - 2.0 * correlations[k]);
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  return best;
}

double chsh_from_correlations(const std::array<double, 4>& correlations) {
  const double total = correlations[0] + correlations[1] + correlations[2] + correlations[3];
  return std::abs(total - 2.0 * correlations[chsh_minus_index(correlations)]);
}

double chsh_s(const TwoQubitState& state, const ChshSettings& s) {
  return chsh_from_correlations({correlation(state, s.a_deg, s.b_deg),
                                 correlation(state, s.a_deg, s.b_prime_deg),
                                 correlation(state, s.a_prime_deg, s.b_deg),
                                 correlation(state, s.a_prime_deg, s.b_prime_deg)});
}

double fidelity_to_pure(const TwoQubitState& state, const Ket& target) {
  if (std::abs(target.norm() - 1.0) > 1e-9) {
    throw DomainError(fmt::format("target ket has norm {:.12g}, expected 1", target.norm()));
  }
  return (target.adjoint() * state.rho() * target)(0, 0).real();
}

double state_fidelity(const TwoQubitState& rho, const TwoQubitState& sigma) {
  // Work inside the support of the lower-rank argument: square roots of
  // roundoff-level eigenvalues would otherwise add ~1e-8 for pure states.
  static constexpr double kSupportCutoff = 1e-14;
  Eigen::SelfAdjointEigenSolver<DensityMatrix> er(rho.rho());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(sigma.rho());
  const auto rank = [](const Eigen::Vector4d& w) { return (w.array() > kSupportCutoff).count(); };
  const bool use_rho = rank(er.eigenvalues()) <= rank(es.eigenvalues());
  const auto& basis = use_rho ? er : es;
  const DensityMatrix& other = use_rho ? sigma.rho() : rho.rho();

  const auto k = rank(basis.eigenvalues());
  Eigen::MatrixXcd root(4, k);
  for (Eigen::Index j = 0, col = 0; j < 4; ++j) {
    const double w = basis.eigenvalues()(j);
    if (w > kSupportCutoff) root.col(col++) = std::sqrt(w) * basis.eigenvectors().col(j);
  }
  const Eigen::MatrixXcd inner = root.adjoint() * other * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (inner + inner.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  const double trace_root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, trace_root * trace_root);
}

double concurrence(const TwoQubitState& state) {
  const Eigen::Matrix4d flip = spin_flip();
  const DensityMatrix root = hermitian_sqrt(state.rho());
  const DensityMatrix tilde = flip * state.rho().conjugate() * flip;
  const DensityMatrix r = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(0.5 * (r + r.adjoint()),
                                                   Eigen::EigenvaluesOnly);
  // ascending -> descending square roots
  Eigen::Vector4d l = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().reverse();
  return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

}  // namespace spdcsim
