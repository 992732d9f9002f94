#include "spdcsim/pipeline.h"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "spdcsim/errors.h"
#include "spdcsim/io.h"
#include "spdcsim/random.h"
#include "spdcsim/tomography.h"

namespace spdcsim {
namespace {

constexpr std::array<std::pair<Subcommand, std::string_view>, 7> kNames{{
    {Subcommand::kJsi, "jsi"},
    {Subcommand::kSpectrum, "spectrum"},
    {Subcommand::kFringe, "fringe"},
    {Subcommand::kChsh, "chsh"},
    {Subcommand::kTomoSim, "tomo-sim"},
    {Subcommand::kTomoFit, "tomo-fit"},
    {Subcommand::kReport, "report"},
}};

// Outputs are staged here and only written once everything has computed.
struct Staged {
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;   // printed to stdout
  std::string sections;  // structured text gathered into report.txt

  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

std::uint64_t stream_seed(const RunConfig& config, Subcommand sub) {
  return derive_seed(config.seed, to_string(sub));
}

std::string header(Subcommand sub, const RunConfig& config) {
  return provenance(sub, config);
}

// Structured text files get the same "# ..." provenance line as the CSVs.
std::string structured(Subcommand sub, const RunConfig& config, std::string_view body) {
  return fmt::format("# {}\n{}", header(sub, config), body);
}

struct SpectrumNumbers {
  double signal_fwhm_nm = 0.0;
  double idler_fwhm_nm = 0.0;
  double purity = 0.0;
  double schmidt_number = 0.0;
  double hom_visibility = 0.0;
};

std::string spectrum_section(const RunConfig& config, const SpectrumNumbers& s) {
  return fmt::format(
      "[spectrum]\n"
      "crystal_temperature_c = {:.6f}\n"
      "pump_center_nm = {:.6f}\n"
      "pump_fwhm_nm = {:.6f}\n"
      "pump_bandwidth = {}\n"
      "signal_fwhm_nm = {:.4f}\n"
      "idler_fwhm_nm = {:.4f}\n"
      "schmidt_purity = {:.6f}\n"
      "schmidt_number = {:.4f}\n"
      "hom_visibility = {:.6f}\n",
      config.crystal.temperature_c, config.pump.center_wavelength_nm, config.pump.fwhm_nm,
      to_string(config.pump.bandwidth), s.signal_fwhm_nm, s.idler_fwhm_nm, s.purity,
      s.schmidt_number, s.hom_visibility);
}

JointSpectrum jsa_for(const RunConfig& config) {
  return compute_jsa(config.pump, config.crystal, config.grid);
}

void stage_jsi(const RunConfig& config, Staged& out) {
  const JointSpectrum jsa = jsa_for(config);
  out.add("jsi.csv", format_jsi_csv(jsa, header(Subcommand::kJsi, config)));
  out.summary += fmt::format("jsi: {0}x{0} grid at {1:.4f} C\n", config.grid.points_per_axis,
                             config.crystal.temperature_c);
}

void stage_spectrum(const RunConfig& config, Staged& out) {
  const JointSpectrum jsa = jsa_for(config);
  const SampledSpectrum signal = marginal_spectrum(jsa, Arm::kSignal);
  const SampledSpectrum idler = marginal_spectrum(jsa, Arm::kIdler);
  SpectrumNumbers numbers;
  numbers.signal_fwhm_nm = fwhm(signal);
  numbers.idler_fwhm_nm = fwhm(idler);
  const SchmidtDecomposition schmidt = schmidt_decomposition(jsa);
  numbers.purity = schmidt.purity;
  numbers.schmidt_number = schmidt.schmidt_number;
  numbers.hom_visibility = hom_visibility(jsa);

  const std::string prov = header(Subcommand::kSpectrum, config);
  const std::string section = spectrum_section(config, numbers);
  out.add("marginal_signal.csv", format_spectrum_csv(signal, prov));
  out.add("marginal_idler.csv", format_spectrum_csv(idler, prov));
  out.add("spectrum.txt", structured(Subcommand::kSpectrum, config, section));
  out.sections += section;
  out.summary += fmt::format(
      "spectrum: signal FWHM {:.4f} nm, idler FWHM {:.4f} nm, purity {:.4f}, HOM V {:.4f}\n",
      numbers.signal_fwhm_nm, numbers.idler_fwhm_nm, numbers.purity, numbers.hom_visibility);
}

void stage_fringe(const RunConfig& config, Staged& out) {
  const TwoQubitState state = configured_state(config);
  const std::vector<double> sweep = config.fringe.sweep();
  const std::uint64_t seed = stream_seed(config, Subcommand::kFringe);
  const std::string prov = header(Subcommand::kFringe, config);
  std::string section = fmt::format("[fringe]\nwhite_noise_v = {:.6f}\n", config.white_noise_v);
  for (std::size_t k = 0; k < config.fringe.theta1_deg.size(); ++k) {
    const double theta1 = config.fringe.theta1_deg[k];
    const auto records =
        simulate_fringe_scan(state, theta1, sweep, config.source, derive_seed(seed, k));
    const auto points = fringe_points(records, CountMode::kPoisson);
    const auto variances = count_variances(records, CountMode::kPoisson);
    const FringeFit fit = fit_fringe(points, variances);
    const FringeFit ideal = fit_fringe(fringe_curve(state, theta1, sweep));
    out.add(fmt::format("fringe_theta1_{:g}.csv", theta1), format_fringe_csv(records, prov));
    section += fmt::format(
        "theta1_{0:g}.visibility = {1:.6f}\n"
        "theta1_{0:g}.visibility_stderr = {2:.6f}\n"
        "theta1_{0:g}.expected_visibility = {3:.6f}\n",
        theta1, fit.visibility, fit.visibility_stderr, ideal.visibility);
    out.summary += fmt::format("fringe: theta1 = {:g} deg, V = {:.4f} +/- {:.4f}\n", theta1,
                               fit.visibility, fit.visibility_stderr);
  }
  out.add("fringe.txt", structured(Subcommand::kFringe, config, section));
  out.sections += section;
}

void stage_chsh(const RunConfig& config, Staged& out) {
  const TwoQubitState state = configured_state(config);
  const auto records =
      simulate_chsh(state, config.chsh, config.source, stream_seed(config, Subcommand::kChsh));
  const ChshMeasurement measured = chsh_from_counts(records, CountMode::kPoisson);
  const double analytic = chsh_s(state, config.chsh);

  std::string section = fmt::format(
      "[chsh]\n"
      "a_deg = {:g}\na_prime_deg = {:g}\nb_deg = {:g}\nb_prime_deg = {:g}\n"
      "s_expected = {:.10f}\n"
      "s_measured = {:.6f}\n"
      "s_stderr = {:.6f}\n",
      config.chsh.a_deg, config.chsh.a_prime_deg, config.chsh.b_deg, config.chsh.b_prime_deg,
      analytic, measured.s, measured.s_stderr);
  static constexpr std::array<const char*, 4> kPairs{"a_b", "a_bprime", "aprime_b",
                                                     "aprime_bprime"};
  for (std::size_t k = 0; k < 4; ++k) {
    section += fmt::format("e_{} = {:.6f}\ne_{}_stderr = {:.6f}\n", kPairs[k],
                           measured.correlations[k], kPairs[k], measured.correlation_stderr[k]);
  }
  out.add("chsh_counts.csv",
          format_fringe_csv(records, header(Subcommand::kChsh, config)));
  out.add("chsh.txt", structured(Subcommand::kChsh, config, section));
  out.sections += section;
  out.summary += fmt::format("chsh: S = {:.10f} (expected), {:.4f} +/- {:.4f} (simulated)\n",
                             analytic, measured.s, measured.s_stderr);
}

std::vector<CountRecord> tomography_records(const RunConfig& config) {
  return simulate_tomography(configured_state(config),
                             ProjectorSet::from_name(config.projector_set), config.source,
                             stream_seed(config, Subcommand::kTomoSim));
}

void stage_tomo_sim(const RunConfig& config, Staged& out) {
  const auto records = tomography_records(config);
  out.add("tomo_counts.csv", format_tomography_csv(records, header(Subcommand::kTomoSim, config)));
  double total = 0.0;
  for (const auto& r : records) total += static_cast<double>(r.coincidences);
  out.summary += fmt::format("tomo-sim: {} settings ({}), {:.0f} coincidences\n", records.size(),
                             config.projector_set, total);
}

void stage_tomo_fit(const RunConfig& config, std::span<const CountRecord> records, Staged& out) {
  const ProjectorSet set = ProjectorSet::from_name(config.projector_set);
  const std::vector<double> counts = counts_for(records, set, CountMode::kPoisson);
  const Ket target = sagnac_ket(config.state);

  TomographyResult result = mle_reconstruct(counts, set);
  result.fidelity_vs_target = fidelity_to_pure(result.rho, target);
  const FidelityEstimate estimate =
      monte_carlo_fidelity(counts, set, target, config.monte_carlo_trials,
                           stream_seed(config, Subcommand::kTomoFit));
  result.fidelity_std = estimate.std;

  const std::string prov = header(Subcommand::kTomoFit, config);
  const std::string report = format_tomography_report(result, config.projector_set, prov);
  out.add("tomo_result.txt", report);
  // report.txt has its own provenance line and lists the bootstrap settings
  // ahead of the matrix blocks.
  std::string section = report.substr(report.find('\n') + 1);
  section.insert(section.find("[rho.real]"),
                 fmt::format("monte_carlo_trials = {}\nmonte_carlo_mean = {:.6f}\n",
                             estimate.trials, estimate.mean));
  out.sections += section;
  out.summary += fmt::format("tomo-fit: F = {:.4f} +/- {:.4f}, concurrence {:.4f}, {}\n",
                             *result.fidelity_vs_target, estimate.std, concurrence(result.rho),
                             result.converged ? "converged" : "NOT converged");
}

void stage_budget(const RunConfig& config, Staged& out) {
  std::string section = "[budget]\n";
  for (const auto& [name, efficiency] : config.budget.components) {
    section += fmt::format("{} = {:.6f}\n", name, efficiency);
  }
  const double total = overall_efficiency(config.budget);
  section += fmt::format("overall = {:.6f}\n", total);
  out.sections += section;
  out.summary += fmt::format("budget: overall collection efficiency {:.4f}\n", total);
}

void stage(Subcommand sub, const RunConfig& config, const RunOptions& options, Staged& out) {
  switch (sub) {
    case Subcommand::kJsi:
      stage_jsi(config, out);
      return;
    case Subcommand::kSpectrum:
      stage_spectrum(config, out);
      return;
    case Subcommand::kFringe:
      stage_fringe(config, out);
      return;
    case Subcommand::kChsh:
      stage_chsh(config, out);
      return;
    case Subcommand::kTomoSim:
      stage_tomo_sim(config, out);
      return;
    case Subcommand::kTomoFit: {
      const auto path = options.counts_path.value_or(config.output_dir / "tomo_counts.csv");
      const auto records = parse_tomography_csv(read_file(path));
      stage_tomo_fit(config, records, out);
      return;
    }
    case Subcommand::kReport: {
      stage_jsi(config, out);
      stage_spectrum(config, out);
      stage_fringe(config, out);
      stage_chsh(config, out);
      stage_tomo_sim(config, out);
      stage_tomo_fit(config, tomography_records(config), out);
      stage_budget(config, out);
      out.add("report.txt", structured(Subcommand::kReport, config, out.sections));
      return;
    }
  }
}

}  // namespace

std::string_view to_string(Subcommand sub) {
  for (const auto& [value, name] : kNames) {
    if (value == sub) return name;
  }
  return "unknown";
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (const auto& [value, text] : kNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::vector<std::string> subcommand_names() {
  std::vector<std::string> names;
  for (const auto& entry : kNames) names.emplace_back(entry.second);
  return names;
}

std::string provenance(Subcommand sub, const RunConfig& config) {
  return fmt::format("spdcsim {} config_hash={} seed={}", to_string(sub), config_hash(config),
                     config.seed);
}

RunOutcome run_subcommand(Subcommand sub, const RunConfig& config, const RunOptions& options) {
  Staged staged;
  stage(sub, config, options, staged);

  RunOutcome outcome;
  outcome.summary = std::move(staged.summary);
  try {
    for (const auto& [name, content] : staged.files) {
      const auto path = config.output_dir / name;
      write_file_atomic(path, content);
      outcome.files.push_back(path);
    }
  } catch (...) {
    std::error_code ignored;
    for (const auto& path : outcome.files) std::filesystem::remove(path, ignored);
    throw;
  }
  return outcome;
}

}  // namespace spdcsim
