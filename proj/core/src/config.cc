#include "spdcsim/config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "spdcsim/errors.h"
#include "spdcsim/random.h"

namespace spdcsim {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>, std::less<>>& schema() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys{
      {"pump", {"center_wavelength_nm", "fwhm_nm", "bandwidth", "envelope"}},
      {"crystal", {"length_mm", "poling_period_um", "temperature_c", "dispersion_model"}},
      {"grid",
       {"signal_min_nm", "signal_max_nm", "idler_min_nm", "idler_max_nm", "points_per_axis"}},
      {"state", {"phi_rad", "beta", "white_noise_v"}},
      {"source",
       {"pair_rate_per_mw", "pump_power_mw", "arm_efficiency_1", "arm_efficiency_2",
        "dark_rate_cps", "coincidence_window_ns", "integration_time_s"}},
      {"budget", {}},
      {"fringe", {"theta1_deg", "sweep_start_deg", "sweep_stop_deg", "sweep_step_deg"}},
      {"chsh", {"preset", "a_deg", "a_prime_deg", "b_deg", "b_prime_deg"}},
      {"tomography", {"projector_set", "trials"}},
      {"run", {"seed", "output_dir"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

// "section.key" -> 1-based line of its definition in the source text.
std::map<std::string, int> key_lines(std::string_view text) {
  std::map<std::string, int> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      lines.emplace(section, number);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + trim(t.substr(0, eq)), number);
  }
  return lines;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::map<std::string, int> lines)
      : tree_(tree), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const {
    const auto it = lines_.find(section + "." + key);
    throw ConfigError(fmt::format("{}.{}: {}", section, key, message),
                      it == lines_.end() ? 0 : it->second);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto node = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!node) return std::nullopt;
    return trim(node->data());
  }

  std::string text(const std::string& section, const std::string& key) const {
    auto value = raw(section, key);
    if (!value) fail(section, key, "missing mandatory key");
    return *value;
  }

  std::string text(const std::string& section, const std::string& key,
                   std::string_view fallback) const {
    return raw(section, key).value_or(std::string(fallback));
  }

  double parse_number(const std::string& section, const std::string& key,
                      const std::string& value) const {
    double out = 0.0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
      fail(section, key, fmt::format("'{}' is not a finite number", value));
    }
    return out;
  }

  double number(const std::string& section, const std::string& key) const {
    return parse_number(section, key, text(section, key));
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const auto value = raw(section, key);
    return value ? parse_number(section, key, *value) : fallback;
  }

  std::int64_t integer(const std::string& section, const std::string& key,
                       std::optional<std::int64_t> fallback = std::nullopt) const {
    const auto value = raw(section, key);
    if (!value) {
      if (!fallback) fail(section, key, "missing mandatory key");
      return *fallback;
    }
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), out);
    if (ec != std::errc() || ptr != value->data() + value->size()) {
      fail(section, key, fmt::format("'{}' is not an integer", *value));
    }
    return out;
  }

  std::vector<double> number_list(const std::string& section, const std::string& key,
                                  std::vector<double> fallback) const {
    const auto value = raw(section, key);
    if (!value) return fallback;
    std::vector<double> out;
    std::stringstream in(*value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_number(section, key, trim(item)));
    if (out.empty()) fail(section, key, "list must not be empty");
    return out;
  }

  void reject_unknown() const {
    for (const auto& [section, node] : tree_) {
      const auto known = schema().find(section);
      if (known == schema().end()) {
        const auto it = lines_.find(section);
        if (node.empty()) {
          throw ConfigError(fmt::format("key '{}' is outside any section", section),
                            it == lines_.end() ? 0 : it->second);
        }
        throw ConfigError(fmt::format("unknown section [{}]", section),
                          it == lines_.end() ? 0 : it->second);
      }
      if (section == "budget") continue;
      for (const auto& entry : node) {
        if (!known->second.contains(entry.first)) fail(section, entry.first, "unknown key");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, int> lines_;
};

std::string apply_override(pt::ptree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", assignment));
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  tree.put(pt::ptree::path_type(section + "." + key, '.'), trim(assignment.substr(eq + 1)));
  return section + "." + key;
}

RunConfig build(const Reader& in) {
  in.reject_unknown();
  RunConfig c;

  c.pump.center_wavelength_nm = in.number("pump", "center_wavelength_nm");
  c.pump.fwhm_nm = in.number("pump", "fwhm_nm");
  if (in.text("pump", "envelope", "gaussian") != "gaussian") {
    in.fail("pump", "envelope", "only 'gaussian' is supported");
  }
  try {
    c.pump.bandwidth = parse_pump_bandwidth(in.text("pump", "bandwidth", "intensity-fwhm"));
  } catch (const DomainError& e) {
    in.fail("pump", "bandwidth", e.what());
  }

  c.crystal.length_mm = in.number("crystal", "length_mm");
  c.crystal.poling_period_um = in.number("crystal", "poling_period_um");
  c.crystal.dispersion_model =
      in.text("crystal", "dispersion_model", kDefaultDispersionModel);
  const std::string temperature = in.text("crystal", "temperature_c");
  c.solve_temperature = temperature == "auto";
  c.crystal.temperature_c =
      c.solve_temperature ? kPolingReferenceTemperatureC
                          : in.parse_number("crystal", "temperature_c", temperature);

  c.grid.signal.min_nm = in.number("grid", "signal_min_nm", c.grid.signal.min_nm);
  c.grid.signal.max_nm = in.number("grid", "signal_max_nm", c.grid.signal.max_nm);
  c.grid.idler.min_nm = in.number("grid", "idler_min_nm", c.grid.idler.min_nm);
  c.grid.idler.max_nm = in.number("grid", "idler_max_nm", c.grid.idler.max_nm);
  c.grid.points_per_axis =
      static_cast<int>(in.integer("grid", "points_per_axis", c.grid.points_per_axis));

  c.state.phi_rad = in.number("state", "phi_rad");
  c.state.beta = in.number("state", "beta");
  c.white_noise_v = in.number("state", "white_noise_v");

  c.source.pair_rate_per_mw = in.number("source", "pair_rate_per_mw");
  c.source.pump_power_mw = in.number("source", "pump_power_mw");
  c.source.arm_efficiency_1 = in.number("source", "arm_efficiency_1", c.source.arm_efficiency_1);
  c.source.arm_efficiency_2 = in.number("source", "arm_efficiency_2", c.source.arm_efficiency_2);
  c.source.dark_rate_cps = in.number("source", "dark_rate_cps", c.source.dark_rate_cps);
  c.source.coincidence_window_ns =
      in.number("source", "coincidence_window_ns", c.source.coincidence_window_ns);
  c.source.integration_time_s =
      in.number("source", "integration_time_s", c.source.integration_time_s);

  c.fringe.theta1_deg = in.number_list("fringe", "theta1_deg", c.fringe.theta1_deg);
  c.fringe.sweep_start_deg = in.number("fringe", "sweep_start_deg", c.fringe.sweep_start_deg);
  c.fringe.sweep_stop_deg = in.number("fringe", "sweep_stop_deg", c.fringe.sweep_stop_deg);
  c.fringe.sweep_step_deg = in.number("fringe", "sweep_step_deg", c.fringe.sweep_step_deg);
  if (!(c.fringe.sweep_step_deg > 0.0)) in.fail("fringe", "sweep_step_deg", "must be > 0");
  if (!(c.fringe.sweep_stop_deg >= c.fringe.sweep_start_deg)) {
    in.fail("fringe", "sweep_stop_deg", "must be >= sweep_start_deg");
  }

  c.chsh_preset = in.text("chsh", "preset", c.chsh_preset);
  try {
    c.chsh = chsh_preset(c.chsh_preset);
  } catch (const DomainError& e) {
    in.fail("chsh", "preset", e.what());
  }
  c.chsh.a_deg = in.number("chsh", "a_deg", c.chsh.a_deg);
  c.chsh.a_prime_deg = in.number("chsh", "a_prime_deg", c.chsh.a_prime_deg);
  c.chsh.b_deg = in.number("chsh", "b_deg", c.chsh.b_deg);
  c.chsh.b_prime_deg = in.number("chsh", "b_prime_deg", c.chsh.b_prime_deg);

  c.projector_set = in.text("tomography", "projector_set", c.projector_set);
  if (c.projector_set != "standard-16" && c.projector_set != "full-36") {
    in.fail("tomography", "projector_set", "must be standard-16 or full-36");
  }
  c.monte_carlo_trials =
      static_cast<int>(in.integer("tomography", "trials", c.monte_carlo_trials));
  if (c.monte_carlo_trials < 10) in.fail("tomography", "trials", "must be >= 10");

  const std::int64_t seed = in.integer("run", "seed");
  if (seed < 0) in.fail("run", "seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output_dir = in.text("run", "output_dir", c.output_dir.string());
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    c.output_dir = env;
  }

  // An explicit [budget] section replaces these; see parse_config_text.
  c.budget = reference_collection_budget();
  return c;
}

}  // namespace

std::vector<double> FringeConfig::sweep() const {
  std::vector<double> angles;
  const auto steps =
      static_cast<long>(std::floor((sweep_stop_deg - sweep_start_deg) / sweep_step_deg + 1e-9));
  for (long k = 0; k <= steps; ++k) angles.push_back(sweep_start_deg + k * sweep_step_deg);
  return angles;
}

RunConfig parse_config_text(std::string_view text, std::span<const std::string> overrides) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }
  auto lines = key_lines(text);
  for (const auto& assignment : overrides) {
    // Overridden values no longer come from the file, so drop their lines.
    lines.erase(apply_override(tree, assignment));
  }

  const Reader reader(tree, lines);
  RunConfig config = build(reader);

  if (const auto budget = tree.get_child_optional("budget"); budget && !budget->empty()) {
    config.budget.components.clear();
    for (const auto& [name, node] : *budget) {
      config.budget.components.emplace_back(name,
                                            reader.parse_number("budget", name, trim(node.data())));
    }
  }

  try {
    validate(config.pump);
    validate(config.crystal);
    validate(config.grid);
    validate(config.source);
    (void)sagnac_ket(config.state);
    (void)overall_efficiency(config.budget);
    if (!(config.white_noise_v >= 0.0 && config.white_noise_v <= 1.0)) {
      throw DomainError("state.white_noise_v must lie in [0, 1]");
    }
    if (config.solve_temperature) {
      config.crystal.temperature_c =
          degenerate_temperature(config.crystal, 1e-3 * config.pump.center_wavelength_nm);
    }
  } catch (const std::exception& e) {
    // Module messages start with the offending "section.key".
    const std::string message = e.what();
    const auto it = lines.find(message.substr(0, message.find_first_of(" :")));
    throw ConfigError(message, it == lines.end() ? 0 : it->second);
  }
  return config;
}

RunConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), overrides);
}

std::string canonical_config(const RunConfig& c) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  line("pump.center_wavelength_nm", num(c.pump.center_wavelength_nm));
  line("pump.fwhm_nm", num(c.pump.fwhm_nm));
  line("pump.bandwidth", to_string(c.pump.bandwidth));
  line("pump.envelope", "gaussian");
  line("crystal.length_mm", num(c.crystal.length_mm));
  line("crystal.poling_period_um", num(c.crystal.poling_period_um));
  line("crystal.temperature_c", c.solve_temperature ? std::string("auto")
                                                    : num(c.crystal.temperature_c));
  line("crystal.dispersion_model", c.crystal.dispersion_model);
  line("grid.signal_min_nm", num(c.grid.signal.min_nm));
  line("grid.signal_max_nm", num(c.grid.signal.max_nm));
  line("grid.idler_min_nm", num(c.grid.idler.min_nm));
  line("grid.idler_max_nm", num(c.grid.idler.max_nm));
  line("grid.points_per_axis", c.grid.points_per_axis);
  line("state.phi_rad", num(c.state.phi_rad));
  line("state.beta", num(c.state.beta));
  line("state.white_noise_v", num(c.white_noise_v));
  line("source.pair_rate_per_mw", num(c.source.pair_rate_per_mw));
  line("source.pump_power_mw", num(c.source.pump_power_mw));
  line("source.arm_efficiency_1", num(c.source.arm_efficiency_1));
  line("source.arm_efficiency_2", num(c.source.arm_efficiency_2));
  line("source.dark_rate_cps", num(c.source.dark_rate_cps));
  line("source.coincidence_window_ns", num(c.source.coincidence_window_ns));
  line("source.integration_time_s", num(c.source.integration_time_s));
  for (const auto& [name, eta] : c.budget.components) line("budget." + name, num(eta));
  std::string thetas;
  for (double t : c.fringe.theta1_deg) thetas += (thetas.empty() ? "" : ",") + num(t);
  line("fringe.theta1_deg", thetas);
  line("fringe.sweep_start_deg", num(c.fringe.sweep_start_deg));
  line("fringe.sweep_stop_deg", num(c.fringe.sweep_stop_deg));
  line("fringe.sweep_step_deg", num(c.fringe.sweep_step_deg));
  line("chsh.preset", c.chsh_preset);
  line("chsh.a_deg", num(c.chsh.a_deg));
  line("chsh.a_prime_deg", num(c.chsh.a_prime_deg));
  line("chsh.b_deg", num(c.chsh.b_deg));
  line("chsh.b_prime_deg", num(c.chsh.b_prime_deg));
  line("tomography.projector_set", c.projector_set);
  line("tomography.trials", c.monte_carlo_trials);
  line("run.seed", c.seed);
  return out;
}

std::string config_hash(const RunConfig& config) {
  return fmt::format("{:016x}", fnv1a64(canonical_config(config)));
}

TwoQubitState configured_state(const RunConfig& config) {
  return mix_with_white_noise(sagnac_state(config.state), config.white_noise_v);
}

}  // namespace spdcsim
