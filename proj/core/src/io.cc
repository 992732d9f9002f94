#include "spdcsim/io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

std::string provenance_line(std::string_view provenance) {
  return fmt::format("# {}\n", provenance);
}

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto end = line.find(delimiter, start);
    std::string field(line.substr(start, end == std::string_view::npos ? end : end - start));
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(std::move(field));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

std::string count_columns(const CountRecord& r) {
  return fmt::format("{},{},{},{:.6f},{:.6g},{:.10g},{:.10g}", r.singles_1, r.singles_2,
                     r.coincidences, count_error(r.coincidences), r.accidentals_estimate,
                     r.expected_coincidences, r.integration_time_s);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path temporary = path;
  temporary += ".partial";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temporary.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(temporary);
      throw std::runtime_error("failed writing " + temporary.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temporary, path, ec);
  if (ec) {
    std::filesystem::remove(temporary);
    throw std::filesystem::filesystem_error("rename failed", temporary, path, ec);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_jsi_csv(const JointSpectrum& spectrum, std::string_view provenance) {
  const Eigen::MatrixXd jsi = spectrum.intensity();
  const int n = spectrum.grid.points_per_axis;
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}signal_nm\\idler_nm", provenance_line(provenance));
  for (int i = 0; i < n; ++i) fmt::format_to(std::back_inserter(out), ",{:.6f}", spectrum.grid.idler_nm(i));
  out.push_back('\n');
  for (int s = 0; s < n; ++s) {
    fmt::format_to(std::back_inserter(out), "{:.6f}", spectrum.grid.signal_nm(s));
    for (int i = 0; i < n; ++i) fmt::format_to(std::back_inserter(out), ",{:.6e}", jsi(s, i));
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

std::string format_spectrum_csv(const SampledSpectrum& spectrum, std::string_view provenance) {
  std::string out = provenance_line(provenance) + "wavelength_nm,intensity\n";
  for (std::size_t k = 0; k < spectrum.wavelength_nm.size(); ++k) {
    out += fmt::format("{:.6f},{:.8e}\n", spectrum.wavelength_nm[k], spectrum.intensity[k]);
  }
  return out;
}

std::string format_fringe_csv(std::span<const CountRecord> records, std::string_view provenance) {
  std::string out = provenance_line(provenance) +
                    "theta1_deg,theta2_deg,singles_1,singles_2,coincidences,coincidence_err,"
                    "accidentals_estimate,expected_coincidences,integration_time_s\n";
  for (const auto& r : records) {
    if (!r.setting) throw AnalysisError("format_fringe_csv: record has no analyzer angles");
    out += fmt::format("{:g},{:g},{}\n", r.setting->theta1_deg, r.setting->theta2_deg,
                       count_columns(r));
  }
  return out;
}

std::string format_tomography_csv(std::span<const CountRecord> records,
                                  std::string_view provenance) {
  std::string out = provenance_line(provenance) +
                    "setting,singles_1,singles_2,coincidences,coincidence_err,"
                    "accidentals_estimate,expected_coincidences,integration_time_s\n";
  for (const auto& r : records) out += fmt::format("{},{}\n", r.label, count_columns(r));
  return out;
}

std::vector<CountRecord> parse_tomography_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::map<std::string, std::size_t> columns;
  std::vector<CountRecord> records;
  int number = 0;
  auto field_number = [&](const std::vector<std::string>& fields, const char* name,
                          bool required) -> std::optional<double> {
    const auto it = columns.find(name);
    if (it == columns.end()) {
      if (required) throw AnalysisError(fmt::format("counts file lacks a '{}' column", name));
      return std::nullopt;
    }
    const std::string& raw = fields.at(it->second);
    try {
      std::size_t used = 0;
      const double value = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return value;
    } catch (const std::exception&) {
      throw AnalysisError(fmt::format("line {}: '{}' is not a number in column {}", number, raw, name));
    }
  };

  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, ',');
    if (columns.empty()) {
      for (std::size_t k = 0; k < fields.size(); ++k) columns[fields[k]] = k;
      if (!columns.contains("setting")) {
        throw AnalysisError("counts file header lacks a 'setting' column");
      }
      continue;
    }
    if (fields.size() != columns.size()) {
      throw AnalysisError(fmt::format("line {}: expected {} fields, got {}", number,
                                      columns.size(), fields.size()));
    }
    CountRecord record;
    record.label = fields.at(columns.at("setting"));
    const double coincidences = *field_number(fields, "coincidences", true);
    if (coincidences < 0.0) throw AnalysisError(fmt::format("line {}: negative counts", number));
    record.coincidences = static_cast<std::int64_t>(coincidences);
    record.singles_1 = static_cast<std::int64_t>(field_number(fields, "singles_1", false).value_or(0));
    record.singles_2 = static_cast<std::int64_t>(field_number(fields, "singles_2", false).value_or(0));
    record.accidentals_estimate = field_number(fields, "accidentals_estimate", false).value_or(0.0);
    record.expected_coincidences =
        field_number(fields, "expected_coincidences", false).value_or(coincidences);
    record.integration_time_s = field_number(fields, "integration_time_s", false).value_or(0.0);
    records.push_back(std::move(record));
  }
  if (records.empty()) throw AnalysisError("counts file has no records");
  return records;
}

std::string format_matrix_blocks(std::string_view name, const Eigen::Matrix4cd& matrix) {
  std::string out;
  for (const char* part : {"real", "imag"}) {
    out += fmt::format("[{}.{}]\n", name, part);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double v = part[0] == 'r' ? matrix(r, c).real() : matrix(r, c).imag();
        // Avoid "-0.000000000000" so identical matrices print identically.
        out += fmt::format("{}{: .12f}", c == 0 ? "" : " ", std::abs(v) < 5e-13 ? 0.0 : v);
      }
      out += '\n';
    }
  }
  return out;
}

Eigen::Matrix4cd parse_matrix_blocks(std::string_view text, std::string_view name) {
  Eigen::Matrix4d parts[2];
  for (int p = 0; p < 2; ++p) {
    const std::string header = fmt::format("[{}.{}]", name, p == 0 ? "real" : "imag");
    const auto at = text.find(header);
    if (at == std::string_view::npos) throw AnalysisError("missing block " + header);
    std::istringstream in{std::string(text.substr(at + header.size()))};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (!(in >> parts[p](r, c))) throw AnalysisError("truncated block " + header);
      }
    }
  }
  Eigen::Matrix4cd out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(r, c) = {parts[0](r, c), parts[1](r, c)};
  }
  return out;
}

std::string format_tomography_report(const TomographyResult& result,
                                     std::string_view projector_set,
                                     std::string_view provenance) {
  std::string out = provenance_line(provenance);
  out += "[tomography]\n";
  out += fmt::format("projector_set = {}\n", projector_set);
  out += fmt::format("log_likelihood = {:.10f}\n", result.log_likelihood);
  out += fmt::format("iterations = {}\n", result.iterations);
  out += fmt::format("converged = {}\n", result.converged ? "true" : "false");
  if (result.fidelity_vs_target) out += fmt::format("fidelity = {:.6f}\n", *result.fidelity_vs_target);
  if (result.fidelity_std) out += fmt::format("fidelity_std = {:.6f}\n", *result.fidelity_std);
  out += fmt::format("concurrence = {:.6f}\n", concurrence(result.rho));
  out += format_matrix_blocks("rho", result.rho.rho());
  return out;
}

}  // namespace spdcsim
