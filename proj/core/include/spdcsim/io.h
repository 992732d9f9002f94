#pragma once

// Output formats.
//
// Delimited text is comma separated with one header row. Every file starts
// with a provenance comment line ("# spdcsim ...") carrying the config hash
// and seed; readers skip lines starting with '#'.
//
//   JSI matrix     first row "signal_nm\idler_nm,<idler wavelengths...>",
//                  then one row per signal wavelength.
//   spectrum       wavelength_nm,intensity
//   fringe counts  theta1_deg,theta2_deg,singles_1,singles_2,coincidences,
//                  coincidence_err,accidentals_estimate,expected_coincidences,
//                  integration_time_s
//   tomo counts    setting,singles_1,singles_2,coincidences,coincidence_err,
//                  accidentals_estimate,expected_coincidences,integration_time_s
//
// Structured text is "key = value" lines grouped under [section] headers.
// Density matrices are written as [<name>.real] and [<name>.imag] blocks of
// four rows in basis order HH, HV, VH, VV.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdcsim/measurement_sim.h"
#include "spdcsim/polarization_state.h"
#include "spdcsim/spectral_engine.h"
#include "spdcsim/tomography.h"

namespace spdcsim {

// Writes to a sibling temporary file and renames it over `path`. On failure
// the temporary is removed and std::filesystem::filesystem_error or
// std::runtime_error propagates.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

std::string format_jsi_csv(const JointSpectrum& spectrum, std::string_view provenance);
std::string format_spectrum_csv(const SampledSpectrum& spectrum, std::string_view provenance);
std::string format_fringe_csv(std::span<const CountRecord> records, std::string_view provenance);
std::string format_tomography_csv(std::span<const CountRecord> records,
                                  std::string_view provenance);

// Reads the tomo-counts layout. Requires the setting and coincidences
// columns; others are optional. Throws AnalysisError on malformed rows.
std::vector<CountRecord> parse_tomography_csv(std::string_view text);

std::string format_matrix_blocks(std::string_view name, const Eigen::Matrix4cd& matrix);
// Parses the blocks written by format_matrix_blocks.
Eigen::Matrix4cd parse_matrix_blocks(std::string_view text, std::string_view name);

std::string format_tomography_report(const TomographyResult& result,
                                     std::string_view projector_set,
                                     std::string_view provenance);

}  // namespace spdcsim
