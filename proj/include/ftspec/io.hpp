#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ftspec/bandwidth.hpp"
#include "ftspec/core.hpp"
#include "ftspec/sim.hpp"

namespace ftspec::io {

using nlohmann::json;

// Functional series: header tau_0,...,tau_{d-1}, then one row per curve.
void write_series_csv(std::ostream& out, const FunctionalSeries& series);
[[nodiscard]] FunctionalSeries read_series_csv(std::istream& in);
void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& series);
[[nodiscard]] FunctionalSeries read_series_csv(const std::filesystem::path& path);

// {d, T, values}
[[nodiscard]] json series_to_json(const FunctionalSeries& series);
[[nodiscard]] FunctionalSeries series_from_json(const json& j);

// {re: [[..]], im: [[..]]}
[[nodiscard]] json matrix_to_json(const Eigen::MatrixXcd& m);
[[nodiscard]] Eigen::MatrixXcd matrix_from_json(const json& j);

[[nodiscard]] json estimate_to_json(const SpectralEstimate& est);
[[nodiscard]] SpectralEstimate estimate_from_json(const json& j);

/// index.csv (j, omega) plus freq_<j>_re.csv / freq_<j>_im.csv per frequency.
void write_estimate_csv_dir(const std::filesystem::path& dir, const SpectralEstimate& est);
[[nodiscard]] SpectralEstimate read_estimate_csv_dir(const std::filesystem::path& dir, const json& metadata);

[[nodiscard]] json bandwidth_report_to_json(const BandwidthReport& report);
[[nodiscard]] BandwidthReport bandwidth_report_from_json(const json& j);

// kernel,T,bandwidth_mode,mean_log2_imse,stderr
void write_imse_csv(std::ostream& out, const ImseResult& result);
[[nodiscard]] json imse_to_json(const ImseResult& result);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ftspec::io
