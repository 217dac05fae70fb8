#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsekit/signal.hpp"

namespace pulsekit {

/// Numeric CSV with one header row. Column 0 is expected to be `t`.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable read_csv_table(const std::filesystem::path& path);
void write_csv_table(const std::filesystem::path& path, const CsvTable& table);

/// Checks a time column (strictly increasing, uniform within 1e-6 relative)
/// and returns the sampling rate inferred from the median step. When
/// `expected_fs` is given the inferred rate must match it to 1e-6 relative
/// and the declared value is returned.
double infer_sampling_rate(const std::vector<double>& t, std::optional<double> expected_fs,
                           const std::string& context);

/// `t,<name>` files.
TimeSeries read_time_series(const std::filesystem::path& path,
                            std::optional<double> expected_fs = std::nullopt);
void write_time_series(const std::filesystem::path& path, const TimeSeries& ts,
                       const std::string& name);

/// `t,r,g,b` files.
RgbTrace read_rgb_trace(const std::filesystem::path& path,
                        std::optional<double> expected_fs = std::nullopt);
void write_rgb_trace(const std::filesystem::path& path, const RgbTrace& trace);

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

}  // namespace pulsekit
