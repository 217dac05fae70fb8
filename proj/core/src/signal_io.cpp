#include "pulsekit/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r'))
      c.remove_suffix(1);
  }
  return cells;
}

double parse_double(std::string_view cell, const std::string& context) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty())
    fail(Errc::ParseError, context + ": cannot parse number '" + std::string(cell) + "'");
  return v;
}

std::size_t column_index(const CsvTable& table, const std::string& name,
                         const std::string& context) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) fail(Errc::ParseError, context + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open '" + path.string() + "'");
  const std::string context = path.string();

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    if (table.header.empty()) {
      for (auto c : cells) table.header.emplace_back(c);
      table.columns.resize(table.header.size());
      continue;
    }
    if (cells.size() != table.header.size())
      fail(Errc::ParseError,
           context + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(table.header.size()) + " columns");
    for (std::size_t j = 0; j < cells.size(); ++j)
      table.columns[j].push_back(
          parse_double(cells[j], context + ":" + std::to_string(line_no)));
  }
  if (table.header.empty()) fail(Errc::ParseError, context + ": missing header row");
  return table;
}

void write_csv_table(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      out << (j ? "," : "") << format_double(table.columns[j][i]);
    out << '\n';
  }
  if (!out) fail(Errc::IoError, "write failed for '" + path.string() + "'");
}

double infer_sampling_rate(const std::vector<double>& t, std::optional<double> expected_fs,
                           const std::string& context) {
  if (t.size() < 2) fail(Errc::TooShort, context + ": need at least two rows");
  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    dt[i - 1] = t[i] - t[i - 1];
    if (!(dt[i - 1] > 0.0)) fail(Errc::ParseError, context + ": time column not strictly increasing");
  }
  std::vector<double> sorted = dt;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double step = sorted[sorted.size() / 2];
  for (double d : dt) {
    if (std::abs(d - step) > 1e-6 * step)
      fail(Errc::ParseError, context + ": time column is not uniformly spaced");
  }
  const double fs = 1.0 / step;
  if (expected_fs) {
    if (std::abs(fs - *expected_fs) > 1e-6 * *expected_fs)
      fail(Errc::InvalidArgument, context + ": sampling rate " + format_double(fs) +
                                      " Hz does not match declared " +
                                      format_double(*expected_fs) + " Hz");
    return *expected_fs;
  }
  return fs;
}

TimeSeries read_time_series(const std::filesystem::path& path, std::optional<double> expected_fs) {
  auto table = read_csv_table(path);
  const std::string context = path.string();
  if (table.header.size() != 2 || table.header[0] != "t")
    fail(Errc::ParseError, context + ": expected header 't,<name>'");
  const double fs = infer_sampling_rate(table.columns[0], expected_fs, context);
  const double t0 = table.columns[0].front();
  return TimeSeries(std::move(table.columns[1]), fs, t0);
}

void write_time_series(const std::filesystem::path& path, const TimeSeries& ts,
                       const std::string& name) {
  CsvTable table;
  table.header = {"t", name};
  table.columns.resize(2);
  table.columns[0].reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) table.columns[0].push_back(ts.time_at(i));
  table.columns[1] = ts.values();
  write_csv_table(path, table);
}

RgbTrace read_rgb_trace(const std::filesystem::path& path, std::optional<double> expected_fs) {
  auto table = read_csv_table(path);
  const std::string context = path.string();
  if (table.header.empty() || table.header[0] != "t")
    fail(Errc::ParseError, context + ": expected header 't,r,g,b'");
  const auto ri = column_index(table, "r", context);
  const auto gi = column_index(table, "g", context);
  const auto bi = column_index(table, "b", context);
  const double fs = infer_sampling_rate(table.columns[0], expected_fs, context);
  const double t0 = table.columns[0].front();
  return RgbTrace(std::move(table.columns[ri]), std::move(table.columns[gi]),
                  std::move(table.columns[bi]), fs, t0);
}

void write_rgb_trace(const std::filesystem::path& path, const RgbTrace& trace) {
  CsvTable table;
  table.header = {"t", "r", "g", "b"};
  table.columns.resize(4);
  for (std::size_t i = 0; i < trace.size(); ++i)
    table.columns[0].push_back(trace.t0() + static_cast<double>(i) / trace.fs());
  table.columns[1].assign(trace.r().begin(), trace.r().end());
  table.columns[2].assign(trace.g().begin(), trace.g().end());
  table.columns[3].assign(trace.b().begin(), trace.b().end());
  write_csv_table(path, table);
}

}  // namespace pulsekit
