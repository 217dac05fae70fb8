#include "pulsekit/respiration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulsekit/error.hpp"
#include "pulsekit/signal_io.hpp"
#include "pulsekit/stats.hpp"

namespace pulsekit {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string cell_name(std::size_t c) {
  std::string s = "c00";
  s[1] = static_cast<char>('0' + c / 10);
  s[2] = static_cast<char>('0' + c % 10);
  return s;
}

}  // namespace

MotionMatrix::MotionMatrix(std::vector<double> data, std::size_t rows, double fs, double t0)
    : data_(std::move(data)), rows_(rows), fs_(fs), t0_(t0) {
  if (rows_ == 0) fail(Errc::InvalidArgument, "motion matrix has no rows");
  if (data_.size() != rows_ * kCells)
    fail(Errc::InvalidArgument, "motion matrix must have exactly 100 columns");
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) fail(Errc::InvalidArgument, "sampling rate must be > 0");
  for (double v : data_)
    if (!std::isfinite(v)) fail(Errc::NonFiniteSample, "motion matrix contains NaN/Inf");
}

std::vector<double> MotionMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * kCells + c];
  return out;
}

ZcaResult zca_whiten(const MotionMatrix& m, const ZcaConfig& cfg) {
  const std::size_t n = m.rows();
  const std::size_t d = MotionMatrix::kCells;
  if (n <= d) fail(Errc::TooShort, "ZCA needs more rows than columns");

  Eigen::Map<const RowMatrix> x(m.data().data(), static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(d));
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const RowMatrix xc = x.rowwise() - mu;
  const Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) fail(Errc::RankDeficient, "covariance eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const double lmax = lambda.maxCoeff();
  const double eps = cfg.epsilon ? *cfg.epsilon : cfg.relative_epsilon * lmax;

  std::size_t below = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] > eps)) ++below;
  if (static_cast<double>(below) > cfg.max_deficient_fraction * static_cast<double>(d))
    fail(Errc::RankDeficient, std::to_string(below) + " of 100 covariance eigenvalues below epsilon");
  if (!(eps > 0.0)) fail(Errc::RankDeficient, "whitening regulariser is not positive");

  const Eigen::VectorXd scale = (lambda.array() + eps).rsqrt();
  const Eigen::MatrixXd w = eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
  const RowMatrix out = xc * w;

  ZcaResult res{MotionMatrix(std::vector<double>(out.data(), out.data() + out.size()), n, m.fs(), m.t0()),
                std::vector<double>(lambda.data(), lambda.data() + lambda.size()), eps, below,
                below > 0};
  return res;
}

PpgRespiration resp_from_ppg(const ChannelSet& channels, const RespConfig& cfg) {
  if (channels.empty()) fail(Errc::InvalidArgument, "no PPG channels");
  const double fs = channels.common_fs();
  const auto& first = channels.begin()->second;
  for (const auto& [name, ts] : channels)
    if (ts.size() != first.size() || std::abs(ts.t0() - first.t0()) > 0.5 / fs)
      fail(Errc::InvalidArgument, "channel '" + name + "' is not aligned with the others");

  const auto filter = butterworth_bandpass(cfg.ppg_band, fs);
  std::vector<double> sum(first.size(), 0.0);
  std::vector<std::string> used, skipped;
  for (const auto& [name, ts] : channels) {
    std::vector<double> z;
    try {
      z = znormalize(ts.samples());
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroVariance) throw;
      skipped.push_back(name);
      continue;
    }
    const auto f = filtfilt(filter, z);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += f[i];
    used.push_back(name);
  }
  if (used.empty()) fail(Errc::AllChannelsDead, "every PPG channel has zero variance");
  return {TimeSeries(std::move(sum), fs, first.t0()), std::move(used), std::move(skipped)};
}

MotionRespiration resp_from_motion(const MotionMatrix& m, const RespConfig& cfg) {
  if (static_cast<double>(m.rows()) / m.fs() < 30.0 - 1e-9)
    fail(Errc::TooShort, "motion route needs at least 30 s of frames");
  if (cfg.n_components == 0 || cfg.n_components > MotionMatrix::kCells)
    fail(Errc::InvalidArgument, "component count must be in [1, 100]");

  const auto zca = zca_whiten(m, cfg.zca);
  const double lo = cfg.snr_low_bpm / 60.0;
  const double hi = cfg.snr_high_bpm / 60.0;

  std::vector<std::vector<double>> comps(MotionMatrix::kCells);
  std::vector<double> snr(MotionMatrix::kCells);
  for (std::size_t c = 0; c < MotionMatrix::kCells; ++c) {
    comps[c] = zca.whitened.column(c);
    snr[c] = band_snr(TimeSeries(comps[c], m.fs(), m.t0()), lo, hi);
  }
  std::vector<std::size_t> order(MotionMatrix::kCells);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return snr[a] > snr[b]; });
  order.resize(cfg.n_components);

  const auto& lead = comps[order.front()];
  std::vector<double> avg(m.rows(), 0.0);
  MotionRespiration res{TimeSeries({0.0}, m.fs()), {}, {}, 0.0, false, zca.below_epsilon};
  for (std::size_t c : order) {
    double sign = 1.0;
    if (c != order.front()) {
      try {
        if (pearson(lead, comps[c]) < 0.0) sign = -1.0;
      } catch (const Error&) {
      }
    }
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += sign * comps[c][i];
    res.components.push_back(c);
    res.component_snr.push_back(snr[c]);
  }
  for (double& v : avg) v /= static_cast<double>(order.size());

  res.waveform = TimeSeries(std::move(avg), m.fs(), m.t0());
  res.output_snr = band_snr(res.waveform, lo, hi);
  res.low_confidence = !(res.output_snr >= cfg.min_output_snr);
  return res;
}

MotionMatrix read_motion_matrix(const std::filesystem::path& path, std::optional<double> expected_fs) {
  const auto table = read_csv_table(path);
  const std::string ctx = path.string();
  if (table.header.size() != MotionMatrix::kCells + 1 || table.header[0] != "t")
    fail(Errc::ParseError, ctx + ": expected header t,c00..c99");
  for (std::size_t c = 0; c < MotionMatrix::kCells; ++c)
    if (table.header[c + 1] != cell_name(c))
      fail(Errc::ParseError, ctx + ": unexpected column '" + table.header[c + 1] + "'");
  const std::size_t rows = table.rows();
  if (rows < 2) fail(Errc::ParseError, ctx + ": needs at least two rows");
  const double fs = infer_sampling_rate(table.columns[0], expected_fs, ctx);
  std::vector<double> data(rows * MotionMatrix::kCells);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < MotionMatrix::kCells; ++c)
      data[r * MotionMatrix::kCells + c] = table.columns[c + 1][r];
  return MotionMatrix(std::move(data), rows, fs, table.columns[0].front());
}

void write_motion_matrix(const std::filesystem::path& path, const MotionMatrix& m) {
  CsvTable table;
  table.header.push_back("t");
  for (std::size_t c = 0; c < MotionMatrix::kCells; ++c) table.header.push_back(cell_name(c));
  table.columns.resize(MotionMatrix::kCells + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) table.columns[0].push_back(m.t0() + static_cast<double>(r) / m.fs());
  for (std::size_t c = 0; c < MotionMatrix::kCells; ++c) table.columns[c + 1] = m.column(c);
  write_csv_table(path, table);
}

}  // namespace pulsekit
