#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsekit/filter.hpp"
#include "pulsekit/signal.hpp"
#include "pulsekit/spectral.hpp"

namespace pulsekit {

/// N frames x 100 cells of vertical motion (10 x 10 grid, row-major cells).
class MotionMatrix {
 public:
  static constexpr std::size_t kCells = 100;

  /// `data` is row-major, rows * 100 finite values.
  MotionMatrix(std::vector<double> data, std::size_t rows, double fs, double t0 = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return kCells; }
  double fs() const noexcept { return fs_; }
  double t0() const noexcept { return t0_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * kCells + c]; }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double> column(std::size_t c) const;

 private:
  std::vector<double> data_;
  std::size_t rows_;
  double fs_;
  double t0_;
};

struct ZcaResult {
  MotionMatrix whitened;
  /// Covariance eigenvalues, ascending.
  std::vector<double> eigenvalues;
  double epsilon = 0.0;
  std::size_t below_epsilon = 0;
  /// Set when any eigenvalue is below epsilon.
  bool rank_deficient = false;
};

struct ZcaConfig {
  /// Regulariser relative to the largest covariance eigenvalue.
  double relative_epsilon = 1e-9;
  /// Absolute regulariser; overrides relative_epsilon when set.
  std::optional<double> epsilon;
  /// More than this fraction of eigenvalues below epsilon throws RankDeficient.
  double max_deficient_fraction = 0.2;
};

/// Centres the columns and applies W = U (L + eps)^-1/2 U^T on the right,
/// with U, L from the population covariance. Needs more than 100 rows.
ZcaResult zca_whiten(const MotionMatrix& m, const ZcaConfig& cfg = {});

struct RespConfig {
  BandpassSpec ppg_band = BandpassSpec::from_bpm(6.0, 24.0, 3);
  /// Band used to score whitened components.
  double snr_low_bpm = 10.0;
  double snr_high_bpm = 20.0;
  std::size_t n_components = 3;
  ZcaConfig zca;
  /// Motion output whose band SNR falls below this is flagged.
  double min_output_snr = 0.5;
};

struct PpgRespiration {
  TimeSeries waveform;
  std::vector<std::string> used;
  /// Channels skipped for zero variance.
  std::vector<std::string> skipped;
};

/// Z-normalises every full channel, bandpasses it and sums in name order.
/// Dead channels are skipped; throws AllChannelsDead if none remain.
PpgRespiration resp_from_ppg(const ChannelSet& channels, const RespConfig& cfg = {});

struct MotionRespiration {
  TimeSeries waveform;
  /// Column indices averaged, best first.
  std::vector<std::size_t> components;
  std::vector<double> component_snr;
  double output_snr = 0.0;
  bool low_confidence = false;
  std::size_t below_epsilon = 0;
};

/// Whitens, scores each component by band SNR, and averages the best
/// n_components after flipping them to agree in sign with the best one.
/// Needs at least 30 s of frames.
MotionRespiration resp_from_motion(const MotionMatrix& m, const RespConfig& cfg = {});

/// 30 s windows, 1 s hop, 6-30 breaths/min search band.
inline RateSeries estimate_resp_rate(const TimeSeries& ts, double window_s = 30.0,
                                     double hop_s = 1.0) {
  return estimate_rate_series(ts, resp_rate_config(window_s, hop_s));
}

/// CSV with header `t,c00..c99`.
MotionMatrix read_motion_matrix(const std::filesystem::path& path,
                                std::optional<double> expected_fs = std::nullopt);
void write_motion_matrix(const std::filesystem::path& path, const MotionMatrix& m);

}  // namespace pulsekit
