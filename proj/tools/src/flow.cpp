#include "pulsekit_tools/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pulsekit/error.hpp"
#include "pulsekit/parallel.hpp"
#include "pulsekit/synth.hpp"

namespace pulsekit::tools {

namespace {

constexpr std::size_t kGrid = 10;

double ncc(const Image& a, const Image& b, std::size_t x0, std::size_t x1, std::size_t y0,
           std::size_t y1, long shift) {
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  double n = 0;
  for (std::size_t y = y0; y < y1; ++y) {
    const auto yb = static_cast<std::size_t>(static_cast<long>(y) + shift);
    for (std::size_t x = x0; x < x1; ++x) {
      const double va = a.at(x, y);
      const double vb = b.at(x, yb);
      sa += va;
      sb += vb;
      saa += va * va;
      sbb += vb * vb;
      sab += va * vb;
      n += 1;
    }
  }
  const double va = saa - sa * sa / n;
  const double vb = sbb - sb * sb / n;
  if (!(va > 1e-12) || !(vb > 1e-12)) return std::numeric_limits<double>::quiet_NaN();
  return (sab - sa * sb / n) / std::sqrt(va * vb);
}

/// Residual shift after aligning b by s: b(y + s) ~ a(y - d), so
/// d = -sum (b(y + s) - a(y)) a'(y) / sum a'(y)^2.
double gradient_step(const Image& a, const Image& b, std::size_t x0, std::size_t x1, std::size_t y0,
                     std::size_t y1, long s) {
  double num = 0.0, den = 0.0;
  for (std::size_t y = y0; y < y1; ++y) {
    const std::size_t up = y > 0 ? y - 1 : y;
    const std::size_t down = y + 1 < a.height ? y + 1 : y;
    const auto yb = static_cast<std::size_t>(static_cast<long>(y) + s);
    for (std::size_t x = x0; x < x1; ++x) {
      const double g = (a.at(x, down) - a.at(x, up)) / static_cast<double>(down - up);
      num += (b.at(x, yb) - a.at(x, y)) * g;
      den += g * g;
    }
  }
  if (!(den > 0.0)) return 0.0;
  return std::clamp(-num / den, -0.5, 0.5);
}

}  // namespace

MotionMatrix vertical_flow(const std::vector<Image>& frames, const Bbox& box, double fs,
                           const FlowConfig& cfg) {
  if (frames.size() < 2) fail(Errc::TooShort, "flow needs at least two frames");
  const auto w = frames.front().width;
  const auto h = frames.front().height;
  for (const auto& f : frames)
    if (f.width != w || f.height != h) fail(Errc::FrameSizeMismatch, "frames differ in size");
  if (box.width < kGrid || box.height < kGrid || box.x + box.width > w || box.y + box.height > h)
    fail(Errc::InvalidArgument, "bounding box must hold a 10x10 grid inside the frame");

  const std::size_t rows = frames.size() - 1;
  std::vector<double> data(rows * MotionMatrix::kCells, 0.0);
  parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Image& a = frames[k];
      const Image& b = frames[k + 1];
      for (std::size_t gy = 0; gy < kGrid; ++gy) {
        for (std::size_t gx = 0; gx < kGrid; ++gx) {
          const std::size_t x0 = box.x + gx * box.width / kGrid;
          const std::size_t x1 = box.x + (gx + 1) * box.width / kGrid;
          const std::size_t y0 = box.y + gy * box.height / kGrid;
          const std::size_t y1 = box.y + (gy + 1) * box.height / kGrid;
          std::vector<double> r(2 * cfg.max_shift_px + 1, std::numeric_limits<double>::quiet_NaN());
          for (long s = -cfg.max_shift_px; s <= cfg.max_shift_px; ++s) {
            if (static_cast<long>(y0) + s < 0 || static_cast<long>(y1) + s > static_cast<long>(h)) continue;
            r[static_cast<std::size_t>(s + cfg.max_shift_px)] = ncc(a, b, x0, x1, y0, y1, s);
          }
          std::size_t best = r.size();
          for (std::size_t i = 0; i < r.size(); ++i)
            if (!std::isnan(r[i]) && (best == r.size() || r[i] > r[best] ||
                                      (r[i] == r[best] && std::abs(static_cast<long>(i) - cfg.max_shift_px) <
                                                              std::abs(static_cast<long>(best) - cfg.max_shift_px))))
              best = i;
          double shift = 0.0;
          if (best != r.size()) {
            const long s = static_cast<long>(best) - cfg.max_shift_px;
            shift = static_cast<double>(s) + gradient_step(a, b, x0, x1, y0, y1, s);
          }
          data[k * MotionMatrix::kCells + gy * kGrid + gx] = shift;
        }
      }
    }
  });
  return MotionMatrix(std::move(data), rows, fs, 1.0 / fs);
}

MotionMatrix vertical_flow(const std::filesystem::path& dir, const Bbox& box, double fs,
                           const FlowConfig& cfg) {
  std::vector<Image> frames;
  for (const auto& p : list_frames(dir)) frames.push_back(read_pnm(p));
  return vertical_flow(frames, box, fs, cfg);
}

std::vector<Image> render_shifted_frames(const std::vector<double>& offset_px, std::size_t width,
                                         std::size_t height, double noise_sigma, std::uint64_t seed) {
  const CounterRng rng(seed, "frames");
  constexpr double tau = 2.0 * std::numbers::pi;
  std::vector<Image> out;
  out.reserve(offset_px.size());
  for (double off : offset_px) {
    Image img{width, height, std::vector<double>(width * height)};
    for (std::size_t y = 0; y < height; ++y) {
      const double yy = static_cast<double>(y) - off;
      for (std::size_t x = 0; x < width; ++x) {
        const double xx = static_cast<double>(x);
        img.pixels[y * width + x] = 128.0 + 45.0 * std::sin(tau * yy / 13.0 + 0.3 * std::sin(tau * xx / 19.0)) +
                                    30.0 * std::cos(tau * (0.6 * yy + 0.4 * xx) / 7.0);
      }
    }
    if (noise_sigma > 0.0) {
      const std::uint64_t base = static_cast<std::uint64_t>(out.size()) * width * height;
      for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] += noise_sigma * rng.normal(base + i);
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace pulsekit::tools
