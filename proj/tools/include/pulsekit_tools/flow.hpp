#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pulsekit/respiration.hpp"
#include "pulsekit_tools/raster.hpp"

namespace pulsekit::tools {

struct Bbox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
};

struct FlowConfig {
  int max_shift_px = 8;
};

/// Block-matching stand-in for dense optical flow: each of the 10 x 10
/// cells of the box gets the integer vertical shift (pixels per frame,
/// positive = content moving down) that maximises NCC between consecutive
/// frames, refined by one gradient step clamped to half a pixel. Row k
/// describes frames k -> k+1.
MotionMatrix vertical_flow(const std::vector<Image>& frames, const Bbox& box, double fs,
                           const FlowConfig& cfg = {});

MotionMatrix vertical_flow(const std::filesystem::path& dir, const Bbox& box, double fs,
                           const FlowConfig& cfg = {});

/// Textured frames translated vertically by offset_px[k] (sub-pixel shifts
/// rendered analytically), plus optional per-pixel Gaussian sensor noise.
std::vector<Image> render_shifted_frames(const std::vector<double>& offset_px, std::size_t width,
                                         std::size_t height, double noise_sigma = 0.0,
                                         std::uint64_t seed = 0);

}  // namespace pulsekit::tools
