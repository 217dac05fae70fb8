#pragma once

#include <filesystem>
#include <vector>

namespace pulsekit::tools {

/// Grayscale raster, row-major, values on the file's 0..maxval scale.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;
  double at(std::size_t x, std::size_t y) const noexcept { return pixels[y * width + x]; }
};

/// Reads P2/P3/P5/P6 files. Colour images are converted with Rec. 601 luma
/// weights.
Image read_pnm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM; values are rounded and clamped to 0..255.
void write_pgm(const std::filesystem::path& path, const Image& img);

/// .pgm/.ppm/.pnm files in a directory, sorted by file name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace pulsekit::tools
