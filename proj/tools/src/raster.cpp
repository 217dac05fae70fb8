#include "pulsekit_tools/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pulsekit/error.hpp"

namespace pulsekit::tools {

namespace {

// Next header token, skipping whitespace and # comments.
long read_token(std::istream& in, const std::string& ctx) {
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      in.unget();
      break;
    }
  }
  long v = -1;
  if (!(in >> v) || v < 0) fail(Errc::ParseError, ctx + ": bad PNM header");
  return v;
}

}  // namespace

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string ctx = path.string();
  if (!in) fail(Errc::IoError, "cannot open '" + ctx + "'");
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool colour = magic == "P3" || magic == "P6";
  if (!(ascii || magic == "P5" || magic == "P6")) fail(Errc::ParseError, ctx + ": not a PGM/PPM file");

  Image img;
  img.width = static_cast<std::size_t>(read_token(in, ctx));
  img.height = static_cast<std::size_t>(read_token(in, ctx));
  const long maxval = read_token(in, ctx);
  if (img.width == 0 || img.height == 0 || maxval < 1 || maxval > 65535)
    fail(Errc::ParseError, ctx + ": bad PNM dimensions");
  if (!ascii) in.get();  // single whitespace before the raster

  const std::size_t channels = colour ? 3 : 1;
  const std::size_t count = img.width * img.height * channels;
  std::vector<double> raw(count);
  if (ascii) {
    for (auto& v : raw)
      if (!(in >> v)) fail(Errc::ParseError, ctx + ": truncated raster");
  } else {
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(count * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) fail(Errc::ParseError, ctx + ": truncated raster");
    for (std::size_t i = 0; i < count; ++i)
      raw[i] = bytes == 2 ? static_cast<double>(buf[2 * i] << 8 | buf[2 * i + 1]) : buf[i];
  }

  img.pixels.resize(img.width * img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = colour ? 0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2] : raw[i];
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> buf(img.pixels.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<unsigned char>(std::clamp(std::lround(img.pixels[i]), 0L, 255L));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) fail(Errc::IoError, "frame directory '" + dir.string() + "' not found");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace pulsekit::tools
