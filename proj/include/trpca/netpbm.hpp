#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace trpca {

/// 8-bit binary Netpbm raster: P5 (channels = 1) or P6 (channels = 3).
/// Pixels are row-major with channels interleaved, as on disk.
struct NetpbmImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col, int channel = 0) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

/// Reads a P5/P6 header (whitespace and '#' comments between fields, one
/// whitespace byte after maxval) and its raster. maxval must be 255.
/// Throws ParseError on anything else.
NetpbmImage read_netpbm(std::istream& in);
NetpbmImage read_netpbm(const std::filesystem::path& path);

/// Writes "P5\n<w> <h>\n255\n" (or P6) followed by the raster.
void write_netpbm(std::ostream& out, const NetpbmImage& img);
void write_netpbm(const std::filesystem::path& path, const NetpbmImage& img);

}  // namespace trpca
