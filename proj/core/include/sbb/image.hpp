#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sbb {

/// 8-bit luminance raster, row-major.
struct LuminanceImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height values

  bool valid() const {
    return pixels.size() == static_cast<std::size_t>(width) * height;
  }
};

/// Reads a binary PGM (P5) file with maxval <= 255. RGB inputs are out of
/// scope; convert externally (BT.601 weights) before hashing.
LuminanceImage load_pgm(std::istream& in);
LuminanceImage load_pgm_file(const std::string& path);

void write_pgm(std::ostream& out, const LuminanceImage& img);

}  // namespace sbb
