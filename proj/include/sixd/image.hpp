#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sixd {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

template <typename T>
struct Grid {
  int width = 0, height = 0;
  std::vector<T> data;  // row-major

  Grid() = default;
  Grid(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}
  T& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
  const T& at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
  friend bool operator==(const Grid&, const Grid&) = default;
};

using ColorImage = Grid<Rgb8>;
using MaskImage = Grid<std::uint8_t>;     // object ids, 0 = background
using DepthImage16 = Grid<std::uint16_t>; // millimeters

// Binary NetPBM: P6 for color, P5 for 8/16-bit single channel
// (16-bit samples big-endian, per the format). Bit-exact on round trip.
void write_ppm(const std::string& path, const ColorImage& img);
ColorImage read_ppm(const std::string& path);
void write_pgm8(const std::string& path, const MaskImage& img);
MaskImage read_pgm8(const std::string& path);
void write_pgm16(const std::string& path, const DepthImage16& img);
DepthImage16 read_pgm16(const std::string& path);

/// 8-bit RGB PNG (zlib-compressed); write-only, used for overlays.
void write_png(const std::string& path, const ColorImage& img);

}  // namespace sixd
