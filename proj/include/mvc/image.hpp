#pragma once

// Planar floating-point image container plus 8-bit PNG I/O with fixed
// encoder settings (deterministic bytes for identical pixels).

#include <string>
#include <vector>

#include "mvc/errors.hpp"

namespace mvc {

struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (gray) or 3 (rgb)
  std::vector<double> data;  // planar, [c][y][x], values in [0,1]

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

// Quantizes to 8 bits (round, clamp). Gray for 1 channel, RGB for 3.
void write_png(const std::string& path, const Image& img);

// Reads 8-bit gray or RGB(A) PNG into [0,1]; alpha is dropped, 16-bit
// files are reduced.
Image read_png(const std::string& path);

// Round to the 8-bit lattice in place; makes in-memory pipelines
// bit-identical with PNG round trips.
void quantize8(Image& img);

}  // namespace mvc
