// Copyright 2026 The typedhwr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace typedhwr::imaging {

inline constexpr std::uint8_t kInk = 0;
inline constexpr std::uint8_t kBackground = 255;

// Axis-aligned integer rectangle, (x, y) is the top-left pixel.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(const Rect& other) const {
    return other.x >= x && other.y >= y && other.right() <= right() && other.bottom() <= bottom();
  }
  bool operator==(const Rect&) const = default;
};

Rect intersect(const Rect& a, const Rect& b);

// Single-channel 8-bit raster, row-major, origin top-left, 0 = ink.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = kBackground);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<std::uint8_t> row(int y) { return {data_.data() + static_cast<std::ptrdiff_t>(y) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const std::uint8_t> row(int y) const {
    return {data_.data() + static_cast<std::ptrdiff_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  // Copy of `r` clipped to the image.
  GrayImage crop(const Rect& r) const;
  GrayImage mirrored_horizontally() const;

  bool operator==(const GrayImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Aspect-free bilinear resize with half-pixel centers.
GrayImage resize_bilinear(const GrayImage& img, int width, int height);
// Background-filled samples outside the image.
double sample_bilinear(const GrayImage& img, double x, double y);

// Ink-union paste: dst = min(dst, src) over the overlap.
void paste_min(GrayImage& dst, const GrayImage& src, int x, int y);
void fill_rect(GrayImage& img, const Rect& r, std::uint8_t value);
void draw_rect_outline(GrayImage& img, const Rect& r, std::uint8_t value, int thickness = 1);

GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
// Dispatches on the extension (.png, .pgm).
GrayImage read_image(const std::filesystem::path& path);

}  // namespace typedhwr::imaging
