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

#include "typedhwr/imaging/gray_image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "typedhwr/common/error.hpp"

namespace typedhwr::imaging {

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right()), y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
  if (width < 1 || height < 1) throw ConfigError("image dimensions must be >= 1");
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) throw ConfigError("image dimensions must be >= 1");
  if (data_.size() != static_cast<std::size_t>(width) * height) throw ShapeMismatchError("image data size mismatch");
}

GrayImage GrayImage::crop(const Rect& r) const {
  const Rect clipped = intersect(r, {0, 0, width_, height_});
  if (clipped.w <= 0 || clipped.h <= 0) throw BoundsError("crop rectangle outside image");
  GrayImage out(clipped.w, clipped.h);
  for (int y = 0; y < clipped.h; ++y) {
    const auto src = row(clipped.y + y).subspan(static_cast<std::size_t>(clipped.x), static_cast<std::size_t>(clipped.w));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

GrayImage GrayImage::mirrored_horizontally() const {
  GrayImage out = *this;
  for (int y = 0; y < height_; ++y) std::reverse(out.row(y).begin(), out.row(y).end());
  return out;
}

double sample_bilinear(const GrayImage& img, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double fx = x - fx0, fy = y - fy0;
  auto px = [&](int xx, int yy) -> double { return img.in_bounds(xx, yy) ? img.at(xx, yy) : kBackground; };
  if (fx == 0.0 && fy == 0.0) return px(x0, y0);
  if (fy == 0.0) return (1.0 - fx) * px(x0, y0) + fx * px(x0 + 1, y0);
  if (fx == 0.0) return (1.0 - fy) * px(x0, y0) + fy * px(x0, y0 + 1);
  const double top = (1.0 - fx) * px(x0, y0) + fx * px(x0 + 1, y0);
  const double bottom = (1.0 - fx) * px(x0, y0 + 1) + fx * px(x0 + 1, y0 + 1);
  return (1.0 - fy) * top + fy * bottom;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  GrayImage out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double src_y = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height() - 1));
    for (int x = 0; x < width; ++x) {
      const double src_x = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width() - 1));
      out.at(x, y) = static_cast<std::uint8_t>(std::lround(sample_bilinear(img, src_x, src_y)));
    }
  }
  return out;
}

void paste_min(GrayImage& dst, const GrayImage& src, int x, int y) {
  const Rect overlap = intersect({x, y, src.width(), src.height()}, {0, 0, dst.width(), dst.height()});
  for (int yy = overlap.y; yy < overlap.bottom(); ++yy) {
    for (int xx = overlap.x; xx < overlap.right(); ++xx) {
      dst.at(xx, yy) = std::min(dst.at(xx, yy), src.at(xx - x, yy - y));
    }
  }
}

void fill_rect(GrayImage& img, const Rect& r, std::uint8_t value) {
  const Rect clipped = intersect(r, {0, 0, img.width(), img.height()});
  for (int y = clipped.y; y < clipped.bottom(); ++y) {
    for (int x = clipped.x; x < clipped.right(); ++x) img.at(x, y) = value;
  }
}

void draw_rect_outline(GrayImage& img, const Rect& r, std::uint8_t value, int thickness) {
  fill_rect(img, {r.x, r.y, r.w, thickness}, value);
  fill_rect(img, {r.x, r.bottom() - thickness, r.w, thickness}, value);
  fill_rect(img, {r.x, r.y, thickness, r.h}, value);
  fill_rect(img, {r.right() - thickness, r.y, thickness, r.h}, value);
}

GrayImage read_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("cannot open " + path.string());
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw CorruptFileError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  const int width = static_cast<int>(image.width), height = static_cast<int>(image.height);
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw CorruptFileError(path.string() + ": " + image.message);
  }
  return GrayImage(width, height, std::move(data));
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + image.message);
  }
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw CorruptFileError("not a binary PGM: " + path.string());
  auto next_int = [&]() {
    int value = 0;
    while (true) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      if (!(in >> value)) throw CorruptFileError("malformed PGM header: " + path.string());
      return value;
    }
  };
  const int width = next_int(), height = next_int(), maxval = next_int();
  if (maxval != 255) throw CorruptFileError("only 8-bit PGM supported: " + path.string());
  in.get();
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    throw CorruptFileError("truncated PGM: " + path.string());
  }
  return GrayImage(width, height, std::move(data));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
}

GrayImage read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") return read_pgm(path);
  return read_png(path);
}

}  // namespace typedhwr::imaging
