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

#include "typedhwr/imaging/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "typedhwr/common/error.hpp"

namespace typedhwr::imaging {

AffineTransform2D AffineTransform2D::rotation(double radians, double cx, double cy) {
  const double cs = std::cos(radians), sn = std::sin(radians);
  return {cs, -sn, cx - cs * cx + sn * cy, sn, cs, cy - sn * cx - cs * cy};
}

AffineTransform2D AffineTransform2D::shear_x(double k, double cy) { return {1, k, -k * cy, 0, 1, 0}; }

AffineTransform2D AffineTransform2D::scaling(double s, double cx, double cy) {
  return {s, 0, cx - s * cx, 0, s, cy - s * cy};
}

AffineTransform2D AffineTransform2D::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det)) throw InvalidTransformError("affine transform is not invertible");
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  return {ia, ib, -(ia * tx + ib * ty), ic, id, -(ic * tx + id * ty)};
}

AffineTransform2D AffineTransform2D::then_after(const AffineTransform2D& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, a * o.tx + b * o.ty + tx,
          c * o.a + d * o.c, c * o.b + d * o.d, c * o.tx + d * o.ty + ty};
}

PlacedImage apply_affine_placed(const GrayImage& img, const AffineTransform2D& t) {
  const double det = t.determinant();
  if (!(std::abs(det) > 1e-12) || !std::isfinite(det)) throw InvalidTransformError("degenerate affine transform");
  const AffineTransform2D inv = t.inverse();
  const double w1 = img.width() - 1, h1 = img.height() - 1;
  double min_x = 0, min_y = 0, max_x = w1, max_y = h1;
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{w1, 0.0}, std::pair{0.0, h1}, std::pair{w1, h1}}) {
    const auto [u, v] = t.apply(x, y);
    min_x = std::min(min_x, u);
    max_x = std::max(max_x, u);
    min_y = std::min(min_y, v);
    max_y = std::max(max_y, v);
  }
  PlacedImage out;
  out.origin_x = static_cast<int>(std::floor(min_x));
  out.origin_y = static_cast<int>(std::floor(min_y));
  const int width = static_cast<int>(std::ceil(max_x)) - out.origin_x + 1;
  const int height = static_cast<int>(std::ceil(max_y)) - out.origin_y + 1;
  out.image = GrayImage(width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const auto [sx, sy] = inv.apply(u + out.origin_x, v + out.origin_y);
      out.image.at(u, v) = static_cast<std::uint8_t>(std::lround(sample_bilinear(img, sx, sy)));
    }
  }
  return out;
}

GrayImage apply_affine(const GrayImage& img, const AffineTransform2D& t) { return apply_affine_placed(img, t).image; }

ElasticParams::ElasticParams(double s, double a) : sigma(std::clamp(s, kMinSigma, kMaxSigma)), alpha(a) {
  if (!(alpha >= 0.0)) throw ConfigError("elastic alpha must be >= 0");
}

ElasticParams ElasticParams::sample(Xoshiro256& rng, double text_height) {
  return ElasticParams(rng.normal(8.0, 2.0), text_height);
}

namespace {

// Reflect-101 index into [0, n).
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    sum += k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
  }
  for (auto& v : k) v /= sum;
  return k;
}

void blur(std::vector<double>& field, int width, int height, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(field.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               field[static_cast<std::size_t>(y) * width + reflect(x + k, width)];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               tmp[static_cast<std::size_t>(reflect(y + k, height)) * width + x];
      }
      field[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

}  // namespace

DisplacementField elastic_field(int width, int height, const ElasticParams& p, const SeedStream& seed) {
  DisplacementField f{width, height, {}, {}};
  const std::size_t n = static_cast<std::size_t>(width) * height;
  f.dx.resize(n);
  f.dy.resize(n);
  Xoshiro256 rng = seed.rng();
  for (std::size_t i = 0; i < n; ++i) f.dx[i] = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) f.dy[i] = rng.uniform(-1.0, 1.0);
  const auto kernel = gaussian_kernel(p.sigma);
  blur(f.dx, width, height, kernel);
  blur(f.dy, width, height, kernel);
  double max_mag = 0;
  for (std::size_t i = 0; i < n; ++i) max_mag = std::max(max_mag, std::hypot(f.dx[i], f.dy[i]));
  const double scale = max_mag > 0 ? p.alpha / max_mag : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.dx[i] *= scale;
    f.dy[i] *= scale;
  }
  return f;
}

GrayImage apply_elastic(const GrayImage& img, const ElasticParams& p, const SeedStream& seed) {
  if (p.alpha == 0.0) return img;
  const auto field = elastic_field(img.width(), img.height(), p, seed);
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * img.width() + x;
      out.at(x, y) = static_cast<std::uint8_t>(std::lround(sample_bilinear(img, x + field.dx[i], y + field.dy[i])));
    }
  }
  return out;
}

std::vector<bool> StructuringElement::mask() const {
  if (radius < 1 || radius > 3) throw ConfigError("structuring element radius must be in [1, 3]");
  const int n = side();
  std::vector<bool> m(static_cast<std::size_t>(n * n), false);
  const double limit = (radius + 0.5) * (radius + 0.5);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      bool on = true;
      if (shape == ElementShape::Ellipse) on = dx * dx + dy * dy <= limit;
      if (shape == ElementShape::Cross) on = dx == 0 || dy == 0;
      m[static_cast<std::size_t>((dy + radius) * n + dx + radius)] = on;
    }
  }
  return m;
}

std::string MorphOp::describe() const {
  static constexpr const char* kKinds[] = {"Erode", "Dilate", "Gradient", "Close"};
  static constexpr const char* kShapes[] = {"Rect", "Ellipse", "Cross"};
  char buf[64];
  std::snprintf(buf, sizeof buf, "morph(%s,%s,%d)", kKinds[static_cast<int>(kind)],
                kShapes[static_cast<int>(element.shape)], element.radius);
  return buf;
}

namespace {

template <typename Pick>
GrayImage rank_filter(const GrayImage& img, const StructuringElement& se, Pick pick) {
  const auto mask = se.mask();
  const int r = se.radius, n = se.side();
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::uint8_t acc = img.at(x, y);
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (!mask[static_cast<std::size_t>((dy + r) * n + dx + r)] || !img.in_bounds(x + dx, y + dy)) continue;
          acc = pick(acc, img.at(x + dx, y + dy));
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

GrayImage min_filter(const GrayImage& img, const StructuringElement& se) {
  return rank_filter(img, se, [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

GrayImage max_filter(const GrayImage& img, const StructuringElement& se) {
  return rank_filter(img, se, [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

}  // namespace

GrayImage apply_morph(const GrayImage& img, const MorphOp& op) {
  switch (op.kind) {
    case MorphKind::Erode: return min_filter(img, op.element);
    case MorphKind::Dilate: return max_filter(img, op.element);
    case MorphKind::Close: return max_filter(min_filter(img, op.element), op.element);
    case MorphKind::Gradient: {
      const GrayImage lo = min_filter(img, op.element);
      GrayImage out = max_filter(img, op.element);
      for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = static_cast<std::uint8_t>(255 - (out.data()[i] - lo.data()[i]));
      }
      return out;
    }
  }
  throw ConfigError("unknown morphology kind");
}

CompositeParams CompositeParams::sample(Xoshiro256& rng) {
  CompositeParams p;
  p.overflow = rng.uniform(1.0, 1.15);
  p.margin = rng.uniform(0.05, 0.20);
  return p;
}

CompositeResult composite_into_field(const GrayImage& img, const GrayImage& form, const Rect& box,
                                     const CompositeParams& params) {
  if (box.w <= 0 || box.h <= 0) throw BoundsError("field box must have positive size");
  if (!Rect{0, 0, form.width(), form.height()}.contains(box)) throw BoundsError("field box outside the form");
  const double target_h = params.overflow * box.h;
  const double scale = std::min(target_h / img.height(), params.overflow * box.w / img.width());
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
  const GrayImage scaled = resize_bilinear(img, w, h);

  CompositeResult result;
  result.paste = {box.x, box.y + static_cast<int>(std::floor((box.h - h) / 2.0)), w, h};
  GrayImage canvas = form;
  paste_min(canvas, scaled, result.paste.x, result.paste.y);

  const int mx = static_cast<int>(std::lround(params.margin * box.w));
  const int my = static_cast<int>(std::lround(params.margin * box.h));
  result.crop = intersect({box.x - mx, box.y - my, box.w + 2 * mx, box.h + 2 * my}, {0, 0, form.width(), form.height()});
  result.image = canvas.crop(result.crop);
  return result;
}

CompositeResult composite_into_field(const GrayImage& img, const GrayImage& form, const Rect& box,
                                     const SeedStream& seed) {
  Xoshiro256 rng = seed.rng();
  return composite_into_field(img, form, box, CompositeParams::sample(rng));
}

}  // namespace typedhwr::imaging
