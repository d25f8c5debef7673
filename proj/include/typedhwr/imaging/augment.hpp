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

#include <string>
#include <utility>
#include <vector>

#include "typedhwr/common/rng.hpp"
#include "typedhwr/imaging/gray_image.hpp"

namespace typedhwr::imaging {

// Maps (x, y) to (a x + b y + tx, c x + d y + ty). Pixel (i, j) is the point
// (i, j), so integer translations move pixels exactly.
struct AffineTransform2D {
  double a = 1, b = 0, tx = 0;
  double c = 0, d = 1, ty = 0;

  static AffineTransform2D identity() { return {}; }
  static AffineTransform2D translation(double dx, double dy) { return {1, 0, dx, 0, 1, dy}; }
  // Rotation about (cx, cy) in image coordinates (y down).
  static AffineTransform2D rotation(double radians, double cx = 0, double cy = 0);
  // x' = x + k (y - cy): slants the text about the horizontal line y = cy.
  static AffineTransform2D shear_x(double k, double cy = 0);
  static AffineTransform2D scaling(double s, double cx = 0, double cy = 0);

  double determinant() const { return a * d - b * c; }
  AffineTransform2D inverse() const;
  // (this * other)(p) = this(other(p))
  AffineTransform2D then_after(const AffineTransform2D& other) const;
  std::pair<double, double> apply(double x, double y) const { return {a * x + b * y + tx, c * x + d * y + ty}; }
};

struct PlacedImage {
  GrayImage image;
  // Output pixel (u, v) sits at transformed-plane point (u + origin_x, v + origin_y).
  int origin_x = 0;
  int origin_y = 0;
};

// Canvas = bounding box of the source frame and its image under t.
PlacedImage apply_affine_placed(const GrayImage& img, const AffineTransform2D& t);
GrayImage apply_affine(const GrayImage& img, const AffineTransform2D& t);

struct ElasticParams {
  double sigma = 8.0;
  double alpha = 32.0;

  static constexpr double kMinSigma = 3.0;
  static constexpr double kMaxSigma = 15.0;
  // sigma clamped to [3, 15]; alpha must be >= 0.
  ElasticParams(double sigma, double alpha);
  // sigma ~ N(8, 2) then clamped; alpha = text height.
  static ElasticParams sample(Xoshiro256& rng, double text_height);
};

struct DisplacementField {
  int width = 0;
  int height = 0;
  std::vector<double> dx, dy;
};

// U(-1, 1) noise per pixel, separable Gaussian blur (radius ceil(3 sigma),
// reflected borders), normalized to unit max magnitude, scaled by alpha.
DisplacementField elastic_field(int width, int height, const ElasticParams& p, const SeedStream& seed);
GrayImage apply_elastic(const GrayImage& img, const ElasticParams& p, const SeedStream& seed);

enum class MorphKind { Erode, Dilate, Gradient, Close };
enum class ElementShape { Rect, Ellipse, Cross };

struct StructuringElement {
  ElementShape shape = ElementShape::Rect;
  int radius = 1;  // 1..3; side = 2 radius + 1

  int side() const { return 2 * radius + 1; }
  std::vector<bool> mask() const;
};

struct MorphOp {
  MorphKind kind = MorphKind::Erode;
  StructuringElement element;

  std::string describe() const;
};

// Intensity-space filters with the ink-is-dark convention: Erode = min
// (thickens ink), Dilate = max (thins ink), Gradient = 255 - (max - min),
// Close = Dilate(Erode(img)).
GrayImage apply_morph(const GrayImage& img, const MorphOp& op);

struct CompositeParams {
  double overflow = 1.0;  // text height / box height
  double margin = 0.0;    // crop expansion per side, fraction of box size

  static CompositeParams sample(Xoshiro256& rng);  // U(1, 1.15), U(0.05, 0.20)
};

struct CompositeResult {
  GrayImage image;
  Rect crop;   // in form coordinates
  Rect paste;  // where the scaled text landed, in form coordinates
};

// Scales `img` to overflow * box height (capped to overflow * box width),
// pastes it left-aligned and vertically centered on the box with a min blend,
// and crops the box expanded by margin * (w, h) per side, clamped to the form.
CompositeResult composite_into_field(const GrayImage& img, const GrayImage& form, const Rect& field_box,
                                     const CompositeParams& params);
CompositeResult composite_into_field(const GrayImage& img, const GrayImage& form, const Rect& field_box,
                                     const SeedStream& seed);

}  // namespace typedhwr::imaging
