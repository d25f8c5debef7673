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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/imaging/augment.hpp"
#include "typedhwr/imaging/font.hpp"
#include "typedhwr/imaging/gray_image.hpp"
#include "typedhwr/imaging/render.hpp"

using namespace typedhwr;
using namespace typedhwr::imaging;

namespace {

RenderStyle still(int height = 32) {
  RenderStyle s;
  s.text_height = height;
  s.kerning_jitter_std = 0;
  s.vertical_jitter_std = 0;
  return s;
}

GrayImage random_binary(int w, int h, Xoshiro256& rng) {
  GrayImage img(w, h);
  for (auto& v : img.data()) v = rng.bernoulli(0.4) ? 0 : 255;
  return img;
}

GrayImage text_image(std::string_view text) {
  return render_text(text, still(), {1, 0}, FontCollection()).image;
}

}  // namespace

TEST(GrayImage, PngRoundTrip) {
  Xoshiro256 r(3);
  GrayImage img(17, 9);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(r.below(256));
  const auto path = std::filesystem::temp_directory_path() / "typedhwr_png_roundtrip.png";
  write_png(path, img);
  EXPECT_EQ(read_png(path), img);
  std::filesystem::remove(path);
}

TEST(GrayImage, CropClipsToImage) {
  GrayImage img(10, 10, 7);
  const auto c = img.crop({8, 8, 5, 5});
  EXPECT_EQ(c.width(), 2);
  EXPECT_EQ(c.height(), 2);
}

TEST(Render, SingleGlyphMatchesStoredBitmap) {
  const auto& font = BitmapFont::fallback();
  const auto g = font.glyph(U'A', 32);
  const auto img = text_image("A");
  ASSERT_EQ(img.height(), 32 + 2 * kRenderMargin);
  int ink_min = g.width, ink_max = -1;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      if (g.at(x, y) > 0) ink_min = std::min(ink_min, x), ink_max = std::max(ink_max, x);
  ASSERT_EQ(img.width(), ink_max - ink_min + 1 + 2 * kRenderMargin);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int gx = x - kRenderMargin + ink_min, gy = y - kRenderMargin - g.top;
      const bool inside = gx >= 0 && gx < g.width && gy >= 0 && gy < g.height;
      const int expected = inside ? 255 - g.at(gx, gy) : 255;
      ASSERT_EQ(img.at(x, y), expected) << x << "," << y;
    }
  }
  // The stored cell decides which units are inked.
  const auto& cell = font.cell(U'A');
  ASSERT_EQ(cell.size(), 7u);
  EXPECT_EQ(cell[0], ".###.");
}

TEST(Render, TwoGlyphWidthIsSumOfAdvances) {
  const auto& font = BitmapFont::fallback();
  const auto ga = font.glyph(U'a', 32), gb = font.glyph(U'b', 32);
  auto extent = [](const GlyphBitmap& g) {
    int lo = 1 << 20, hi = -1;
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x)
        if (g.at(x, y) > 0) lo = std::min(lo, x + g.left), hi = std::max(hi, x + g.left);
    return std::pair{lo, hi};
  };
  const auto r = render_text("ab", still(), {1, 0}, FontCollection());
  ASSERT_EQ(r.advances.size(), 2u);
  const int expected = static_cast<int>(std::lround(r.advances[0])) + extent(gb).second - extent(ga).first + 1;
  EXPECT_NEAR(r.image.width() - 2 * kRenderMargin, expected, 1);
}

TEST(Render, DeterministicAndHeightFixed) {
  RenderStyle s;
  const auto a = render_text("Le Havre 76", s, {9, 4}, FontCollection());
  const auto b = render_text("Le Havre 76", s, {9, 4}, FontCollection());
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.image.height(), s.text_height + 2 * kRenderMargin);
  const auto c = render_text("Le Havre 76", s, {9, 5}, FontCollection());
  EXPECT_NE(a.image, c.image);
}

TEST(Render, MissingGlyphWarns) {
  const auto r = render_text("a\xe2\x82\xac", still(), {1, 0}, FontCollection());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0], "missing-glyph:U+20AC:skipped");
}

TEST(Render, StyleValidation) {
  RenderStyle s;
  s.text_height = 7;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Affine, IdentityIsExact) {
  const auto img = text_image("Qz8");
  EXPECT_EQ(apply_affine(img, AffineTransform2D::identity()), img);
}

TEST(Affine, IntegerTranslationShiftsColumns) {
  const auto img = text_image("Mk");
  const auto out = apply_affine(img, AffineTransform2D::translation(3, 0));
  ASSERT_EQ(out.height(), img.height());
  ASSERT_EQ(out.width(), img.width() + 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < 3; ++x) EXPECT_EQ(out.at(x, y), kBackground);
    for (int x = 0; x < img.width(); ++x) ASSERT_EQ(out.at(x + 3, y), img.at(x, y));
  }
}

TEST(Affine, RotationRoundTrip) {
  const auto img = text_image("W");
  const double theta = 4.0 * std::numbers::pi / 180.0;
  const double cx = img.width() / 2.0, cy = img.height() / 2.0;
  const auto t = AffineTransform2D::rotation(theta, cx, cy);
  const auto first = apply_affine_placed(img, t);
  const auto back = t.inverse().then_after(AffineTransform2D::translation(first.origin_x, first.origin_y));
  const auto second = apply_affine_placed(first.image, back);
  // Two bilinear passes soften every stroke edge, so compare the ink mass
  // centroid tightly and the pixels loosely.
  double total = 0, mass[2] = {0, 0}, mx[2] = {0, 0}, my[2] = {0, 0};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int u = x - second.origin_x, v = y - second.origin_y;
      const int got = second.image.in_bounds(u, v) ? second.image.at(u, v) : kBackground;
      total += std::abs(got - img.at(x, y));
      for (int k = 0; k < 2; ++k) {
        const double ink = kBackground - (k == 0 ? img.at(x, y) : got);
        mass[k] += ink;
        mx[k] += ink * x;
        my[k] += ink * y;
      }
    }
  }
  EXPECT_LT(total / (img.width() * img.height()), 20.0);
  EXPECT_NEAR(mx[0] / mass[0], mx[1] / mass[1], 0.25);
  EXPECT_NEAR(my[0] / mass[0], my[1] / mass[1], 0.25);
  EXPECT_NEAR(mass[1] / mass[0], 1.0, 0.05);
}

TEST(Affine, ComposeAndInvert) {
  const auto t = AffineTransform2D::rotation(0.3, 5, 7).then_after(AffineTransform2D::shear_x(0.2, 3));
  const auto id = t.then_after(t.inverse());
  EXPECT_NEAR(id.a, 1, 1e-12);
  EXPECT_NEAR(id.b, 0, 1e-12);
  EXPECT_NEAR(id.tx, 0, 1e-12);
  EXPECT_NEAR(id.ty, 0, 1e-12);
  const auto [x, y] = AffineTransform2D::scaling(2, 1, 1).apply(3, 1);
  EXPECT_DOUBLE_EQ(x, 5);
  EXPECT_DOUBLE_EQ(y, 1);
}

TEST(Affine, DegenerateThrows) {
  AffineTransform2D t{1, 2, 0, 2, 4, 0};
  EXPECT_THROW(apply_affine(text_image("a"), t), InvalidTransformError);
}

TEST(Elastic, ZeroAlphaIsIdentity) {
  const auto img = text_image("Rue");
  EXPECT_EQ(apply_elastic(img, ElasticParams(8, 0), {4, 4}), img);
}

TEST(Elastic, DisplacementBoundedByAlpha) {
  const auto f = elastic_field(120, 36, ElasticParams(8, 32), {11, 2});
  double peak = 0;
  for (std::size_t i = 0; i < f.dx.size(); ++i) peak = std::max(peak, std::hypot(f.dx[i], f.dy[i]));
  EXPECT_LE(peak, 32.0 + 1e-9);
  EXPECT_NEAR(peak, 32.0, 1e-9);
}

TEST(Elastic, DeterministicAndClamped) {
  const auto img = text_image("Rue");
  EXPECT_EQ(apply_elastic(img, ElasticParams(6, 20), {4, 4}), apply_elastic(img, ElasticParams(6, 20), {4, 4}));
  EXPECT_EQ(ElasticParams(1, 5).sigma, 3.0);
  EXPECT_EQ(ElasticParams(40, 5).sigma, 15.0);
  EXPECT_THROW(ElasticParams(8, -1), ConfigError);
}

TEST(Morph, OrderRelationsOnRandomBinaryImages) {
  Xoshiro256 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto img = random_binary(6 + static_cast<int>(rng.below(20)), 6 + static_cast<int>(rng.below(20)), rng);
    const StructuringElement el{static_cast<ElementShape>(rng.below(3)), 1 + static_cast<int>(rng.below(3))};
    const auto erode = apply_morph(img, {MorphKind::Erode, el});
    const auto dilate = apply_morph(img, {MorphKind::Dilate, el});
    const auto opening = apply_morph(erode, {MorphKind::Dilate, el});
    const auto close = apply_morph(img, {MorphKind::Close, el});
    for (std::size_t k = 0; k < img.data().size(); ++k) {
      ASSERT_LE(erode.data()[k], img.data()[k]);
      ASSERT_GE(dilate.data()[k], img.data()[k]);
      ASSERT_LE(opening.data()[k], img.data()[k]);
      ASSERT_LE(close.data()[k], img.data()[k]);
    }
  }
}

TEST(Morph, FlatImageIsFixedPoint) {
  const GrayImage blank(30, 20);
  for (auto kind : {MorphKind::Erode, MorphKind::Dilate, MorphKind::Gradient, MorphKind::Close}) {
    for (int r = 1; r <= 3; ++r) {
      EXPECT_EQ(apply_morph(blank, {kind, {ElementShape::Ellipse, r}}), blank);
    }
  }
}

TEST(Morph, MasksAndValidation) {
  const StructuringElement cross{ElementShape::Cross, 1};
  EXPECT_EQ(cross.mask(), (std::vector<bool>{false, true, false, true, true, true, false, true, false}));
  const StructuringElement rect{ElementShape::Rect, 2};
  const auto rect_mask = rect.mask();
  EXPECT_EQ(std::count(rect_mask.begin(), rect_mask.end(), true), 25);
  const StructuringElement bad{ElementShape::Rect, 4};
  EXPECT_THROW(apply_morph(GrayImage(5, 5), {MorphKind::Erode, bad}), ConfigError);
  EXPECT_EQ((MorphOp{MorphKind::Close, {ElementShape::Cross, 2}}.describe()), "morph(Close,Cross,2)");
}

TEST(Composite, DegenerateParametersPadToBox) {
  const GrayImage form(200, 100);
  GrayImage text(40, 20, kBackground);
  fill_rect(text, {5, 5, 10, 10}, 0);
  const Rect box{50, 30, 80, 20};
  const auto r = composite_into_field(text, form, box, CompositeParams{1.0, 0.0});
  EXPECT_EQ(r.crop, box);
  EXPECT_EQ(r.image.width(), box.w);
  EXPECT_EQ(r.image.height(), box.h);
  // Height already matches the box: the text lands unscaled at the left edge.
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 40; ++x) ASSERT_EQ(r.image.at(x, y), text.at(x, y));
  for (int y = 0; y < 20; ++y)
    for (int x = 40; x < 80; ++x) ASSERT_EQ(r.image.at(x, y), kBackground);
}

TEST(Composite, PrintedRuleAndTextBothSurvive) {
  GrayImage form(200, 100);
  for (int x = 0; x < 200; ++x) form.at(x, 40) = 0;
  GrayImage text(40, 20, kBackground);
  fill_rect(text, {2, 2, 30, 4}, 0);
  const Rect box{50, 30, 80, 20};
  const auto r = composite_into_field(text, form, box, CompositeParams{1.0, 0.0});
  const int rule_row = 40 - r.crop.y;
  EXPECT_EQ(r.image.at(70, rule_row), 0);  // rule where the text is blank
  EXPECT_EQ(r.image.at(10, 3), 0);         // text above the rule
}

TEST(Composite, MarginExpandsCrop) {
  const GrayImage form(400, 300);
  const GrayImage text(40, 20, 0);
  const Rect box{100, 100, 100, 50};
  const auto r = composite_into_field(text, form, box, CompositeParams{1.0, 0.2});
  EXPECT_EQ(r.crop.w, 140);
  EXPECT_EQ(r.crop.h, 70);
  const Rect corner{0, 0, 100, 50};
  const auto c = composite_into_field(text, form, corner, CompositeParams{1.0, 0.2});
  EXPECT_EQ(c.crop.x, 0);
  EXPECT_EQ(c.crop.y, 0);
  EXPECT_EQ(c.crop.w, 120);
  EXPECT_EQ(c.crop.h, 60);
  EXPECT_THROW(composite_into_field(text, form, {390, 290, 50, 50}, CompositeParams{}), BoundsError);
}
