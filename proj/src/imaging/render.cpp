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

#include "typedhwr/imaging/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/text.hpp"

namespace typedhwr::imaging {

void RenderStyle::validate() const {
  if (text_height < 8) throw ConfigError("text_height must be >= 8");
  if (kerning_jitter_std < 0 || vertical_jitter_std < 0) throw ConfigError("jitter std must be >= 0");
}

RenderResult render_text(std::string_view text, const RenderStyle& style, const SeedStream& seed,
                         const FontCollection& fonts) {
  return render_text(text, fonts.get(style.font_id), style, seed, fonts.fallback());
}

RenderResult render_text(std::string_view text, const Font& font, const RenderStyle& style, const SeedStream& seed,
                         const Font& fallback) {
  style.validate();
  RenderResult result;
  Xoshiro256 rng = seed.rng();

  struct Placed {
    GlyphBitmap glyph;
    int x;
    int y;
  };
  std::vector<Placed> placed;
  double pen = 0.0;
  for (char32_t c : utf8_decode(text)) {
    const Font* source = &font;
    if (!font.has_glyph(c)) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "missing-glyph:U+%04X:", static_cast<unsigned>(c));
      if (fallback.has_glyph(c)) {
        source = &fallback;
        result.warnings.push_back(std::string(buf) + "fallback");
      } else {
        result.warnings.push_back(std::string(buf) + "skipped");
        continue;
      }
    }
    GlyphBitmap g = source->glyph(c, style.text_height);
    const double kern = rng.normal(0.0, style.kerning_jitter_std);
    const double dy = std::clamp(rng.normal(0.0, style.vertical_jitter_std), -static_cast<double>(kRenderMargin),
                                 static_cast<double>(kRenderMargin));
    const int x = static_cast<int>(std::lround(pen)) + g.left;
    const int y = static_cast<int>(std::lround(dy)) + g.top;
    const double advance = std::max(0.0, g.advance + kern);
    result.advances.push_back(advance);
    pen += advance;
    placed.push_back({std::move(g), x, y});
  }

  int ink_min = 1 << 30, ink_max = -(1 << 30);
  for (const auto& p : placed) {
    for (int gy = 0; gy < p.glyph.height; ++gy) {
      for (int gx = 0; gx < p.glyph.width; ++gx) {
        if (p.glyph.at(gx, gy) == 0) continue;
        ink_min = std::min(ink_min, p.x + gx);
        ink_max = std::max(ink_max, p.x + gx);
      }
    }
  }
  const int height = style.text_height + 2 * kRenderMargin;
  if (ink_min > ink_max) {
    // No ink at all (spaces only): keep the pen extent.
    result.image = GrayImage(std::max(1, static_cast<int>(std::lround(pen))) + 2 * kRenderMargin, height);
    return result;
  }
  const int origin_x = ink_min - kRenderMargin;
  GrayImage canvas(ink_max - ink_min + 1 + 2 * kRenderMargin, height);
  for (const auto& p : placed) {
    for (int gy = 0; gy < p.glyph.height; ++gy) {
      const int cy = p.y + gy + kRenderMargin;
      if (cy < 0 || cy >= height) continue;
      for (int gx = 0; gx < p.glyph.width; ++gx) {
        const std::uint8_t cov = p.glyph.at(gx, gy);
        if (cov == 0) continue;
        auto& px = canvas.at(p.x + gx - origin_x, cy);
        px = std::min<std::uint8_t>(px, static_cast<std::uint8_t>(255 - cov));
      }
    }
  }
  result.image = std::move(canvas);
  return result;
}

}  // namespace typedhwr::imaging
