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
#include <string_view>
#include <vector>

#include "typedhwr/common/rng.hpp"
#include "typedhwr/imaging/font.hpp"
#include "typedhwr/imaging/gray_image.hpp"

namespace typedhwr::imaging {

struct RenderStyle {
  std::string font_id = "fallback5x7";
  int text_height = 32;
  double kerning_jitter_std = 1.0;
  double vertical_jitter_std = 2.0;

  void validate() const;
};

// Blank margin around the ink, and the bound on vertical glyph jitter.
inline constexpr int kRenderMargin = 2;

struct RenderResult {
  GrayImage image;
  // Pen advance of every glyph as placed (jitter included).
  std::vector<double> advances;
  // e.g. "missing-glyph:U+00E9:fallback"
  std::vector<std::string> warnings;
};

// Height is always text_height + 2 * kRenderMargin; width is the ink extent
// plus the margin on both sides. Each glyph's advance is perturbed by
// N(0, kerning_jitter_std) and its baseline by N(0, vertical_jitter_std)
// clamped to +-kRenderMargin.
RenderResult render_text(std::string_view text, const RenderStyle& style, const SeedStream& seed,
                         const FontCollection& fonts);
RenderResult render_text(std::string_view text, const Font& font, const RenderStyle& style, const SeedStream& seed,
                         const Font& fallback);

}  // namespace typedhwr::imaging
