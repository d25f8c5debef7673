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

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "typedhwr/imaging/gray_image.hpp"

namespace typedhwr::imaging {

// One rasterized glyph. Coverage is 0..255 (255 = fully inked); the box is
// placed at (pen_x + left, line_top + top).
struct GlyphBitmap {
  int width = 0;
  int height = 0;
  int left = 0;
  int top = 0;
  double advance = 0.0;
  std::vector<std::uint8_t> coverage;

  std::uint8_t at(int x, int y) const { return coverage[static_cast<std::size_t>(y) * width + x]; }
};

class Font {
 public:
  virtual ~Font() = default;
  virtual const std::string& id() const = 0;
  virtual bool has_glyph(char32_t c) const = 0;
  // Rasterized for a line box `text_height` pixels tall; row 0 is its top.
  virtual GlyphBitmap glyph(char32_t c, int text_height) const = 0;
};

// Fixed 5x7 bitmap covering the default alphabet. Each cell unit is
// text_height / 7 pixels square; glyphs advance 6 units.
class BitmapFont final : public Font {
 public:
  static constexpr int kCellWidth = 5;
  static constexpr int kCellHeight = 7;
  static constexpr int kAdvanceUnits = 6;
  static const BitmapFont& fallback();

  const std::string& id() const override { return id_; }
  bool has_glyph(char32_t c) const override { return cells_.contains(c); }
  GlyphBitmap glyph(char32_t c, int text_height) const override;
  // 7 rows of 5 '#'/'.' characters, for tests and fixtures.
  const std::vector<std::string>& cell(char32_t c) const { return cells_.at(c); }

  // Renders `c` with another character's cell (homoglyph fixtures).
  BitmapFont with_alias(char32_t c, char32_t same_as) const;

 private:
  BitmapFont();
  std::string id_ = "fallback5x7";
  std::map<char32_t, std::vector<std::string>> cells_;
};

// TrueType outlines (glyf/loca) from a .ttf/.otf file; CFF-flavoured
// OpenType is rejected. Rasterized with 4x4 supersampling, nonzero winding.
class TrueTypeFont final : public Font {
 public:
  static std::unique_ptr<TrueTypeFont> load(const std::filesystem::path& path);

  const std::string& id() const override { return id_; }
  bool has_glyph(char32_t c) const override;
  GlyphBitmap glyph(char32_t c, int text_height) const override;

  struct Impl;
  ~TrueTypeFont() override;

 private:
  TrueTypeFont(std::string id, std::unique_ptr<Impl> impl);
  std::string id_;
  std::unique_ptr<Impl> impl_;
};

// Immutable after construction; share freely across threads.
class FontCollection {
 public:
  // Only the fallback font.
  FontCollection();
  // Every .ttf / .otf in `dir`, sorted by file name, plus the fallback.
  static FontCollection load_dir(const std::filesystem::path& dir);

  void add(std::shared_ptr<const Font> font);
  // Loaded fonts, excluding the fallback; empty when none were loaded.
  const std::vector<std::shared_ptr<const Font>>& fonts() const { return fonts_; }
  // Resolves an id; unknown ids resolve to the fallback.
  const Font& get(const std::string& id) const;
  const Font& fallback() const;

 private:
  std::vector<std::shared_ptr<const Font>> fonts_;
  std::shared_ptr<const Font> fallback_;
};

}  // namespace typedhwr::imaging
