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

#include <algorithm>
#include <cmath>

#include "typedhwr/imaging/font.hpp"

namespace typedhwr::imaging {

namespace {

struct CellDef {
  char32_t c;
  const char* rows[7];
};

// clang-format off
const CellDef kCells[] = {
  {U' ', {".....", ".....", ".....", ".....", ".....", ".....", "....."}},
  {U'0', {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}},
  {U'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}},
  {U'2', {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}},
  {U'3', {"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}},
  {U'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
  {U'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
  {U'6', {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}},
  {U'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
  {U'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
  {U'9', {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}},
  {U'A', {".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
  {U'B', {"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}},
  {U'C', {".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}},
  {U'D', {"###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."}},
  {U'E', {"#####", "#....", "#....", "####.", "#....", "#....", "#####"}},
  {U'F', {"#####", "#....", "#....", "####.", "#....", "#....", "#...."}},
  {U'G', {".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"}},
  {U'H', {"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
  {U'I', {".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
  {U'J', {"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}},
  {U'K', {"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}},
  {U'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
  {U'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
  {U'N', {"#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"}},
  {U'O', {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
  {U'P', {"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}},
  {U'Q', {".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}},
  {U'R', {"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}},
  {U'S', {".####", "#....", "#....", ".###.", "....#", "....#", "####."}},
  {U'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
  {U'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
  {U'V', {"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
  {U'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."}},
  {U'X', {"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}},
  {U'Y', {"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}},
  {U'Z', {"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}},
  {U'a', {".....", ".....", ".###.", "....#", ".####", "#...#", ".####"}},
  {U'b', {"#....", "#....", "#.##.", "##..#", "#...#", "#...#", "####."}},
  {U'c', {".....", ".....", ".###.", "#....", "#....", "#...#", ".###."}},
  {U'd', {"....#", "....#", ".##.#", "#..##", "#...#", "#...#", ".####"}},
  {U'e', {".....", ".....", ".###.", "#...#", "#####", "#....", ".###."}},
  {U'f', {"..##.", ".#..#", ".#...", "###..", ".#...", ".#...", ".#..."}},
  {U'g', {".....", ".####", "#...#", "#...#", ".####", "....#", ".###."}},
  {U'h', {"#....", "#....", "#.##.", "##..#", "#...#", "#...#", "#...#"}},
  {U'i', {"..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."}},
  {U'j', {"...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."}},
  {U'k', {"#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."}},
  {U'l', {".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
  {U'm', {".....", ".....", "##.#.", "#.#.#", "#.#.#", "#...#", "#...#"}},
  {U'n', {".....", ".....", "#.##.", "##..#", "#...#", "#...#", "#...#"}},
  {U'o', {".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."}},
  {U'p', {".....", ".....", "####.", "#...#", "####.", "#....", "#...."}},
  {U'q', {".....", ".....", ".##.#", "#..##", ".####", "....#", "....#"}},
  {U'r', {".....", ".....", "#.##.", "##..#", "#....", "#....", "#...."}},
  {U's', {".....", ".....", ".###.", "#....", ".###.", "....#", "####."}},
  {U't', {".#...", ".#...", "###..", ".#...", ".#...", ".#..#", "..##."}},
  {U'u', {".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#"}},
  {U'v', {".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
  {U'w', {".....", ".....", "#...#", "#...#", "#.#.#", "#.#.#", ".#.#."}},
  {U'x', {".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"}},
  {U'y', {".....", ".....", "#...#", "#...#", ".####", "....#", ".###."}},
  {U'z', {".....", ".....", "#####", "...#.", "..#..", ".#...", "#####"}},
  {U'.', {".....", ".....", ".....", ".....", ".....", ".##..", ".##.."}},
  {U',', {".....", ".....", ".....", ".....", ".##..", "..#..", ".#..."}},
  {U'-', {".....", ".....", ".....", "#####", ".....", ".....", "....."}},
  {U'/', {".....", "....#", "...#.", "..#..", ".#...", "#....", "....."}},
  {U'\'', {".##..", "..#..", ".#...", ".....", ".....", ".....", "....."}},
  {U':', {".....", ".##..", ".##..", ".....", ".##..", ".##..", "....."}},
};
// clang-format on

// Length of [lo0, hi0) intersected with [lo1, hi1).
double overlap(double lo0, double hi0, double lo1, double hi1) {
  return std::max(0.0, std::min(hi0, hi1) - std::max(lo0, lo1));
}

}  // namespace

BitmapFont::BitmapFont() {
  for (const auto& def : kCells) cells_[def.c] = std::vector<std::string>(std::begin(def.rows), std::end(def.rows));
}

const BitmapFont& BitmapFont::fallback() {
  static const BitmapFont font;
  return font;
}

BitmapFont BitmapFont::with_alias(char32_t c, char32_t same_as) const {
  BitmapFont copy = *this;
  copy.cells_[c] = cells_.at(same_as);
  copy.id_ = id_ + "+alias";
  return copy;
}

GlyphBitmap BitmapFont::glyph(char32_t c, int text_height) const {
  const auto& rows = cells_.at(c);
  const double unit = static_cast<double>(text_height) / kCellHeight;
  GlyphBitmap g;
  g.width = static_cast<int>(std::ceil(kCellWidth * unit));
  g.height = text_height;
  g.advance = kAdvanceUnits * unit;
  g.coverage.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  // Exact box-filter coverage of each output pixel by the inked cells.
  for (int py = 0; py < g.height; ++py) {
    for (int px = 0; px < g.width; ++px) {
      double area = 0.0;
      for (int cy = 0; cy < kCellHeight; ++cy) {
        const double oy = overlap(py, py + 1, cy * unit, (cy + 1) * unit);
        if (oy == 0.0) continue;
        for (int cx = 0; cx < kCellWidth; ++cx) {
          if (rows[static_cast<std::size_t>(cy)][static_cast<std::size_t>(cx)] != '#') continue;
          area += oy * overlap(px, px + 1, cx * unit, (cx + 1) * unit);
        }
      }
      g.coverage[static_cast<std::size_t>(py) * g.width + px] =
          static_cast<std::uint8_t>(std::lround(255.0 * std::min(1.0, area)));
    }
  }
  return g;
}

}  // namespace typedhwr::imaging
