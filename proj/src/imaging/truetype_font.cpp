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
#include <fstream>
#include <iterator>

#include "typedhwr/common/error.hpp"
#include "typedhwr/imaging/font.hpp"

namespace typedhwr::imaging {

namespace {

struct OutlinePoint {
  double x;
  double y;
  bool on_curve;
};
using Contour = std::vector<OutlinePoint>;

struct Edge {
  double x0, y0, x1, y1;
};

constexpr int kSupersample = 4;
constexpr int kCurveSegments = 8;
constexpr int kMaxCompositeDepth = 8;

}  // namespace

struct TrueTypeFont::Impl {
  std::vector<std::uint8_t> data;
  std::string source;
  std::size_t glyf = 0, loca = 0, hmtx = 0, cmap_table = 0;
  int cmap_format = 0;
  int units_per_em = 0, index_to_loc = 0, num_glyphs = 0, num_hmetrics = 0;
  int ascender = 0, descender = 0;

  [[noreturn]] void corrupt(const std::string& what) const {
    throw CorruptFileError("font " + source + ": " + what);
  }
  std::uint8_t u8(std::size_t o) const {
    if (o >= data.size()) corrupt("read past end of file");
    return data[o];
  }
  std::uint16_t u16(std::size_t o) const { return static_cast<std::uint16_t>((u8(o) << 8) | u8(o + 1)); }
  std::int16_t s16(std::size_t o) const { return static_cast<std::int16_t>(u16(o)); }
  std::uint32_t u32(std::size_t o) const { return (static_cast<std::uint32_t>(u16(o)) << 16) | u16(o + 2); }

  int glyph_index(char32_t c) const {
    const std::size_t t = cmap_table;
    if (cmap_format == 12) {
      const std::uint32_t groups = u32(t + 12);
      for (std::uint32_t i = 0; i < groups; ++i) {
        const std::size_t g = t + 16 + 12 * static_cast<std::size_t>(i);
        const std::uint32_t start = u32(g), end = u32(g + 4);
        if (c >= start && c <= end) return static_cast<int>(u32(g + 8) + (c - start));
      }
      return 0;
    }
    if (c > 0xFFFF) return 0;
    const int seg_count = u16(t + 6) / 2;
    const std::size_t ends = t + 14;
    const std::size_t starts = ends + 2 * static_cast<std::size_t>(seg_count) + 2;
    const std::size_t deltas = starts + 2 * static_cast<std::size_t>(seg_count);
    const std::size_t ranges = deltas + 2 * static_cast<std::size_t>(seg_count);
    for (int i = 0; i < seg_count; ++i) {
      const std::size_t k = 2 * static_cast<std::size_t>(i);
      if (c > u16(ends + k)) continue;
      const std::uint16_t start = u16(starts + k);
      if (c < start) return 0;
      const std::uint16_t delta = u16(deltas + k);
      const std::uint16_t range = u16(ranges + k);
      if (range == 0) return (c + delta) & 0xFFFF;
      const std::uint16_t g = u16(ranges + k + range + 2 * (c - start));
      return g == 0 ? 0 : (g + delta) & 0xFFFF;
    }
    return 0;
  }

  std::pair<std::size_t, std::size_t> glyph_range(int gi) const {
    if (gi < 0 || gi >= num_glyphs) corrupt("glyph index out of range");
    const std::size_t i = static_cast<std::size_t>(gi);
    std::size_t a, b;
    if (index_to_loc == 0) {
      a = 2 * static_cast<std::size_t>(u16(loca + 2 * i));
      b = 2 * static_cast<std::size_t>(u16(loca + 2 * i + 2));
    } else {
      a = u32(loca + 4 * i);
      b = u32(loca + 4 * i + 4);
    }
    return {glyf + a, glyf + b};
  }

  double advance_units(int gi) const {
    const int m = std::min(gi, num_hmetrics - 1);
    return u16(hmtx + 4 * static_cast<std::size_t>(m));
  }

  // Appends the glyph's contours after applying [a c dx; b d dy].
  void outline(int gi, const double (&m)[6], std::vector<Contour>& out, int depth) const {
    if (depth > kMaxCompositeDepth) corrupt("composite glyph nesting too deep");
    const auto [begin, end] = glyph_range(gi);
    if (begin == end) return;
    const int contours = s16(begin);
    if (contours >= 0) {
      simple_outline(begin, contours, m, out);
      return;
    }
    std::size_t p = begin + 10;
    for (;;) {
      const std::uint16_t flags = u16(p);
      const int child = u16(p + 2);
      p += 4;
      double dx = 0, dy = 0;
      if (flags & 0x0001) {
        dx = s16(p);
        dy = s16(p + 2);
        p += 4;
      } else {
        dx = static_cast<std::int8_t>(u8(p));
        dy = static_cast<std::int8_t>(u8(p + 1));
        p += 2;
      }
      if (!(flags & 0x0002)) dx = dy = 0;  // point-matching placement is not supported
      double a = 1, b = 0, c = 0, d = 1;
      auto f2dot14 = [&](std::size_t o) { return s16(o) / 16384.0; };
      if (flags & 0x0008) {
        a = d = f2dot14(p);
        p += 2;
      } else if (flags & 0x0040) {
        a = f2dot14(p);
        d = f2dot14(p + 2);
        p += 4;
      } else if (flags & 0x0080) {
        a = f2dot14(p);
        b = f2dot14(p + 2);
        c = f2dot14(p + 4);
        d = f2dot14(p + 6);
        p += 8;
      }
      // child-to-parent, then parent-to-output
      const double composed[6] = {
          m[0] * a + m[1] * b, m[0] * c + m[1] * d, m[0] * dx + m[1] * dy + m[2],
          m[3] * a + m[4] * b, m[3] * c + m[4] * d, m[3] * dx + m[4] * dy + m[5],
      };
      outline(child, composed, out, depth + 1);
      if (!(flags & 0x0020)) break;
    }
  }

  void simple_outline(std::size_t begin, int contours, const double (&m)[6], std::vector<Contour>& out) const {
    if (contours == 0) return;
    std::vector<int> end_points(static_cast<std::size_t>(contours));
    for (int i = 0; i < contours; ++i) end_points[static_cast<std::size_t>(i)] = u16(begin + 10 + 2 * static_cast<std::size_t>(i));
    const int num_points = end_points.back() + 1;
    std::size_t p = begin + 10 + 2 * static_cast<std::size_t>(contours);
    p += 2 + u16(p);  // skip hinting instructions

    std::vector<std::uint8_t> flags;
    flags.reserve(static_cast<std::size_t>(num_points));
    while (static_cast<int>(flags.size()) < num_points) {
      const std::uint8_t f = u8(p++);
      flags.push_back(f);
      if (f & 0x08) {
        for (int r = u8(p++); r > 0 && static_cast<int>(flags.size()) < num_points; --r) flags.push_back(f);
      }
    }
    std::vector<double> xs(static_cast<std::size_t>(num_points)), ys(static_cast<std::size_t>(num_points));
    int value = 0;
    for (int i = 0; i < num_points; ++i) {
      const std::uint8_t f = flags[static_cast<std::size_t>(i)];
      if (f & 0x02) {
        const int v = u8(p++);
        value += (f & 0x10) ? v : -v;
      } else if (!(f & 0x10)) {
        value += s16(p);
        p += 2;
      }
      xs[static_cast<std::size_t>(i)] = value;
    }
    value = 0;
    for (int i = 0; i < num_points; ++i) {
      const std::uint8_t f = flags[static_cast<std::size_t>(i)];
      if (f & 0x04) {
        const int v = u8(p++);
        value += (f & 0x20) ? v : -v;
      } else if (!(f & 0x20)) {
        value += s16(p);
        p += 2;
      }
      ys[static_cast<std::size_t>(i)] = value;
    }
    int start = 0;
    for (int end : end_points) {
      Contour contour;
      for (int i = start; i <= end; ++i) {
        const double x = xs[static_cast<std::size_t>(i)], y = ys[static_cast<std::size_t>(i)];
        contour.push_back({m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5],
                           (flags[static_cast<std::size_t>(i)] & 0x01) != 0});
      }
      if (!contour.empty()) out.push_back(std::move(contour));
      start = end + 1;
    }
  }
};

namespace {

// Quadratic B-spline contour to a closed polyline.
std::vector<std::pair<double, double>> flatten(const Contour& contour) {
  const std::size_t n = contour.size();
  std::vector<std::pair<double, double>> poly;
  auto mid = [](const OutlinePoint& a, const OutlinePoint& b) {
    return OutlinePoint{(a.x + b.x) / 2, (a.y + b.y) / 2, true};
  };
  std::size_t first_on = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (contour[i].on_curve) {
      first_on = i;
      break;
    }
  }
  OutlinePoint start = first_on == n ? mid(contour[0], contour[1 % n]) : contour[first_on];
  const std::size_t offset = first_on == n ? 1 : first_on + 1;
  poly.emplace_back(start.x, start.y);
  OutlinePoint current = start;
  const OutlinePoint* control = nullptr;
  auto emit_curve = [&](const OutlinePoint& c, const OutlinePoint& to) {
    for (int s = 1; s <= kCurveSegments; ++s) {
      const double t = static_cast<double>(s) / kCurveSegments, u = 1 - t;
      poly.emplace_back(u * u * current.x + 2 * u * t * c.x + t * t * to.x,
                        u * u * current.y + 2 * u * t * c.y + t * t * to.y);
    }
    current = to;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const OutlinePoint& pt = contour[(offset + k) % n];
    if (pt.on_curve) {
      if (control) {
        emit_curve(*control, pt);
        control = nullptr;
      } else {
        poly.emplace_back(pt.x, pt.y);
        current = pt;
      }
    } else {
      if (control) emit_curve(*control, mid(*control, pt));
      control = &pt;
    }
  }
  if (control) emit_curve(*control, start);
  return poly;
}

}  // namespace

TrueTypeFont::TrueTypeFont(std::string id, std::unique_ptr<Impl> impl) : id_(std::move(id)), impl_(std::move(impl)) {}
TrueTypeFont::~TrueTypeFont() = default;

std::unique_ptr<TrueTypeFont> TrueTypeFont::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open font " + path.string());
  auto impl = std::make_unique<Impl>();
  impl->data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  impl->source = path.filename().string();
  Impl& f = *impl;

  std::size_t base = 0;
  std::uint32_t tag = f.u32(0);
  if (tag == 0x74746366) base = f.u32(12);  // 'ttcf': first face
  tag = f.u32(base);
  if (tag == 0x4F54544F) throw ConfigError("font " + f.source + ": CFF outlines are not supported");
  if (tag != 0x00010000 && tag != 0x74727565) f.corrupt("not a TrueType font");

  std::size_t head = 0, maxp = 0, hhea = 0, cmap = 0;
  const int num_tables = f.u16(base + 4);
  for (int i = 0; i < num_tables; ++i) {
    const std::size_t rec = base + 12 + 16 * static_cast<std::size_t>(i);
    const std::uint32_t t = f.u32(rec);
    const std::size_t off = f.u32(rec + 8);
    switch (t) {
      case 0x68656164: head = off; break;  // head
      case 0x6D617870: maxp = off; break;  // maxp
      case 0x68686561: hhea = off; break;  // hhea
      case 0x686D7478: f.hmtx = off; break;
      case 0x636D6170: cmap = off; break;
      case 0x6C6F6361: f.loca = off; break;
      case 0x676C7966: f.glyf = off; break;
      default: break;
    }
  }
  if (!head || !maxp || !hhea || !f.hmtx || !cmap || !f.loca || !f.glyf) f.corrupt("missing required table");
  f.units_per_em = f.u16(head + 18);
  f.index_to_loc = f.s16(head + 50);
  f.num_glyphs = f.u16(maxp + 4);
  f.ascender = f.s16(hhea + 4);
  f.descender = f.s16(hhea + 6);
  f.num_hmetrics = f.u16(hhea + 34);
  if (f.ascender - f.descender <= 0 || f.num_hmetrics == 0) f.corrupt("bad vertical metrics");

  // Prefer full-repertoire format 12, then BMP format 4.
  int best = -1;
  const int num_subtables = f.u16(cmap + 2);
  for (int i = 0; i < num_subtables; ++i) {
    const std::size_t rec = cmap + 4 + 8 * static_cast<std::size_t>(i);
    const int platform = f.u16(rec), encoding = f.u16(rec + 2);
    const std::size_t off = cmap + f.u32(rec + 4);
    const int format = f.u16(off);
    const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode || (format != 4 && format != 12)) continue;
    const int rank = format == 12 ? 2 : 1;
    if (rank > best) {
      best = rank;
      f.cmap_table = off;
      f.cmap_format = format;
    }
  }
  if (best < 0) f.corrupt("no Unicode cmap subtable");

  return std::unique_ptr<TrueTypeFont>(new TrueTypeFont(path.stem().string(), std::move(impl)));
}

bool TrueTypeFont::has_glyph(char32_t c) const { return impl_->glyph_index(c) != 0; }

GlyphBitmap TrueTypeFont::glyph(char32_t c, int text_height) const {
  const Impl& f = *impl_;
  const int gi = f.glyph_index(c);
  const double scale = static_cast<double>(text_height) / (f.ascender - f.descender);
  // Font units (y up) to line-box pixels (y down, 0 at the ascender).
  const double m[6] = {scale, 0, 0, 0, -scale, f.ascender * scale};
  std::vector<Contour> contours;
  f.outline(gi, m, contours, 0);

  GlyphBitmap g;
  g.advance = f.advance_units(gi) * scale;
  std::vector<Edge> edges;
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& contour : contours) {
    const auto poly = flatten(contour);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % poly.size()];
      min_x = std::min(min_x, a.first);
      max_x = std::max(max_x, a.first);
      min_y = std::min(min_y, a.second);
      max_y = std::max(max_y, a.second);
      if (a.second != b.second) edges.push_back({a.first, a.second, b.first, b.second});
    }
  }
  if (edges.empty()) return g;

  g.left = static_cast<int>(std::floor(min_x));
  g.top = static_cast<int>(std::floor(min_y));
  g.width = static_cast<int>(std::ceil(max_x)) - g.left + 1;
  g.height = static_cast<int>(std::ceil(max_y)) - g.top + 1;
  std::vector<int> hits(static_cast<std::size_t>(g.width) * g.height, 0);
  std::vector<std::pair<double, int>> crossings;
  for (int row = 0; row < g.height * kSupersample; ++row) {
    const double y = g.top + (row + 0.5) / kSupersample;
    crossings.clear();
    for (const auto& e : edges) {
      const bool down = e.y0 < e.y1;
      const double lo = down ? e.y0 : e.y1, hi = down ? e.y1 : e.y0;
      if (y < lo || y >= hi) continue;
      const double x = e.x0 + (y - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0);
      crossings.emplace_back(x, down ? 1 : -1);
    }
    std::sort(crossings.begin(), crossings.end());
    int winding = 0;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
      winding += crossings[i].second;
      if (winding == 0) continue;
      // Sample columns whose centers fall inside [x_i, x_{i+1}).
      const double xa = (crossings[i].first - g.left) * kSupersample - 0.5;
      const double xb = (crossings[i + 1].first - g.left) * kSupersample - 0.5;
      const int s0 = std::max(0, static_cast<int>(std::ceil(xa)));
      const int s1 = std::min(g.width * kSupersample - 1, static_cast<int>(std::ceil(xb)) - 1);
      for (int s = s0; s <= s1; ++s) {
        ++hits[static_cast<std::size_t>(row / kSupersample) * g.width + s / kSupersample];
      }
    }
  }
  g.coverage.resize(hits.size());
  constexpr int kSamples = kSupersample * kSupersample;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    g.coverage[i] = static_cast<std::uint8_t>((hits[i] * 255 + kSamples / 2) / kSamples);
  }
  return g;
}

FontCollection::FontCollection()
    : fallback_(std::shared_ptr<const Font>(&BitmapFont::fallback(), [](const Font*) {})) {}

FontCollection FontCollection::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("font directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (entry.is_regular_file() && (ext == ".ttf" || ext == ".otf")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  FontCollection collection;
  for (const auto& file : files) collection.add(TrueTypeFont::load(file));
  return collection;
}

void FontCollection::add(std::shared_ptr<const Font> font) { fonts_.push_back(std::move(font)); }

const Font& FontCollection::get(const std::string& id) const {
  for (const auto& f : fonts_) {
    if (f->id() == id) return *f;
  }
  return *fallback_;
}

const Font& FontCollection::fallback() const { return *fallback_; }

}  // namespace typedhwr::imaging
