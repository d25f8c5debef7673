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

#include "typedhwr/alignkit/alignkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "typedhwr/common/error.hpp"

namespace typedhwr::alignkit {

using nlohmann::ordered_json;

std::optional<int> otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.data()) hist[v] += 1.0;
  const double total = static_cast<double>(img.data().size());
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += t * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  if (best_t < 0) return std::nullopt;
  return best_t;
}

std::vector<SquareDetection> detect_squares(const GrayImage& img, const SizeRange& range, const SquareTests& tests) {
  std::vector<SquareDetection> out;
  const auto threshold = otsu_threshold(img);
  if (!threshold || img.empty()) return out;
  const int W = img.width(), H = img.height();
  std::vector<int> label(static_cast<std::size_t>(W) * H, -1);
  auto ink = [&](int x, int y) { return img.at(x, y) <= *threshold; };
  std::vector<int> stack;
  std::vector<int> members;
  int next = 0;
  for (int y0 = 0; y0 < H; ++y0) {
    for (int x0 = 0; x0 < W; ++x0) {
      const std::size_t i0 = static_cast<std::size_t>(y0) * W + x0;
      if (label[i0] >= 0 || !ink(x0, y0)) continue;
      const int id = next++;
      members.clear();
      stack.assign(1, static_cast<int>(i0));
      label[i0] = id;
      int x_min = x0, x_max = x0, y_min = y0, y_max = y0;
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        members.push_back(p);
        const int px = p % W, py = p / W;
        x_min = std::min(x_min, px);
        x_max = std::max(x_max, px);
        y_min = std::min(y_min, py);
        y_max = std::max(y_max, py);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (!img.in_bounds(nx, ny)) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * W + nx;
            if (label[n] < 0 && ink(nx, ny)) {
              label[n] = id;
              stack.push_back(static_cast<int>(n));
            }
          }
        }
      }
      const int bw = x_max - x_min + 1, bh = y_max - y_min + 1;
      const double aspect = static_cast<double>(bw) / bh;
      const double side = (bw + bh) / 2.0;
      if (aspect < tests.min_aspect || aspect > tests.max_aspect) continue;
      if (side < range.min_side || side > range.max_side) continue;
      auto mine = [&](int x, int y) { return label[static_cast<std::size_t>(y) * W + x] == id; };

      const int ix0 = x_min + bw / 4, ix1 = x_max - bw / 4, iy0 = y_min + bh / 4, iy1 = y_max - bh / 4;
      long interior = 0, interior_ink = 0;
      for (int y = iy0; y <= iy1; ++y) {
        for (int x = ix0; x <= ix1; ++x) {
          ++interior;
          interior_ink += ink(x, y) ? 1 : 0;
        }
      }
      const double interior_frac = interior == 0 ? 1.0 : static_cast<double>(interior_ink) / interior;
      if (interior_frac >= tests.max_interior_ink) continue;

      const int band = std::max(1, static_cast<int>(std::lround(0.15 * side)));
      long probes = 0, hits = 0;
      for (int y = y_min; y <= y_max; ++y) {
        bool left = false, right = false;
        for (int k = 0; k < band && k < bw; ++k) {
          left |= mine(x_min + k, y);
          right |= mine(x_max - k, y);
        }
        probes += 2;
        hits += (left ? 1 : 0) + (right ? 1 : 0);
      }
      for (int x = x_min; x <= x_max; ++x) {
        bool top = false, bottom = false;
        for (int k = 0; k < band && k < bh; ++k) {
          top |= mine(x, y_min + k);
          bottom |= mine(x, y_max - k);
        }
        probes += 2;
        hits += (top ? 1 : 0) + (bottom ? 1 : 0);
      }
      if (static_cast<double>(hits) / probes <= tests.min_perimeter_coverage) continue;

      out.push_back({{x_min + bw / 2.0, y_min + bh / 2.0}, side, 1.0 - interior_frac});
    }
  }
  std::sort(out.begin(), out.end(), [](const SquareDetection& a, const SquareDetection& b) {
    return a.center.y != b.center.y ? a.center.y < b.center.y : a.center.x < b.center.x;
  });
  return out;
}

Point RigidTransform2D::apply(const Point& p) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return {scale * (c * p.x - s * p.y) + tx, scale * (s * p.x + c * p.y) + ty};
}

namespace {

Point centroid(const std::vector<Point>& pts) {
  Point c;
  for (const auto& p : pts) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(pts.size());
  c.y /= static_cast<double>(pts.size());
  return c;
}

double rms_spread(const std::vector<Point>& pts, const Point& c) {
  double s = 0;
  for (const auto& p : pts) s += (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
  return std::sqrt(s / static_cast<double>(pts.size()));
}

struct Match {
  std::size_t scan = 0;
  double dist2 = 0;
};

std::vector<Match> nearest(const std::vector<Point>& moved, const std::vector<Point>& scan) {
  std::vector<Match> m(moved.size());
  for (std::size_t i = 0; i < moved.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scan.size(); ++j) {
      const double dx = moved[i].x - scan[j].x, dy = moved[i].y - scan[j].y;
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        m[i] = {j, d};
      }
    }
  }
  return m;
}

double rms(const std::vector<Match>& m) {
  double s = 0;
  for (const auto& x : m) s += x.dist2;
  return std::sqrt(s / static_cast<double>(m.size()));
}

std::vector<Point> transformed(const std::vector<Point>& pts, const RigidTransform2D& t) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(t.apply(p));
  return out;
}

}  // namespace

RigidTransform2D fit_similarity(const std::vector<Point>& src, const std::vector<Point>& dst) {
  if (src.size() != dst.size() || src.empty()) throw ConfigError("fit_similarity: need equal, non-empty point lists");
  const Point cs = centroid(src), cd = centroid(dst);
  double a = 0, b = 0, norm = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double xs = src[i].x - cs.x, ys = src[i].y - cs.y;
    const double xd = dst[i].x - cd.x, yd = dst[i].y - cd.y;
    a += xs * xd + ys * yd;
    b += xs * yd - ys * xd;
    norm += xs * xs + ys * ys;
  }
  RigidTransform2D t;
  t.theta = std::atan2(b, a);
  t.scale = norm > 0 ? std::sqrt(a * a + b * b) / norm : 1.0;
  const double c = std::cos(t.theta), s = std::sin(t.theta);
  t.tx = cd.x - t.scale * (c * cs.x - s * cs.y);
  t.ty = cd.y - t.scale * (s * cs.x + c * cs.y);
  return t;
}

IcpResult icp_align(const std::vector<Point>& template_pts, const std::vector<Point>& scan_pts, const IcpConfig& cfg) {
  if (template_pts.size() < 3 || scan_pts.size() < 3) {
    throw ConfigError("icp_align: at least 3 points are required on each side");
  }
  if (!(cfg.trim_fraction >= 0 && cfg.trim_fraction < 1)) throw ConfigError("icp_align: trim_fraction must be in [0, 1)");
  IcpResult r;
  const Point ct = centroid(template_pts), cs = centroid(scan_pts);
  const double st = rms_spread(template_pts, ct), ss = rms_spread(scan_pts, cs);
  r.transform.scale = st > 0 && ss > 0 ? ss / st : 1.0;
  r.transform.tx = cs.x - r.transform.scale * ct.x;
  r.transform.ty = cs.y - r.transform.scale * ct.y;

  auto matches = nearest(transformed(template_pts, r.transform), scan_pts);
  r.residual = rms(matches);
  r.residual_history.push_back(r.residual);
  const std::size_t keep = std::max<std::size_t>(
      3, template_pts.size() - static_cast<std::size_t>(std::floor(cfg.trim_fraction * template_pts.size())));
  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<std::size_t> order(matches.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return matches[a].dist2 < matches[b].dist2; });
    std::vector<Point> src, dst;
    for (std::size_t k = 0; k < std::min(keep, order.size()); ++k) {
      src.push_back(template_pts[order[k]]);
      dst.push_back(scan_pts[matches[order[k]].scan]);
    }
    const RigidTransform2D next = fit_similarity(src, dst);
    auto next_matches = nearest(transformed(template_pts, next), scan_pts);
    const double res = rms(next_matches);
    r.iterations = it + 1;
    const double improvement = r.residual - res;
    if (improvement < 0 && cfg.trim_fraction == 0) break;  // numerical noise only; keep the better fit
    r.transform = next;
    matches = std::move(next_matches);
    r.residual = res;
    r.residual_history.push_back(res);
    if (improvement < cfg.tolerance) break;
  }
  if (!(r.residual <= cfg.reject_residual)) {
    throw NonConformingError("document does not match the template: alignment residual " + std::to_string(r.residual) +
                             " px exceeds " + std::to_string(cfg.reject_residual) + " px");
  }
  if (r.transform.scale < cfg.min_scale || r.transform.scale > cfg.max_scale) {
    throw NonConformingError("document does not match the template: scale " + std::to_string(r.transform.scale) +
                             " is outside the accepted band");
  }
  return r;
}

namespace {

struct Box {
  double x0, y0, x1, y1;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
};

Box mapped_box(const Rect& r, const RigidTransform2D& t) {
  const std::array<Point, 4> corners{{{double(r.x), double(r.y)},
                                      {double(r.right()), double(r.y)},
                                      {double(r.x), double(r.bottom())},
                                      {double(r.right()), double(r.bottom())}}};
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& c : corners) {
    const Point p = t.apply(c);
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

}  // namespace

std::vector<TypedBox> assign_types(const std::vector<Rect>& boxes, const formset::FormTemplate& form,
                                   const RigidTransform2D& t) {
  std::vector<Box> fields;
  for (const auto& f : form.fields) fields.push_back(mapped_box(f.box, t));
  std::vector<TypedBox> out;
  for (const auto& r : boxes) {
    TypedBox tb;
    tb.box = r;
    const Box b{double(r.x), double(r.y), double(r.right()), double(r.bottom())};
    const double area = b.area();
    std::optional<std::size_t> best;
    double best_overlap = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Box inter{std::max(b.x0, fields[i].x0), std::max(b.y0, fields[i].y0), std::min(b.x1, fields[i].x1),
                      std::min(b.y1, fields[i].y1)};
      const double ov = area > 0 ? inter.area() / area : 0.0;
      if (ov <= 0) continue;
      if (!best || ov > best_overlap || (ov == best_overlap && fields[i].area() < fields[*best].area())) {
        best = i;
        best_overlap = ov;
      }
    }
    tb.overlap = best_overlap;
    if (best && best_overlap >= kUnknownOverlap) {
      tb.ctype = form.fields[*best].ctype;
      tb.field_id = form.fields[*best].id;
    }
    out.push_back(tb);
  }
  return out;
}

std::vector<Rect> parse_boxes_json(const std::string& text) {
  std::vector<Rect> out;
  try {
    const auto j = ordered_json::parse(text);
    const auto& list = j.is_object() ? j.at("boxes") : j;
    for (const auto& b : list) {
      Rect r{b.at("x").get<int>(), b.at("y").get<int>(), b.at("w").get<int>(), b.at("h").get<int>()};
      if (r.w <= 0 || r.h <= 0) throw ConfigError("box width and height must be positive");
      out.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed box list: ") + e.what());
  }
  return out;
}

std::vector<Rect> load_boxes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open box list " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_boxes_json(ss.str());
}

std::string typed_boxes_to_json(const std::vector<TypedBox>& boxes) {
  ordered_json j = ordered_json::array();
  for (const auto& b : boxes) {
    ordered_json e;
    e["box"] = {{"x", b.box.x}, {"y", b.box.y}, {"w", b.box.w}, {"h", b.box.h}};
    e["field_id"] = b.field_id.empty() ? ordered_json(nullptr) : ordered_json(b.field_id);
    e["type"] = b.ctype ? std::string(typedgen::to_string(*b.ctype)) : std::string("Unknown");
    e["overlap"] = b.overlap;
    if (!b.crop_path.empty()) e["crop"] = b.crop_path;
    j.push_back(e);
  }
  return j.dump(2) + "\n";
}

SizeRange size_range_for(const formset::FormTemplate& form) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& s : form.squares) {
    lo = std::min(lo, s.side);
    hi = std::max(hi, s.side);
  }
  return {lo / 2.0, hi * 2.0};
}

AlignResult align_document(const formset::FormTemplate& form, const GrayImage& scan, const std::vector<Rect>& boxes,
                           const IcpConfig& cfg) {
  AlignResult r;
  r.squares = detect_squares(scan, size_range_for(form));
  if (r.squares.size() < 3) {
    throw NonConformingError("document does not match the template: found " + std::to_string(r.squares.size()) +
                             " marker squares");
  }
  std::vector<Point> tpl, pts;
  for (const auto& s : form.squares) tpl.push_back({s.cx, s.cy});
  for (const auto& s : r.squares) pts.push_back(s.center);
  r.icp = icp_align(tpl, pts, cfg);
  r.boxes = assign_types(boxes, form, r.icp.transform);
  return r;
}

void write_crops(const GrayImage& scan, std::vector<TypedBox>& boxes, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "crops");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "crops/%04zu.png", i);
    imaging::write_png(out_dir / name, scan.crop(boxes[i].box));
    boxes[i].crop_path = name;
  }
}

}  // namespace typedhwr::alignkit
