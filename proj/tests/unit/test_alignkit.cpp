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

#include "typedhwr/alignkit/alignkit.hpp"
#include "typedhwr/common/error.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/imaging/augment.hpp"

using namespace typedhwr;
using namespace typedhwr::alignkit;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const formset::FormTemplate& eas() {
  static const auto form =
      formset::FormTemplate::load(std::filesystem::path(TYPEDHWR_DATA_DIR) / "templates" / "eas.json");
  return form;
}

void hollow_square(GrayImage& img, int cx, int cy, int side, int stroke) {
  imaging::draw_rect_outline(img, {cx - side / 2, cy - side / 2, side, side}, 0, stroke);
}

std::vector<Point> template_points() {
  std::vector<Point> pts;
  for (const auto& s : eas().squares) pts.push_back({s.cx, s.cy});
  return pts;
}

std::vector<Point> moved(const std::vector<Point>& pts, const RigidTransform2D& t) {
  std::vector<Point> out;
  for (const auto& p : pts) out.push_back(t.apply(p));
  return out;
}

}  // namespace

TEST(Squares, FiveHollowSquares) {
  GrayImage img(300, 200);
  const int centers[5][2] = {{30, 30}, {270, 30}, {150, 100}, {30, 170}, {270, 170}};
  for (auto& c : centers) hollow_square(img, c[0], c[1], 20, 2);
  const auto found = detect_squares(img, {8, 64});
  ASSERT_EQ(found.size(), 5u);
  for (auto& c : centers) {
    const bool hit = std::any_of(found.begin(), found.end(), [&](const SquareDetection& d) {
      return std::hypot(d.center.x - c[0], d.center.y - c[1]) <= 1.0;
    });
    EXPECT_TRUE(hit) << c[0] << "," << c[1];
  }
  for (const auto& d : found) EXPECT_NEAR(d.side, 20, 1);
}

TEST(Squares, BlankAndSolidRejected) {
  EXPECT_TRUE(detect_squares(GrayImage(100, 100)).empty());
  GrayImage img(100, 100);
  imaging::fill_rect(img, {30, 30, 20, 20}, 0);
  EXPECT_TRUE(detect_squares(img).empty());
  GrayImage bar(100, 100);
  imaging::draw_rect_outline(bar, {10, 40, 60, 20}, 0, 2);  // aspect 3
  EXPECT_TRUE(detect_squares(bar).empty());
}

TEST(Squares, ScaleConsistent) {
  GrayImage small(200, 200), big(400, 400);
  hollow_square(small, 60, 60, 24, 3);
  hollow_square(small, 140, 120, 30, 3);
  hollow_square(big, 120, 120, 48, 6);
  hollow_square(big, 280, 240, 60, 6);
  const auto a = detect_squares(small, {8, 64});
  const auto b = detect_squares(big, {16, 128});
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(b[i].side, 2 * a[i].side, 1.0);
  EXPECT_EQ(detect_squares(small, {8, 64}).size(), a.size());
}

TEST(Squares, RotatedScanOfTemplate) {
  const auto blank = eas().render_blank();
  const auto t = imaging::AffineTransform2D::rotation(3 * kDeg, 620, 877);
  const auto placed = imaging::apply_affine_placed(blank, t);
  const auto found = detect_squares(placed.image, size_range_for(eas()));
  EXPECT_EQ(found.size(), eas().squares.size());
}

TEST(Icp, IdentityOnEqualSets) {
  const auto pts = template_points();
  const auto r = icp_align(pts, pts);
  EXPECT_NEAR(r.transform.theta, 0, 1e-12);
  EXPECT_NEAR(r.transform.scale, 1, 1e-12);
  EXPECT_NEAR(r.residual, 0, 1e-9);
}

TEST(Icp, RecoversRotationAndTranslation) {
  const auto pts = template_points();
  const RigidTransform2D truth{3 * kDeg, 1.0, 10, -5};
  const auto r = icp_align(pts, moved(pts, truth));
  EXPECT_NEAR(r.transform.theta / kDeg, 3.0, 0.1);
  EXPECT_NEAR(r.transform.tx, 10, 0.5);
  EXPECT_NEAR(r.transform.ty, -5, 0.5);
  EXPECT_LT(r.residual, 0.5);
}

TEST(Icp, ResidualNonIncreasing) {
  Xoshiro256 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto pts = template_points();
    const RigidTransform2D t{rng.uniform(-5, 5) * kDeg, rng.uniform(0.9, 1.1), rng.uniform(-20, 20),
                             rng.uniform(-20, 20)};
    auto scan = moved(pts, t);
    for (auto& p : scan) p.x += rng.uniform(-0.5, 0.5), p.y += rng.uniform(-0.5, 0.5);
    const auto r = icp_align(pts, scan);
    for (std::size_t k = 1; k < r.residual_history.size(); ++k)
      ASSERT_LE(r.residual_history[k], r.residual_history[k - 1] + 1e-12);
  }
}

TEST(Icp, TranslationEquivariance) {
  const auto pts = template_points();
  const auto scan = moved(pts, {2 * kDeg, 1.05, 7, 3});
  const auto a = icp_align(pts, scan);
  auto pts2 = pts, scan2 = scan;
  for (auto& p : pts2) p.x += 40, p.y -= 25;
  for (auto& p : scan2) p.x += 40, p.y -= 25;
  const auto b = icp_align(pts2, scan2);
  EXPECT_NEAR(a.transform.theta, b.transform.theta, 1e-9);
  EXPECT_NEAR(a.transform.scale, b.transform.scale, 1e-9);
  // t' = t + v - sR v
  const double c = std::cos(a.transform.theta), s = std::sin(a.transform.theta), k = a.transform.scale;
  EXPECT_NEAR(b.transform.tx, a.transform.tx + 40 - k * (c * 40 - s * -25), 1e-9);
  EXPECT_NEAR(b.transform.ty, a.transform.ty - 25 - k * (s * 40 + c * -25), 1e-9);
}

TEST(Icp, RejectsOtherForm) {
  const auto pts = template_points();
  const std::vector<Point> other{{100, 100}, {900, 150}, {300, 1200}, {1100, 1600}, {600, 300}, {200, 800}};
  EXPECT_THROW(icp_align(pts, other), NonConformingError);
  EXPECT_THROW(icp_align({{0, 0}, {1, 1}}, pts), ConfigError);
}

TEST(Icp, ClosedFormFit) {
  const std::vector<Point> src{{0, 0}, {10, 0}, {0, 10}, {7, 3}};
  const RigidTransform2D t{0.4, 1.3, 5, -2};
  const auto fit = fit_similarity(src, moved(src, t));
  EXPECT_NEAR(fit.theta, 0.4, 1e-12);
  EXPECT_NEAR(fit.scale, 1.3, 1e-12);
  EXPECT_NEAR(fit.tx, 5, 1e-12);
  EXPECT_NEAR(fit.ty, -2, 1e-12);
}

TEST(Assign, ExactFieldGetsItsType) {
  const auto& f = eas().fields[3];
  const auto r = assign_types({f.box}, eas(), {});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].ctype, f.ctype);
  EXPECT_EQ(r[0].field_id, f.id);
  EXPECT_DOUBLE_EQ(r[0].overlap, 1.0);
}

TEST(Assign, StraddlingBoxTakesLargerShare) {
  formset::FormTemplate form = eas();
  form.fields = {{"left", typedgen::ContentType::Date, {100, 100, 100, 40}},
                 {"right", typedgen::ContentType::Name, {200, 100, 100, 40}}};
  // 60 columns over "left", 30 over "right", 10 outside both.
  const auto r = assign_types({{140, 110, 100, 20}}, form, {});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].field_id, "left");
  EXPECT_NEAR(r[0].overlap, 0.6, 1e-12);
  const auto outside = assign_types({{1000, 1500, 30, 20}}, form, {});
  EXPECT_FALSE(outside[0].ctype.has_value());
  EXPECT_DOUBLE_EQ(outside[0].overlap, 0.0);
}

TEST(Assign, ThresholdAndTies) {
  formset::FormTemplate form = eas();
  form.fields = {{"big", typedgen::ContentType::Address, {0, 0, 400, 400}},
                 {"small", typedgen::ContentType::Time, {100, 100, 50, 50}}};
  const auto r = assign_types({{100, 100, 50, 50}}, form, {});
  EXPECT_EQ(r[0].field_id, "small");  // both cover it fully
  form.fields = {{"f", typedgen::ContentType::Address, {0, 0, 100, 100}}};
  const auto weak = assign_types({{95, 0, 100, 10}}, form, {});
  EXPECT_FALSE(weak[0].ctype.has_value());
  EXPECT_NEAR(weak[0].overlap, 0.05, 1e-12);
}

TEST(Assign, OrderInvariant) {
  std::vector<imaging::Rect> boxes;
  for (const auto& f : eas().fields) boxes.push_back({f.box.x + 5, f.box.y + 3, f.box.w - 10, f.box.h});
  const RigidTransform2D t{1 * kDeg, 1.02, 4, -6};
  const auto a = assign_types(boxes, eas(), t);
  std::reverse(boxes.begin(), boxes.end());
  auto b = assign_types(boxes, eas(), t);
  std::reverse(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].field_id, b[i].field_id);
    EXPECT_EQ(a[i].overlap, b[i].overlap);
  }
}

TEST(Boxes, JsonIo) {
  const auto boxes = parse_boxes_json(R"({"boxes": [{"x": 1, "y": 2, "w": 3, "h": 4}]})");
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (imaging::Rect{1, 2, 3, 4}));
  EXPECT_EQ(parse_boxes_json(R"([{"x": 1, "y": 2, "w": 3, "h": 4}])"), boxes);
  EXPECT_THROW(parse_boxes_json("[{\"x\": 1}]"), ConfigError);
  EXPECT_THROW(parse_boxes_json("[{\"x\": 1, \"y\": 2, \"w\": 0, \"h\": 4}]"), ConfigError);
}
