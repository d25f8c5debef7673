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
#include <optional>
#include <string>
#include <vector>

#include "typedhwr/formset/template.hpp"
#include "typedhwr/imaging/gray_image.hpp"

namespace typedhwr::alignkit {

using imaging::GrayImage;
using imaging::Rect;
using typedgen::ContentType;

struct Point {
  double x = 0;
  double y = 0;
};

// Continuous coordinates: pixel (i, j) covers [i, i+1) x [j, j+1).
struct SquareDetection {
  Point center;
  double side = 0;
  double hollowness = 0;  // 1 - interior ink fraction
};

struct SizeRange {
  double min_side = 8;
  double max_side = 256;
};

struct SquareTests {
  double min_aspect = 0.8;
  double max_aspect = 1.25;
  double max_interior_ink = 0.2;
  double min_perimeter_coverage = 0.6;
};

// Global Otsu threshold; pixels <= threshold are ink. Empty optional for a
// flat image.
std::optional<int> otsu_threshold(const GrayImage& img);

// Components are 8-connected. The interior is the central half of the
// bounding box (a quarter of its side inset on every edge). Perimeter
// coverage probes every row from the left and right and every column from
// the top and bottom: a probe hits when the component has ink within 15% of
// the side from that edge. Sorted by (y, x) of the centre.
std::vector<SquareDetection> detect_squares(const GrayImage& img, const SizeRange& range = {},
                                            const SquareTests& tests = {});

// p -> s R(theta) p + t, template to scan.
struct RigidTransform2D {
  double theta = 0;
  double scale = 1;
  double tx = 0;
  double ty = 0;

  Point apply(const Point& p) const;
};

struct IcpConfig {
  int max_iterations = 50;
  double tolerance = 1e-6;       // stop when the residual improves by less
  double reject_residual = 5.0;  // px
  double min_scale = 0.5;
  double max_scale = 2.0;
  double trim_fraction = 0.0;  // drop this share of worst matches per fit
};

struct IcpResult {
  RigidTransform2D transform;
  double residual = 0;  // root mean square nearest-neighbour distance
  int iterations = 0;
  std::vector<double> residual_history;  // after the initial guess and each fit
};

// Least-squares similarity mapping src[i] to dst[i].
RigidTransform2D fit_similarity(const std::vector<Point>& src, const std::vector<Point>& dst);

// Starts from the centroid- and spread-matching similarity, then alternates
// nearest-neighbour matching (template to scan) and closed-form fits.
// Throws ConfigError with fewer than 3 points on either side and
// NonConformingError when the residual or scale falls outside the limits.
IcpResult icp_align(const std::vector<Point>& template_pts, const std::vector<Point>& scan_pts,
                    const IcpConfig& cfg = {});

inline constexpr double kUnknownOverlap = 0.10;

struct TypedBox {
  Rect box;
  std::optional<ContentType> ctype;  // empty = Unknown
  std::string field_id;              // empty when Unknown
  double overlap = 0;                // best intersection / box area
  std::string crop_path;
};

// Maps each field to the bounding box of its transformed corners and picks
// the field with the largest overlap, ties going to the smaller mapped area.
std::vector<TypedBox> assign_types(const std::vector<Rect>& boxes, const formset::FormTemplate& form,
                                   const RigidTransform2D& t);

std::vector<Rect> parse_boxes_json(const std::string& text);
std::vector<Rect> load_boxes(const std::filesystem::path& path);
std::string typed_boxes_to_json(const std::vector<TypedBox>& boxes);

struct AlignResult {
  std::vector<SquareDetection> squares;
  IcpResult icp;
  std::vector<TypedBox> boxes;
};

// Detection size range derived from the template: half the smallest to
// twice the largest marker side.
SizeRange size_range_for(const formset::FormTemplate& form);

AlignResult align_document(const formset::FormTemplate& form, const GrayImage& scan, const std::vector<Rect>& boxes,
                           const IcpConfig& cfg = {});

// Writes scan crops as crops/<index>.png under out_dir and fills crop_path.
void write_crops(const GrayImage& scan, std::vector<TypedBox>& boxes, const std::filesystem::path& out_dir);

}  // namespace typedhwr::alignkit
