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

#include "typedhwr/imaging/gray_image.hpp"
#include "typedhwr/typedgen/content_type.hpp"

namespace typedhwr::formset {

using imaging::Rect;
using typedgen::ContentType;

// Hollow marker square, centre and side in page pixels.
struct MarkerSquare {
  double cx = 0;
  double cy = 0;
  double side = 0;

  bool operator==(const MarkerSquare&) const = default;
};

struct FieldSpec {
  std::string id;
  ContentType ctype = ContentType::FreeText;
  Rect box;

  bool operator==(const FieldSpec&) const = default;
};

struct FormTemplate {
  std::string form_id;
  int page_width = 0;
  int page_height = 0;
  // As written in the document; relative paths resolve against base_dir.
  std::optional<std::string> background;
  std::vector<MarkerSquare> squares;
  std::vector<FieldSpec> fields;
  // Directory of the file the template was loaded from. Not serialized.
  std::filesystem::path base_dir;

  static constexpr std::size_t kMinSquares = 3;

  // Throws ConfigError on the first violated invariant.
  void validate() const;

  static FormTemplate parse(const std::string& json_text, const std::filesystem::path& base_dir = {});
  static FormTemplate load(const std::filesystem::path& path);
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  std::vector<const FieldSpec*> fields_of_type(ContentType t) const;

  // Background image if one is configured, otherwise a white page with the
  // marker squares and field outlines drawn in.
  imaging::GrayImage render_blank() const;

  bool operator==(const FormTemplate& o) const {
    return form_id == o.form_id && page_width == o.page_width && page_height == o.page_height &&
           background == o.background && squares == o.squares && fields == o.fields;
  }
};

// Stroke width used by render_blank for a square of the given side.
int marker_stroke(double side);

}  // namespace typedhwr::formset
