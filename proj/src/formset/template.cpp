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

#include "typedhwr/formset/template.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "typedhwr/common/error.hpp"

namespace typedhwr::formset {

using nlohmann::ordered_json;

void FormTemplate::validate() const {
  if (form_id.empty()) throw ConfigError("template: form_id is empty");
  if (page_width < 1 || page_height < 1) throw ConfigError("template " + form_id + ": page size must be positive");
  if (squares.size() < kMinSquares) {
    throw ConfigError("template " + form_id + ": at least 3 marker squares are required for alignment");
  }
  for (const auto& s : squares) {
    if (!(s.side > 0)) throw ConfigError("template " + form_id + ": square side must be positive");
  }
  std::set<std::string> ids;
  const Rect page{0, 0, page_width, page_height};
  for (const auto& f : fields) {
    if (f.id.empty()) throw ConfigError("template " + form_id + ": field with empty id");
    if (!ids.insert(f.id).second) throw ConfigError("template " + form_id + ": duplicate field id '" + f.id + "'");
    if (f.box.w <= 0 || f.box.h <= 0) throw ConfigError("field '" + f.id + "': box width and height must be > 0");
    if (!page.contains(f.box)) throw ConfigError("field '" + f.id + "': box lies outside the page");
  }
}

FormTemplate FormTemplate::parse(const std::string& json_text, const std::filesystem::path& base_dir) {
  FormTemplate t;
  t.base_dir = base_dir;
  try {
    const auto j = ordered_json::parse(json_text);
    t.form_id = j.at("form_id").get<std::string>();
    t.page_width = j.at("page").at("width").get<int>();
    t.page_height = j.at("page").at("height").get<int>();
    if (j.contains("background") && !j["background"].is_null()) t.background = j["background"].get<std::string>();
    for (const auto& s : j.at("squares")) {
      t.squares.push_back({s.at("cx").get<double>(), s.at("cy").get<double>(), s.at("side").get<double>()});
    }
    for (const auto& f : j.at("fields")) {
      const auto& b = f.at("box");
      t.fields.push_back({f.at("id").get<std::string>(), typedgen::content_type_from_string(f.at("type").get<std::string>()),
                          Rect{b.at("x").get<int>(), b.at("y").get<int>(), b.at("w").get<int>(), b.at("h").get<int>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("template: malformed JSON: ") + e.what());
  }
  t.validate();
  return t;
}

FormTemplate FormTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

std::string FormTemplate::to_json() const {
  ordered_json j;
  j["form_id"] = form_id;
  j["page"] = {{"width", page_width}, {"height", page_height}};
  j["background"] = background ? ordered_json(*background) : ordered_json(nullptr);
  j["squares"] = ordered_json::array();
  for (const auto& s : squares) j["squares"].push_back({{"cx", s.cx}, {"cy", s.cy}, {"side", s.side}});
  j["fields"] = ordered_json::array();
  for (const auto& f : fields) {
    j["fields"].push_back({{"id", f.id},
                           {"type", typedgen::to_string(f.ctype)},
                           {"box", {{"x", f.box.x}, {"y", f.box.y}, {"w", f.box.w}, {"h", f.box.h}}}});
  }
  return j.dump(2) + "\n";
}

void FormTemplate::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write template " + path.string());
  out << to_json();
}

std::vector<const FieldSpec*> FormTemplate::fields_of_type(ContentType t) const {
  std::vector<const FieldSpec*> out;
  for (const auto& f : fields) {
    if (f.ctype == t) out.push_back(&f);
  }
  return out;
}

int marker_stroke(double side) { return std::max(2, static_cast<int>(std::lround(side / 8.0))); }

imaging::GrayImage FormTemplate::render_blank() const {
  if (background) {
    std::filesystem::path p(*background);
    if (p.is_relative()) p = base_dir / p;
    auto img = imaging::read_image(p);
    if (img.width() != page_width || img.height() != page_height) {
      throw ConfigError("template " + form_id + ": background size does not match the page");
    }
    return img;
  }
  imaging::GrayImage page(page_width, page_height);
  for (const auto& s : squares) {
    const int side = static_cast<int>(std::lround(s.side));
    const Rect r{static_cast<int>(std::lround(s.cx - s.side / 2.0)), static_cast<int>(std::lround(s.cy - s.side / 2.0)),
                 side, side};
    imaging::draw_rect_outline(page, r, imaging::kInk, marker_stroke(s.side));
  }
  for (const auto& f : fields) imaging::draw_rect_outline(page, f.box, 96, 1);
  return page;
}

}  // namespace typedhwr::formset
