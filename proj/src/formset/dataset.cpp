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

#include "typedhwr/formset/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "typedhwr/common/error.hpp"
#include "typedhwr/formset/preprocess.hpp"
#include "typedhwr/typedgen/generators.hpp"

namespace typedhwr::formset {

using nlohmann::ordered_json;

namespace {

// Child stream tags within one sample.
enum : std::uint64_t { kTagType = 0, kTagText, kTagFont, kTagRender, kTagAugment, kTagElastic, kTagComposite };

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

}  // namespace

std::string SampleRecord::to_json_line() const {
  ordered_json j;
  j["image_path"] = image_path;
  j["text"] = text;
  j["ctype"] = typedgen::to_string(ctype);
  j["original_width"] = original_width;
  j["font_id"] = font_id;
  j["seed"] = seed;
  j["augmentations"] = augmentations;
  return j.dump();
}

SampleRecord SampleRecord::from_json_line(const std::string& line) {
  SampleRecord r;
  try {
    const auto j = ordered_json::parse(line);
    r.image_path = j.at("image_path").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.ctype = typedgen::content_type_from_string(j.at("ctype").get<std::string>());
    r.original_width = j.value("original_width", 0);
    r.font_id = j.value("font_id", std::string());
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("augmentations")) r.augmentations = j["augmentations"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("malformed manifest line: ") + e.what());
  }
  return r;
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<SampleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(SampleRecord::from_json_line(line));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  for (const auto& r : records) out << r.to_json_line() << '\n';
}

void AugmentConfig::validate() const {
  for (double p : {p_affine, p_elastic, p_morph, p_composite}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("augmentation probabilities must lie in [0, 1]");
  }
  if (!(max_rotation_deg >= 0 && max_shear >= 0)) throw ConfigError("rotation and shear bounds must be >= 0");
  if (!(min_scale > 0 && min_scale <= max_scale)) throw ConfigError("scale range must satisfy 0 < min <= max");
}

std::pair<imaging::GrayImage, SampleRecord> synthesize_sample(std::uint64_t index, const FormTemplate& form,
                                                              const imaging::GrayImage& blank_form,
                                                              const typedgen::TypeWeights& weights,
                                                              const EmitConfig& config, std::uint64_t root_seed,
                                                              const EmitResources& res) {
  const SeedStream seed{root_seed, index};
  SampleRecord rec;
  rec.seed = seed.sub_seed();
  rec.ctype = typedgen::sample_type(weights, seed.child(kTagType));
  rec.text = typedgen::generate(rec.ctype, seed.child(kTagText), res.lexicons, res.alphabet).text;

  const auto& loaded = res.fonts.fonts();
  const imaging::Font* font = &res.fonts.fallback();
  if (!loaded.empty()) {
    Xoshiro256 frng = seed.child(kTagFont).rng();
    font = loaded[frng.below(loaded.size())].get();
  }
  rec.font_id = font->id();

  imaging::RenderStyle style = config.style;
  style.font_id = font->id();
  auto rendered = imaging::render_text(rec.text, *font, style, seed.child(kTagRender), res.fonts.fallback());
  imaging::GrayImage img = std::move(rendered.image);
  rec.augmentations = std::move(rendered.warnings);

  const AugmentConfig& aug = config.augment;
  Xoshiro256 rng = seed.child(kTagAugment).rng();
  // Every decision and parameter is drawn whether or not it is used, so
  // toggling one family leaves the others' draws unchanged.
  const bool do_affine = rng.bernoulli(aug.p_affine);
  const double rot_deg = rng.uniform(-aug.max_rotation_deg, aug.max_rotation_deg);
  const double shear = rng.uniform(-aug.max_shear, aug.max_shear);
  const double scale = rng.uniform(aug.min_scale, aug.max_scale);
  const bool do_elastic = rng.bernoulli(aug.p_elastic);
  const auto elastic = imaging::ElasticParams::sample(rng, style.text_height);
  const bool do_morph = rng.bernoulli(aug.p_morph);
  imaging::MorphOp morph;
  morph.kind = static_cast<imaging::MorphKind>(rng.below(4));
  morph.element.shape = static_cast<imaging::ElementShape>(rng.below(3));
  const double r = rng.uniform();
  morph.element.radius = r < 0.70 ? 1 : (r < 0.95 ? 2 : 3);
  // A max filter wider than one pixel erases strokes of the 32 px glyphs.
  if (morph.kind == imaging::MorphKind::Dilate || morph.kind == imaging::MorphKind::Close) morph.element.radius = 1;
  const bool do_composite = rng.bernoulli(aug.p_composite);

  if (do_affine) {
    const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
    const auto t = imaging::AffineTransform2D::rotation(rot_deg * std::numbers::pi / 180.0, cx, cy)
                       .then_after(imaging::AffineTransform2D::shear_x(shear, cy))
                       .then_after(imaging::AffineTransform2D::scaling(scale, cx, cy));
    img = imaging::apply_affine(img, t);
    rec.augmentations.push_back(fmt("affine(rot=%.3f,shear=%.3f,scale=%.3f)", rot_deg, shear, scale));
  }
  if (do_elastic) {
    img = imaging::apply_elastic(img, elastic, seed.child(kTagElastic));
    rec.augmentations.push_back(fmt("elastic(sigma=%.3f,alpha=%.1f)", elastic.sigma, elastic.alpha));
  }
  if (do_morph) {
    img = imaging::apply_morph(img, morph);
    rec.augmentations.push_back(morph.describe());
  }
  if (do_composite) {
    const auto candidates = form.fields_of_type(rec.ctype);
    if (candidates.empty()) {
      rec.augmentations.push_back("standalone:no-field-for-type");
    } else {
      Xoshiro256 crng = seed.child(kTagComposite).rng();
      const FieldSpec& field = *candidates[crng.below(candidates.size())];
      const auto params = imaging::CompositeParams::sample(crng);
      img = imaging::composite_into_field(img, blank_form, field.box, params).image;
      rec.augmentations.push_back("composite(field=" + field.id + fmt(",overflow=%.3f,margin=%.3f)", params.overflow, params.margin));
    }
  }
  rec.original_width = scaled_width(img.width(), img.height());
  return {std::move(img), std::move(rec)};
}

std::vector<SampleRecord> emit_dataset(int count, const FormTemplate& form, const typedgen::TypeWeights& weights,
                                       const EmitConfig& config, std::uint64_t root_seed,
                                       const EmitResources& res) {
  if (count < 0) throw ConfigError("sample count must be >= 0");
  if (config.workers < 1) throw ConfigError("workers must be >= 1");
  form.validate();
  config.style.validate();
  config.augment.validate();
  for (auto t : typedgen::kAllContentTypes) {
    if (weights[t] > 0) typedgen::require_lexicons(t, res.lexicons);
  }

  const auto images_dir = config.out_dir / "images";
  std::filesystem::create_directories(images_dir);
  const imaging::GrayImage blank = form.render_blank();

  std::vector<SampleRecord> records(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(config.workers));
  auto work = [&](int worker) {
    try {
      for (int i = worker; i < count; i += config.workers) {
        auto [img, rec] = synthesize_sample(static_cast<std::uint64_t>(i), form, blank, weights, config, root_seed, res);
        char name[32];
        std::snprintf(name, sizeof name, "images/%06d.png", i);
        rec.image_path = name;
        imaging::write_png(config.out_dir / rec.image_path, img);
        records[static_cast<std::size_t>(i)] = std::move(rec);
      }
    } catch (...) {
      failures[static_cast<std::size_t>(worker)] = std::current_exception();
    }
  };
  if (config.workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (int w = 0; w < config.workers; ++w) threads.emplace_back(work, w);
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  write_manifest(config.out_dir / config.manifest_name, records);
  return records;
}

}  // namespace typedhwr::formset
