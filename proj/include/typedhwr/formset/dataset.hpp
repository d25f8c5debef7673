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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "typedhwr/formset/template.hpp"
#include "typedhwr/imaging/augment.hpp"
#include "typedhwr/imaging/font.hpp"
#include "typedhwr/imaging/render.hpp"
#include "typedhwr/typedgen/alphabet.hpp"
#include "typedhwr/typedgen/lexicon.hpp"
#include "typedhwr/typedgen/weights.hpp"

namespace typedhwr::formset {

// One manifest line.
struct SampleRecord {
  std::string image_path;  // relative to the manifest
  std::string text;
  ContentType ctype = ContentType::FreeText;
  int original_width = 0;  // after scaling to height 32, before padding
  std::string font_id;
  std::uint64_t seed = 0;
  std::vector<std::string> augmentations;

  std::string to_json_line() const;
  static SampleRecord from_json_line(const std::string& line);
  bool operator==(const SampleRecord&) const = default;
};

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<SampleRecord>& records);

struct AugmentConfig {
  double p_affine = 0.9;
  double p_elastic = 0.8;
  double p_morph = 0.5;
  double p_composite = 0.7;
  double max_rotation_deg = 5.0;
  double max_shear = 0.3;
  double min_scale = 0.8;
  double max_scale = 1.2;

  void validate() const;
};

struct EmitConfig {
  std::filesystem::path out_dir;
  std::string manifest_name = "manifest.jsonl";
  imaging::RenderStyle style;  // font_id is ignored; fonts are drawn per sample
  AugmentConfig augment;
  int workers = 1;
};

// Everything a sample is drawn from besides the seed.
struct EmitResources {
  const typedgen::LexiconSet& lexicons;
  const typedgen::Alphabet& alphabet;
  const imaging::FontCollection& fonts;
};

// Sample i uses SeedStream{root_seed, i}; the output does not depend on the
// worker count. Returns the records in index order, as written.
std::vector<SampleRecord> emit_dataset(int count, const FormTemplate& form, const typedgen::TypeWeights& weights,
                                       const EmitConfig& config, std::uint64_t root_seed,
                                       const EmitResources& resources);

// The pure part of emit_dataset for one index: the image and its record
// (image_path left empty).
std::pair<imaging::GrayImage, SampleRecord> synthesize_sample(std::uint64_t index, const FormTemplate& form,
                                                              const imaging::GrayImage& blank_form,
                                                              const typedgen::TypeWeights& weights,
                                                              const EmitConfig& config, std::uint64_t root_seed,
                                                              const EmitResources& resources);

}  // namespace typedhwr::formset
