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

#include "typedhwr/formset/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "typedhwr/common/error.hpp"

namespace typedhwr::formset {

int scaled_width(int width, int height) {
  if (width < 1 || height < 1) throw BoundsError("degenerate image");
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(width) * kInputHeight / height)));
}

namespace {

// Repeats the first `period` columns of `img` cyclically out to `width`.
imaging::GrayImage tile_to(const imaging::GrayImage& img, int period, int width) {
  imaging::GrayImage out(width, img.height());
  for (int y = 0; y < img.height(); ++y) {
    const auto src = img.row(y);
    auto dst = out.row(y);
    for (int x = 0; x < width; ++x) dst[static_cast<std::size_t>(x)] = src[static_cast<std::size_t>(x % period)];
  }
  return out;
}

}  // namespace

Preprocessed preprocess(const imaging::GrayImage& img, int min_width) {
  const int w = scaled_width(img.width(), img.height());
  imaging::GrayImage scaled =
      img.height() == kInputHeight && img.width() == w ? img : imaging::resize_bilinear(img, w, kInputHeight);
  if (w >= min_width) return {std::move(scaled), w};
  return {tile_to(scaled, w, min_width), w};
}

int bucket_width(int padded_width, int bucket_step) {
  if (bucket_step < 1) throw ConfigError("bucket step must be >= 1");
  return (padded_width + bucket_step - 1) / bucket_step * bucket_step;
}

std::vector<Batch> make_batches(const std::vector<Preprocessed>& images, const std::vector<std::string>& texts,
                                const std::vector<ContentType>& types, int batch_size,
                                const typedgen::Alphabet& alphabet, int bucket_step,
                                const std::vector<std::string>& names) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (texts.size() != images.size() || types.size() != images.size()) {
    throw ShapeMismatchError("make_batches: images, texts and types differ in length");
  }
  std::vector<std::vector<int>> labels(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = i < names.size() ? names[i] : std::to_string(i);
    labels[i] = alphabet.encode(texts[i], name);
  }

  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < images.size(); ++i) {
    buckets[bucket_width(images[i].image.width(), bucket_step)].push_back(i);
  }
  std::vector<Batch> out;
  for (const auto& [width, members] : buckets) {
    for (std::size_t start = 0; start < members.size(); start += static_cast<std::size_t>(batch_size)) {
      Batch b;
      const std::size_t stop = std::min(members.size(), start + static_cast<std::size_t>(batch_size));
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = members[k];
        const auto& p = images[i];
        b.images.push_back(p.image.width() == width ? p.image : tile_to(p.image, p.original_width, width));
        b.widths.push_back(p.original_width);
        b.labels.push_back(labels[i]);
        b.types.push_back(types[i]);
        b.record_ids.push_back(i);
      }
      out.push_back(std::move(b));
    }
  }
  return out;
}

std::vector<Batch> make_batches(const std::vector<SampleRecord>& records, const std::filesystem::path& root,
                                int batch_size, const typedgen::Alphabet& alphabet, int bucket_step) {
  std::vector<Preprocessed> images;
  std::vector<std::string> texts, names;
  std::vector<ContentType> types;
  for (const auto& r : records) {
    images.push_back(preprocess(imaging::read_image(root / r.image_path)));
    texts.push_back(r.text);
    types.push_back(r.ctype);
    names.push_back(r.image_path);
  }
  return make_batches(images, texts, types, batch_size, alphabet, bucket_step, names);
}

}  // namespace typedhwr::formset
