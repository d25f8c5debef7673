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
#include <vector>

#include "typedhwr/formset/dataset.hpp"
#include "typedhwr/imaging/gray_image.hpp"
#include "typedhwr/typedgen/alphabet.hpp"

namespace typedhwr::formset {

inline constexpr int kInputHeight = 32;
inline constexpr int kMinInputWidth = 256;

struct Preprocessed {
  imaging::GrayImage image;
  int original_width = 0;
};

// Width after the aspect-preserving rescale to kInputHeight.
int scaled_width(int width, int height);

// Rescale to height 32, then tile copies of the result to the right until
// the width reaches min_width. original_width is the pre-padding width.
Preprocessed preprocess(const imaging::GrayImage& img, int min_width = kMinInputWidth);

struct Batch {
  std::vector<imaging::GrayImage> images;  // all 32 x width
  std::vector<int> widths;
  std::vector<std::vector<int>> labels;
  std::vector<ContentType> types;
  std::vector<std::size_t> record_ids;  // index into the record list

  std::size_t size() const { return images.size(); }
  int width() const { return images.empty() ? 0 : images.front().width(); }
};

// Width of the bucket an image of padded width w falls into.
int bucket_width(int padded_width, int bucket_step = 64);

// Preprocesses every record, right-pads it with its own tiling to its bucket
// width and groups equal buckets into batches of at most batch_size, in
// record order within a bucket and ascending bucket width.
std::vector<Batch> make_batches(const std::vector<SampleRecord>& records, const std::filesystem::path& root,
                                int batch_size, const typedgen::Alphabet& alphabet, int bucket_step = 64);

// Same bucketing over already-preprocessed images.
std::vector<Batch> make_batches(const std::vector<Preprocessed>& images, const std::vector<std::string>& texts,
                                const std::vector<ContentType>& types, int batch_size,
                                const typedgen::Alphabet& alphabet, int bucket_step = 64,
                                const std::vector<std::string>& names = {});

}  // namespace typedhwr::formset
