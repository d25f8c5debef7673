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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace typedhwr::typedgen {

// The ten field content types. The enumerator value is the one-hot index.
enum class ContentType : int {
  FreeText = 0,
  Name = 1,
  PhoneNumber = 2,
  Date = 3,
  Time = 4,
  Address = 5,
  LicensePlate = 6,
  Numbers = 7,
  CarModel = 8,
  InsuranceName = 9,
};

inline constexpr int kNumContentTypes = 10;

inline constexpr std::array<ContentType, kNumContentTypes> kAllContentTypes = {
    ContentType::FreeText, ContentType::Name,         ContentType::PhoneNumber, ContentType::Date,
    ContentType::Time,     ContentType::Address,      ContentType::LicensePlate, ContentType::Numbers,
    ContentType::CarModel, ContentType::InsuranceName,
};

constexpr int index_of(ContentType t) { return static_cast<int>(t); }

std::string_view to_string(ContentType t);
std::optional<ContentType> parse_content_type(std::string_view name);
// Throws ConfigError naming the unknown type.
ContentType content_type_from_string(std::string_view name);

}  // namespace typedhwr::typedgen
