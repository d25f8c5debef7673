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

#include "typedhwr/typedgen/content_type.hpp"

#include "typedhwr/common/error.hpp"

namespace typedhwr::typedgen {

namespace {

constexpr std::array<std::string_view, kNumContentTypes> kNames = {
    "FreeText", "Name", "PhoneNumber", "Date", "Time", "Address", "LicensePlate", "Numbers", "CarModel", "InsuranceName",
};

}  // namespace

std::string_view to_string(ContentType t) { return kNames.at(static_cast<std::size_t>(index_of(t))); }

std::optional<ContentType> parse_content_type(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ContentType>(i);
  }
  return std::nullopt;
}

ContentType content_type_from_string(std::string_view name) {
  if (auto t = parse_content_type(name)) return *t;
  throw ConfigError("unknown content type '" + std::string(name) + "'");
}

}  // namespace typedhwr::typedgen
