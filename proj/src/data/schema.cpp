// Copyright 2026 The emocert Authors
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

#include "emocert/data/schema.hpp"

namespace emocert::data {

std::string_view AttributeName(Attribute attribute) {
  switch (attribute) {
    case Attribute::kGender:
      return EnumNames<Gender>::kAttribute;
    case Attribute::kRace:
      return EnumNames<Race>::kAttribute;
    case Attribute::kAgeGroup:
      return EnumNames<AgeGroup>::kAttribute;
  }
  return "unknown";
}

std::optional<Attribute> ParseAttribute(std::string_view text) {
  for (Attribute a : kAllAttributes) {
    if (AttributeName(a) == text) return a;
  }
  return std::nullopt;
}

}  // namespace emocert::data
