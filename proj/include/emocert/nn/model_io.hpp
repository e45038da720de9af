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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "emocert/core/error.hpp"
#include "emocert/nn/parameters.hpp"

namespace emocert::nn {

// "EMOC", u16 version, u8 arch id, then per tensor {u16 name length, name,
// u8 rank, u32 dims[rank], f32 data[...]}; little-endian throughout.
inline constexpr char kModelMagic[4] = {'E', 'M', 'O', 'C'};
inline constexpr std::uint16_t kModelFormatVersion = 1;

enum class ModelFileErrorKind {
  kIo,
  kBadMagic,
  kUnsupportedVersion,
  kUnknownArch,
  kTruncated,
  kMismatch,  // tensors do not match the canonical layout of the arch
};

class ModelFileError : public FormatError {
 public:
  ModelFileError(ModelFileErrorKind kind, const std::string& what)
      : FormatError(what), kind_(kind) {}
  ModelFileErrorKind kind() const { return kind_; }

 private:
  ModelFileErrorKind kind_;
};

void WriteModel(const Model& model, std::ostream& out);
void SaveModel(const Model& model, const std::filesystem::path& path);

// The model spec is rebuilt from the arch id; every tensor must match its
// canonical name and shape, in order.
Model ReadModel(std::istream& in, const std::string& source = "<stream>");
Model LoadModel(const std::filesystem::path& path);

}  // namespace emocert::nn
