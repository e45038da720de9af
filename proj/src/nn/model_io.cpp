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

#include "emocert/nn/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace emocert::nn {
namespace {

static_assert(std::numeric_limits<float>::is_iec559);

template <typename U>
void PutLe(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

class Reader {
 public:
  Reader(std::istream& in, const std::string& source) : in_(in), source_(source) {}

  void Read(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw ModelFileError(ModelFileErrorKind::kTruncated,
                           source_ + ": truncated while reading " + what);
    }
  }

  template <typename U>
  U Le(const char* what) {
    unsigned char bytes[sizeof(U)];
    Read(bytes, sizeof(U), what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<U>(bytes[i]) << (8 * i));
    }
    return value;
  }

  bool AtEnd() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void Fail(ModelFileErrorKind kind, const std::string& what) const {
    throw ModelFileError(kind, source_ + ": " + what);
  }

 private:
  std::istream& in_;
  const std::string& source_;
};

}  // namespace

void WriteModel(const Model& model, std::ostream& out) {
  out.write(kModelMagic, 4);
  PutLe<std::uint16_t>(out, kModelFormatVersion);
  PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(model.spec.arch));
  for (const auto& entry : model.params.entries()) {
    if (entry.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("parameter name too long: " + entry.name);
    }
    PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(entry.name.size()));
    out.write(entry.name.data(), static_cast<std::streamsize>(entry.name.size()));
    PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(entry.value.rank()));
    for (std::size_t d : entry.value.shape()) {
      PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    }
    for (float v : entry.value.data()) PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw ModelFileError(ModelFileErrorKind::kIo, "failed writing model");
}

void SaveModel(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ModelFileError(ModelFileErrorKind::kIo, "cannot open " + path.string());
  }
  WriteModel(model, out);
}

Model ReadModel(std::istream& in, const std::string& source) {
  Reader reader(in, source);
  char magic[4];
  reader.Read(magic, 4, "magic");
  if (std::memcmp(magic, kModelMagic, 4) != 0) {
    reader.Fail(ModelFileErrorKind::kBadMagic, "not a model file (bad magic)");
  }
  const auto version = reader.Le<std::uint16_t>("version");
  if (version != kModelFormatVersion) {
    reader.Fail(ModelFileErrorKind::kUnsupportedVersion,
                "unsupported model format version " + std::to_string(version) +
                    " (this build reads version " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  const auto arch_byte = reader.Le<std::uint8_t>("arch id");
  if (arch_byte > static_cast<std::uint8_t>(ArchId::kEnhanced)) {
    reader.Fail(ModelFileErrorKind::kUnknownArch,
                "unknown architecture id " + std::to_string(arch_byte));
  }
  Model model;
  model.spec = CanonicalSpec(static_cast<ArchId>(arch_byte));
  for (const ParamSlot& slot : ParameterSlots(model.spec)) {
    if (reader.AtEnd()) reader.Fail(ModelFileErrorKind::kTruncated, "missing tensor " + slot.name);
    const auto name_len = reader.Le<std::uint16_t>("name length");
    std::string name(name_len, '\0');
    reader.Read(name.data(), name_len, "tensor name");
    if (name != slot.name) {
      reader.Fail(ModelFileErrorKind::kMismatch,
                  "expected tensor " + slot.name + ", found " + name);
    }
    const auto rank = reader.Le<std::uint8_t>("rank");
    Shape shape(rank);
    for (auto& d : shape) d = reader.Le<std::uint32_t>("dimension");
    if (shape != slot.shape) {
      reader.Fail(ModelFileErrorKind::kMismatch,
                  "tensor " + name + " has shape " + core::ShapeToString(shape) +
                      ", expected " + core::ShapeToString(slot.shape));
    }
    core::TensorF value(shape);
    for (float& v : value.data()) v = std::bit_cast<float>(reader.Le<std::uint32_t>("tensor data"));
    model.params.Add(name, std::move(value), slot.trainable);
  }
  if (!reader.AtEnd()) {
    reader.Fail(ModelFileErrorKind::kMismatch, "unexpected trailing bytes");
  }
  return model;
}

Model LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(ModelFileErrorKind::kIo, "cannot open " + path.string());
  return ReadModel(in, path.string());
}

}  // namespace emocert::nn
