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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emocert {

// Base of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file on disk does not follow its documented layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Collects every violation found while validating an input, not just the
// first one.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> issues)
      : Error(Compose(what, issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string Compose(const std::string& what,
                             const std::vector<std::string>& issues) {
    std::string out = what;
    for (const auto& issue : issues) {
      out += "\n  ";
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace emocert
