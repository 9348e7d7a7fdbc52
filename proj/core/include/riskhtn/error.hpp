// Copyright 2026 The riskhtn Authors
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

#ifndef RISKHTN_ERROR_HPP_
#define RISKHTN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace riskhtn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `location()` is either "line:col" for syntax errors
// or a JSON pointer such as "/operators/2/outcomes/0/cost" for schema errors.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& message)
      : Error(location + ": " + message), location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// A structurally valid model that violates a semantic rule (unknown type,
// arity mismatch, ill-formed ordering, non-ground argument, ...).
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& message) : Error(message), detail_(message) {}
  // `path` is a JSON pointer into the document the model came from.
  ModelError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)), detail_(message) {}

  const std::string& path() const { return path_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  std::string detail_;
};

// An explicit resource cap (trajectory count, oracle node budget) was hit.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskhtn

#endif  // RISKHTN_ERROR_HPP_
