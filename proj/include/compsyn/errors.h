// Copyright 2026 The compsyn Authors.
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

#ifndef COMPSYN_ERRORS_H_
#define COMPSYN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace compsyn {

// Base for every error raised by the toolkit. The CLI maps the subclasses
// onto exit codes: ConfigError -> 1, DataError family -> 2,
// NumericalError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, size_t offset)
      : DataError(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}

  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace compsyn

#endif  // COMPSYN_ERRORS_H_
