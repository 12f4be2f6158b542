// Copyright 2026 The DMC Authors. All Rights Reserved.
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

#ifndef DMC_ERRORS_H_
#define DMC_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid dimensions, out-of-range parameters, inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad or inconsistent input data (duplicates, empty sets, missing ids).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Random graph generation gave up.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// A positive-definite factorization failed, or an update produced
// non-finite values. Carries the context that was known when it was thrown;
// the runner fills in the iteration.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dmc

#endif  // DMC_ERRORS_H_
