// Copyright 2026 The Inextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INEXTRACT_ERRORS_HPP_
#define INEXTRACT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace inextract {

// Base of every error thrown by the toolkit. Preconditions violated by the
// caller surface as std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedDistributionError : public Error {
 public:
  using Error::Error;
};

// Raised by trace ingestion; the message names the sequence and position.
class TraceFormatError : public Error {
 public:
  using Error::Error;
};

class InsufficientTraceError : public Error {
 public:
  using Error::Error;
};

class WindowRangeError : public Error {
 public:
  using Error::Error;
};

class EmptyProtectedSetError : public Error {
 public:
  using Error::Error;
};

class WindowMismatchError : public Error {
 public:
  using Error::Error;
};

class SamplingExhaustedError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace inextract

#endif  // INEXTRACT_ERRORS_HPP_
