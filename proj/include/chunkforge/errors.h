// Copyright 2026 The Chunkforge Authors.
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

#ifndef CHUNKFORGE_ERRORS_H_
#define CHUNKFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace chunkforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input had no content to turn into blocks.
class EmptyDocumentError : public Error {
 public:
  using Error::Error;
};

// Malformed input, inconsistent dimensions, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A plan or intermediate result broke one of the library's own invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Failure while obtaining boundary probabilities from a scorer.
class ScorerError : public Error {
 public:
  enum class Kind {
    kTransport,  // network or server-side failure; retrying may succeed
    kProtocol,   // response violated the wire contract
    kCapacity,   // request exceeded the scorer's declared capacity
  };

  ScorerError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }
  bool retryable() const { return kind_ == Kind::kTransport; }

 private:
  Kind kind_;
};

}  // namespace chunkforge

#endif  // CHUNKFORGE_ERRORS_H_
