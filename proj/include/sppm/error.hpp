// Copyright 2026 The sppm-phi Authors
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

namespace sppm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a constructor or operation (bad n, s, index, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Closed-form prox requested for a problem family that has none.
class UnsupportedKind : public Error {
 public:
  using Error::Error;
};

/// A solver could not reach its certification tolerance.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

/// Fixed-step inner solver produced a non-finite subproblem value.
class InnerDivergence : public Error {
 public:
  using Error::Error;
};

/// A theorem's stepsize (or other) hypothesis does not hold.
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sppm
