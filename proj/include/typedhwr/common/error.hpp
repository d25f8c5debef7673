// Copyright 2026 The typedhwr Authors.
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

namespace typedhwr {

// Root of every error raised by the library. Each subclass maps to one
// failure family so callers (notably the CLI) can pick exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, missing lexicon, inconsistent arch/checkpoint, ...
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Geometry outside its container (field box outside the form, ...).
class BoundsError : public Error {
 public:
  using Error::Error;
};

class InvalidTransformError : public Error {
 public:
  using Error::Error;
};

// Label that cannot be aligned to the available time steps.
class InfeasibleLabelError : public Error {
 public:
  using Error::Error;
};

// Exponential oracle called on an instance above its size guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

// Text containing a symbol the alphabet cannot encode.
class EncodingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptFileError : public Error {
 public:
  using Error::Error;
};

class VersionMismatchError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf showed up during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Scanned document does not register against the template.
class NonConformingError : public Error {
 public:
  using Error::Error;
};

}  // namespace typedhwr
