/* Copyright 2026 The ctcconf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CTCCONF_ERRORS_HPP_
#define CTCCONF_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctcconf {

// Root of every error raised by the library. Callers that only need to
// distinguish "our failure" from anything else catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument or configuration value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownCharacter : public Error {
 public:
  UnknownCharacter(std::size_t position, std::string character)
      : Error("unknown character '" + character + "' at position " +
              std::to_string(position)),
        position_(position),
        character_(std::move(character)) {}

  std::size_t position() const { return position_; }
  const std::string& character() const { return character_; }

 private:
  std::size_t position_;
  std::string character_;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (bad magic, truncated payload, bad JSON field).
class FormatError : public Error {
 public:
  using Error::Error;
};

// The file system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

class InfeasibleLabel : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Only one class (all correct or all incorrect) is present; ROC/AUC undefined.
class DegenerateDataset : public Error {
 public:
  using Error::Error;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace ctcconf

#endif  // CTCCONF_ERRORS_HPP_
