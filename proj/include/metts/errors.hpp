// Copyright 2026 The metts-trotter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef METTS_ERRORS_HPP
#define METTS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metts {

// Index/shape/charge bookkeeping violated.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Floating-point breakdown: vanishing norms, non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what, std::size_t written = 0)
      : std::runtime_error(what), written_(written) {}
  // Records completed before the failure.
  std::size_t written() const { return written_; }

 private:
  std::size_t written_;
};

}  // namespace metts

#endif  // METTS_ERRORS_HPP
