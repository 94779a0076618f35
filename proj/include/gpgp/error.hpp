// Copyright 2026 The GPGP Authors.
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

#include <Eigen/Dense>

namespace gpgp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: dimension mismatch, out-of-range index, invalid config.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the offending line (1-based, 0 if unknown).
class ParseError : public InputError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input is well-formed but carries no usable signal (e.g. an all-zero
// comparison matrix).
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Newton iteration did not reach tolerance. The last iterate is kept so
// callers can inspect or warm-start from it.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                   double grad_norm)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        grad_norm_(grad_norm) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double grad_norm() const { return grad_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double grad_norm_;
};

class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpgp
