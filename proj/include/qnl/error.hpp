// Copyright 2026 The qnl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qnl {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed system text; carries the 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A value does not fit a fixed-point format.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A projection or marking left no amplitude: no candidate in the search box.
class EmptyBranchError : public Error {
 public:
  using Error::Error;
};

/// Requested simulation exceeds the dense qubit cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// Simulated circuit violated an internal identity (e.g. scratch not restored).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Repeat-until-success sampling hit its attempt cap.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnl
