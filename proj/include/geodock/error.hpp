// Copyright 2026 The GeoDock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace geodock {

/// Base class for all geodock failures (invalid data, invalid geometry,
/// degenerate numerics). Parsing failures use the ParseError subclass so
/// callers can report the offending line.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what + " at line " + std::to_string(line)), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace geodock
