// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (non-COLA STFT, bad layout, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates an operation's precondition (too short, out of range).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Tensor shape mismatch. Carries the offending layer, if any.
class ShapeError : public Error {
 public:
  ShapeError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// File system or file format problem.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vb
