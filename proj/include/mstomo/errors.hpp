// Copyright 2026 The mstomo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mstomo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (range, size, sign) was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two operands disagree on a dimension.
class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Fiducial amplitudes are not normalized to unit length.
class InvalidFiducial : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The equidistant parametrization has a negative lambda_k for this alpha, so
/// no real-amplitude normalized fiducial exists there.
class InvalidAlphaRegion : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A decomposition (SVD, eigensolver) did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Poisson model predicts N_j <= 0 for an outcome that registered counts.
class NonpositiveExpectedCount : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mstomo
