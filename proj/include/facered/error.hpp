#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace facered {

enum class ErrorKind {
  DimensionMismatch,
  NotPsd,
  NotPd,
  InvalidCertificate,
  InconsistentRow,
  PartialNotPsd,
  NotEdm,
  BadBracket,
  TooFewAnchors,
  RankMismatch,
  NotPermutation,
  ZeroPolynomial,
  FaceTooBig,
  IterationLimit,
  Parse,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// All recoverable failures in the library are reported through this type;
// the kind lets callers (notably the CLI) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace facered
