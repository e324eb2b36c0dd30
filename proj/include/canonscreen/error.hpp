#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace canonscreen {

/// Coarse error classes; each maps to one CLI exit code.
enum class ErrorKind { Usage, Data, Io, Numerical, Format };

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  DuplicateId,
  MissingIdColumn,
  NonNumericCell,
  NoMatchedIds,
  EmptySplit,
  UnknownId,
  DegenerateBandwidth,
  IsolatedVertex,
  SingularConstraint,
  EigenFailure,
  UnsupportedVersion,
  CorruptModel,
  Io,
};

std::string_view error_name(ErrorCode code) noexcept;
ErrorKind error_kind(ErrorCode code) noexcept;

/// Exit status used by the CLI: 2 usage, 3 data/io/format, 4 numerical.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return error_kind(code_); }

 private:
  ErrorCode code_;
};

}  // namespace canonscreen
