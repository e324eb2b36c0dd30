#include "canonscreen/error.hpp"

namespace canonscreen {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingIdColumn: return "MissingIdColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NoMatchedIds: return "NoMatchedIds";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::DegenerateBandwidth: return "DegenerateBandwidth";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::SingularConstraint: return "SingularConstraint";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorKind error_kind(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return ErrorKind::Usage;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonFinite:
    case ErrorCode::DuplicateId:
    case ErrorCode::MissingIdColumn:
    case ErrorCode::NonNumericCell:
    case ErrorCode::NoMatchedIds:
    case ErrorCode::EmptySplit:
    case ErrorCode::UnknownId:
      return ErrorKind::Data;
    case ErrorCode::DegenerateBandwidth:
    case ErrorCode::IsolatedVertex:
    case ErrorCode::SingularConstraint:
    case ErrorCode::EigenFailure:
      return ErrorKind::Numerical;
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::CorruptModel:
      return ErrorKind::Format;
    case ErrorCode::Io:
      return ErrorKind::Io;
  }
  return ErrorKind::Data;
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Numerical: return 4;
    case ErrorKind::Data:
    case ErrorKind::Io:
    case ErrorKind::Format: return 3;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

}  // namespace canonscreen
