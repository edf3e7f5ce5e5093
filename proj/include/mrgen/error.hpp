#pragma once

#include <stdexcept>
#include <string>

namespace mrgen {

// Base class for all toolkit errors. Each CLI failure class maps onto one
// of the subtypes below so the driver can emit a single-line diagnostic
// with a stable exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct MalformedMr : ParseError {
  using ParseError::ParseError;
};
struct DuplicateSlot : ParseError {
  using ParseError::ParseError;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NotDelexicalizable : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct EmptySource : Error {
  using Error::Error;
};
struct EmptyPool : Error {
  using Error::Error;
};
struct GrammarError : Error {
  using Error::Error;
};
struct CheckpointError : Error {
  using Error::Error;
};
struct VersionMismatch : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct ShapeMismatch : CheckpointError {
  using CheckpointError::CheckpointError;
};

}  // namespace mrgen
