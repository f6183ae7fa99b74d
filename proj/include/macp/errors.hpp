#pragma once

#include <stdexcept>
#include <string>

namespace macp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree, or a matrix is empty where one is required.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A requested budget exceeds the cells available to the scheme.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument is outside its permitted range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integer accounting exceeded 64 bits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrc {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kBadDtype,
  kTruncatedPayload,
  kDimensionOverflow,
  kTrailingBytes,
  kParse,
  kMissingKey,
  kLengthMismatch,
  kNonFinite,
  kBadValue,
};

const char* to_string(FormatErrc code);

/// Raised by readers and writers of the on-disk formats.
class FormatError : public Error {
 public:
  FormatError(FormatErrc code, const std::string& what)
      : Error(std::string(to_string(code)) + ": " + what), code_(code) {}

  FormatErrc code() const noexcept { return code_; }

 private:
  FormatErrc code_;
};

}  // namespace macp
