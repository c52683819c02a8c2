#pragma once

#include <stdexcept>
#include <string>

namespace hdmr {

// Broad failure classes; the CLI maps each to its own exit code.
enum class ErrorKind {
  kUsage,      // invalid argument or configuration
  kIo,         // file missing, unreadable, malformed
  kNumeric,    // factorization failure, undefined statistic
  kDimension,  // shape or column-count mismatch
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kUsage, what) {}
};

class UnsupportedDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidOrder : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidHyperparameter : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

// Malformed dataset or model content. `section` names the failing part of a
// model file (empty for datasets).
class ParseError : public IoError {
 public:
  ParseError(std::string section, const std::string& what)
      : IoError(what), section_(std::move(section)) {}

  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

class IllConditionedGram : public NumericError {
 public:
  IllConditionedGram(double final_jitter, const std::string& what)
      : NumericError(what), final_jitter_(final_jitter) {}

  double final_jitter() const noexcept { return final_jitter_; }

 private:
  double final_jitter_;
};

}  // namespace hdmr
