#pragma once

#include <stdexcept>
#include <string>

namespace tqa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV ingestion failure (unreadable file, ragged rows, missing header).
class CsvError : public Error {
 public:
  using Error::Error;
};

/// Raised by the table function library (missing column, non-numeric
/// column, empty subsets, ...).
class TableError : public Error {
 public:
  using Error::Error;
};

/// LLM backend failure. `status` is the HTTP status when one was received,
/// 0 for transport-level failures and mock misses.
class LlmError : public Error {
 public:
  explicit LlmError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// An LLM reply could not be parsed into the structure a stage expects.
class ReplyParseError : public Error {
 public:
  using Error::Error;
};

/// A runtime value cannot be coerced into the requested answer type.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tqa
