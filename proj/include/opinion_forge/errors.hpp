#pragma once

#include <stdexcept>
#include <string>

namespace opinion_forge {

// Base class for every error this library raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A term surface that is empty after canonicalization, or an implicit term
// where only explicit ones are allowed.
struct InvalidTerm : Error {
  using Error::Error;
};

// Structurally malformed input (dataset line, run file, JSON payload).
struct ParseError : Error {
  explicit ParseError(const std::string& msg, size_t line_no = 0)
      : Error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg),
        line(line_no) {}
  size_t line = 0;
};

// Token span out of range, non-contiguous, or otherwise unusable.
struct SpanError : Error {
  using Error::Error;
};

// Unknown polarity tag, category, or enumeration value.
struct LabelError : Error {
  using Error::Error;
};

// Dev split too small to partition.
struct TooSmall : Error {
  using Error::Error;
};

// Demo sample request exceeds the ICL pool.
struct InsufficientPool : Error {
  using Error::Error;
};

// Every candidate ICL run failed to parse; no k can be selected.
struct SelectionError : Error {
  using Error::Error;
};

// Network-level failure (connect, read, DNS).
struct TransportError : Error {
  using Error::Error;
};

// Request exceeded the configured timeout.
struct TimeoutError : TransportError {
  using TransportError::TransportError;
};

// Endpoint answered with a non-success HTTP status.
struct ApiError : Error {
  ApiError(int status_code, std::string response_body)
      : Error("api error: status " + std::to_string(status_code)),
        status(status_code),
        body(std::move(response_body)) {}
  int status;
  std::string body;
};

// Unreadable or inconsistent cache entry.
struct CacheError : Error {
  using Error::Error;
};

// Artifacts disagree: duplicate ids, coverage mismatch, broken hash link.
struct IntegrityError : Error {
  using Error::Error;
};

// API misuse: invalid projection/task pair, wrong opinion kind, and the like.
struct UsageError : Error {
  using Error::Error;
};

// Krippendorff alpha asked for with no unit carrying two or more labels.
struct UndefinedAgreement : Error {
  using Error::Error;
};

// Bad or missing configuration; maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// A pipeline stage was invoked before its upstream artifact exists.
struct MissingArtifact : ConfigError {
  using ConfigError::ConfigError;
};

}  // namespace opinion_forge
