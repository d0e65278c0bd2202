#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace caafc {

// Root of the error hierarchy. Everything the pipeline throws derives from
// this, so callers can catch caafc::Error at stage boundaries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  ~Error() override;
};

// A precondition or internal invariant was violated by the caller.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Configuration file / flag / environment override is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---- prompt templating ----

class MissingPlaceholder : public Error {
 public:
  explicit MissingPlaceholder(const std::string& name)
      : Error("unbound placeholder: {" + name + "}"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnknownPlaceholder : public Error {
 public:
  explicit UnknownPlaceholder(const std::string& name)
      : Error("binding for unknown placeholder: " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// ---- model gateway ----

// A single call attempt failed in a retryable way (connection refused,
// timeout, 5xx, malformed backend payload). Retried up to the configured cap.
class TransportError : public Error {
 public:
  using Error::Error;
};

// No backend registered for the model, or retries were exhausted.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// The run-level model-call budget was exceeded.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(int cap, int attempted)
      : Error("model-call budget exceeded: cap " + std::to_string(cap) +
              ", attempted call " + std::to_string(attempted)),
        cap_(cap),
        attempted_(attempted) {}
  int cap() const noexcept { return cap_; }

 private:
  int cap_;
  int attempted_;
};

// ---- structured output ----

// No parseable JSON value in the raw model output.
class NoJsonFound : public Error {
 public:
  using Error::Error;
};

// JSON parsed but does not satisfy the named schema; carries the offending
// field for repair prompts and diagnostics.
class SchemaViolation : public Error {
 public:
  SchemaViolation(const std::string& schema, const std::string& field,
                  const std::string& detail)
      : Error("schema '" + schema + "' violated at '" + field + "': " + detail),
        schema_(schema),
        field_(field) {}
  const std::string& schema() const noexcept { return schema_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string schema_;
  std::string field_;
};

// Extraction still failing after the repair budget was spent; keeps every raw
// attempt for the transcript.
class StructuredOutputFailure : public Error {
 public:
  explicit StructuredOutputFailure(std::vector<std::string> attempts)
      : Error("structured output failed after " +
              std::to_string(attempts.size()) + " attempt(s)"),
        attempts_(std::move(attempts)) {}
  const std::vector<std::string>& attempts() const noexcept {
    return attempts_;
  }

 private:
  std::vector<std::string> attempts_;
};

// ---- segmentation ----

// Model returned an empty sub-claim list for a non-empty input.
class EmptyExtraction : public Error {
 public:
  using Error::Error;
};

class EmptyDialogue : public Error {
 public:
  using Error::Error;
};

// ---- retrieval ----

class RetrievalUnavailable : public Error {
 public:
  using Error::Error;
};

// Retrieval returned no narrative text.
class EmptyNarrative : public Error {
 public:
  using Error::Error;
};

// ---- fact-checking ----

// Per-subclaim verdict count still wrong after the targeted re-prompt.
class VerdictCountMismatch : public Error {
 public:
  VerdictCountMismatch(std::size_t expected, std::size_t got)
      : Error("verdict count mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// ---- datasets ----

class UnknownRawLabel : public Error {
 public:
  UnknownRawLabel(const std::string& record_id, const std::string& raw)
      : Error("record '" + record_id + "': unknown gold label '" + raw + "'"),
        record_id_(record_id),
        raw_(raw) {}
  const std::string& record_id() const noexcept { return record_id_; }
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string record_id_;
  std::string raw_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& where, std::size_t line,
             const std::string& detail)
      : Error(where + ":" + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---- metrics ----

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

// ---- pipeline ----

// Wraps an inner failure with the stage where it happened.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& detail)
      : Error("[" + stage + "] " + detail), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace caafc
