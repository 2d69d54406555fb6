#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viscom {

enum class ErrorKind {
  MalformedRecord,
  DanglingReference,
  EmptyCorpus,
  EmptyKb,
  InvalidCategory,
  EmptyPhrase,
  NotAnNP,
  IoFailure,
  InvalidConfig,
  InvariantViolation,
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::EmptyKb: return "EmptyKb";
    case ErrorKind::InvalidCategory: return "InvalidCategory";
    case ErrorKind::EmptyPhrase: return "EmptyPhrase";
    case ErrorKind::NotAnNP: return "NotAnNP";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

// Every failure the library reports. `line` is 1-based and 0 when the error
// is not tied to an input line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(kind, message, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

  // Input problems map to exit code 1, broken internal invariants to 2.
  bool is_input_error() const noexcept { return kind_ != ErrorKind::InvariantViolation; }

 private:
  static std::string format(ErrorKind kind, const std::string& message, std::size_t line) {
    std::string out(error_kind_name(kind));
    if (line != 0) out += " at line " + std::to_string(line);
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace viscom
