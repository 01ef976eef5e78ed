#pragma once

#include <stdexcept>
#include <string>

namespace aicrowd {

enum class ErrorCode {
  UnknownLabel,
  DuplicateId,
  MissingColumn,
  EmptyFile,
  EmptyAfterCleaning,
  MissingStratumKey,
  SampleTooLarge,
  PlaceholderMissing,
  InsufficientPairs,
  NoValidVotes,
  EmptyTable,
  LengthMismatch,
  EmptyInput,
  MissingGold,
  NoValidCells,
  DegenerateInput,
  GateInsufficient,
  ConfigError,
  IoError,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aicrowd
