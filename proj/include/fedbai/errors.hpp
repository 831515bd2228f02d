#pragma once

#include <stdexcept>
#include <string>

namespace fedbai {

enum class ErrorCode {
  InvalidInstance,
  ArmNotAccessible,
  UndefinedIndex,
  OutOfRange,
  PreconditionViolated,
  EpochCapExceeded,
  NonPositiveAlpha,
  ValueOutOfRange,
  EmptyActiveSet,
  RoundCapExceeded,
  NoMajority,
  TooFewValues,
  GroupNotInGraph,
  GraphTooLarge,
  IncompleteVectors,
  TickCapExceeded,
  OutOfDomain,
  InsufficientTrace,
  InvalidConfig,
  Io,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library. `client()` is -1 unless the error is
// attributable to a single client (e.g. a Phase-I epoch cap hit).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int client = -1);

  ErrorCode code() const noexcept { return code_; }
  int client() const noexcept { return client_; }

 private:
  ErrorCode code_;
  int client_;
};

}  // namespace fedbai
