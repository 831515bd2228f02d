#include "fedbai/errors.hpp"

namespace fedbai {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::ArmNotAccessible: return "ArmNotAccessible";
    case ErrorCode::UndefinedIndex: return "UndefinedIndex";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EpochCapExceeded: return "EpochCapExceeded";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::EmptyActiveSet: return "EmptyActiveSet";
    case ErrorCode::RoundCapExceeded: return "RoundCapExceeded";
    case ErrorCode::NoMajority: return "NoMajority";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::GroupNotInGraph: return "GroupNotInGraph";
    case ErrorCode::GraphTooLarge: return "GraphTooLarge";
    case ErrorCode::IncompleteVectors: return "IncompleteVectors";
    case ErrorCode::TickCapExceeded: return "TickCapExceeded";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InsufficientTrace: return "InsufficientTrace";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, int client)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      client_(client) {}

}  // namespace fedbai
