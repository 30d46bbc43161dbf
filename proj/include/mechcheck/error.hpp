#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mechcheck {

enum class ErrorCode {
  // instance text / model
  Syntax,
  DuplicateItem,
  UnknownItemInBundle,
  NegativeAmount,
  EmptyBundle,
  MechanismArityMismatch,
  NoItems,
  NoBids,
  TooManyItems,
  DuplicateValuation,
  UnknownAgent,
  // windeterm
  InfeasibleAllocation,
  // properties
  GridTooLarge,
  InvalidGrid,
  MissingValuation,
  IncompleteValuation,
  UnsupportedDomain,
  // certify
  UnsupportedProperty,
  MalformedCertificate,
  // io
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::DuplicateItem: return "DuplicateItem";
    case ErrorCode::UnknownItemInBundle: return "UnknownItemInBundle";
    case ErrorCode::NegativeAmount: return "NegativeAmount";
    case ErrorCode::EmptyBundle: return "EmptyBundle";
    case ErrorCode::MechanismArityMismatch: return "MechanismArityMismatch";
    case ErrorCode::NoItems: return "NoItems";
    case ErrorCode::NoBids: return "NoBids";
    case ErrorCode::TooManyItems: return "TooManyItems";
    case ErrorCode::DuplicateValuation: return "DuplicateValuation";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::InfeasibleAllocation: return "InfeasibleAllocation";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::MissingValuation: return "MissingValuation";
    case ErrorCode::IncompleteValuation: return "IncompleteValuation";
    case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::UnsupportedProperty: return "UnsupportedProperty";
    case ErrorCode::MalformedCertificate: return "MalformedCertificate";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

/// Error raised by the auction-side modules. The code is stable and meant to
/// be matched on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mechcheck
