#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace crux {

enum class Errc {
  InvalidArgument,
  // answers and metrics
  EmptyAnswer,
  UnmappableCharacter,
  LengthMismatch,
  EmptyInput,
  // dataset
  FileNotFound,
  MalformedHeader,
  TooFewRecords,
  // llm gateway
  UnknownTemplate,
  UnboundSlot,
  ProviderUnavailable,
  RateLimited,
  AuthMissing,
  ProviderRejected,
  // pipelines
  ParseFailure,
  EmptyDocument,
  // schema engine
  AnswerTooLong,
  AnswerTooShort,
  IllegalPlacement,
  TooMany,
  NoSolution,
  PoolTooSmall,
  // service
  MissingClue,
  UnknownSession,
  UnknownPair,
  UnknownPuzzle,
  InvalidStatusTransition,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyAnswer: return "EmptyAnswer";
    case Errc::UnmappableCharacter: return "UnmappableCharacter";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TooFewRecords: return "TooFewRecords";
    case Errc::UnknownTemplate: return "UnknownTemplate";
    case Errc::UnboundSlot: return "UnboundSlot";
    case Errc::ProviderUnavailable: return "ProviderUnavailable";
    case Errc::RateLimited: return "RateLimited";
    case Errc::AuthMissing: return "AuthMissing";
    case Errc::ProviderRejected: return "ProviderRejected";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::AnswerTooLong: return "AnswerTooLong";
    case Errc::AnswerTooShort: return "AnswerTooShort";
    case Errc::IllegalPlacement: return "IllegalPlacement";
    case Errc::TooMany: return "TooMany";
    case Errc::NoSolution: return "NoSolution";
    case Errc::PoolTooSmall: return "PoolTooSmall";
    case Errc::MissingClue: return "MissingClue";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::UnknownPair: return "UnknownPair";
    case Errc::UnknownPuzzle: return "UnknownPuzzle";
    case Errc::InvalidStatusTransition: return "InvalidStatusTransition";
  }
  return "Unknown";
}

/// Every failure raised by the library. `payload()` carries the raw material
/// needed for triage, e.g. the unparseable model response on ParseFailure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string payload = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message),
        payload_(std::move(payload)) {}

  Errc code() const noexcept { return code_; }
  /// The message without the error-code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }
  const std::string& payload() const noexcept { return payload_; }

 private:
  Errc code_;
  std::string message_;
  std::string payload_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message, std::string payload = {}) {
  throw Error(code, message, std::move(payload));
}

}  // namespace crux
