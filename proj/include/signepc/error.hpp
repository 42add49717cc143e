#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace signepc {

enum class ErrorCode {
  kMalformedEpc,
  kInvalidArgument,
  kTimestampCollision,
  kOwnerNotPublished,
  kInvalidPolicy,
  kBadSignature,
  kUnknownKeyId,
  kWeakKeyRequested,
  kChallengeConsumed,
  kChallengeExpired,
  kUnknownEpc,
  kNoGrant,
  kConfigInvalid,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace signepc
