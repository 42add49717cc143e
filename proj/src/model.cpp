#include "signepc/model.hpp"

#include <algorithm>
#include <cctype>

#include "signepc/error.hpp"

namespace signepc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedEpc: return "MalformedEpc";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTimestampCollision: return "TimestampCollision";
    case ErrorCode::kOwnerNotPublished: return "OwnerNotPublished";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kBadSignature: return "BadSignature";
    case ErrorCode::kUnknownKeyId: return "UnknownKeyId";
    case ErrorCode::kWeakKeyRequested: return "WeakKeyRequested";
    case ErrorCode::kChallengeConsumed: return "ChallengeConsumed";
    case ErrorCode::kChallengeExpired: return "ChallengeExpired";
    case ErrorCode::kUnknownEpc: return "UnknownEpc";
    case ErrorCode::kNoGrant: return "NoGrant";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

constexpr std::string_view kEpcPrefix = "urn:epc:id:sgtin:";

bool IsDigits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

EpcCode ParseEpc(std::string_view raw) {
  if (raw.size() <= kEpcPrefix.size()) {
    throw Error(ErrorCode::kMalformedEpc, "too short: '" + std::string(raw) + "'");
  }
  std::string prefix(raw.substr(0, kEpcPrefix.size()));
  std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (prefix != kEpcPrefix) {
    throw Error(ErrorCode::kMalformedEpc, "bad prefix: '" + std::string(raw) + "'");
  }
  std::string_view body = raw.substr(kEpcPrefix.size());
  int segments = 0;
  while (true) {
    auto dot = body.find('.');
    if (!IsDigits(body.substr(0, dot))) {
      throw Error(ErrorCode::kMalformedEpc, "bad segment in '" + std::string(raw) + "'");
    }
    ++segments;
    if (dot == std::string_view::npos) break;
    body.remove_prefix(dot + 1);
  }
  if (segments != 3) {
    throw Error(ErrorCode::kMalformedEpc,
                "expected 3 segments, got " + std::to_string(segments));
  }
  return EpcCode(prefix + std::string(raw.substr(kEpcPrefix.size())));
}

UserId::UserId(std::string v) : value_(std::move(v)) {
  if (value_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty user id");
  for (unsigned char c : value_) {
    if (std::iscntrl(c)) {
      throw Error(ErrorCode::kInvalidArgument, "control character in user id");
    }
  }
}

CompanyId::CompanyId(std::string v) : value_(std::move(v)) {
  if (value_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty company id");
}

void ValidatePolicy(const AccessPolicy& policy) {
  bool needs_visibility = policy.rule == Rule::kLimited;
  bool has_visibility = policy.visibility != Visibility::kNotApplicable;
  if (needs_visibility != has_visibility) {
    throw Error(ErrorCode::kInvalidPolicy,
                std::string("rule ") + std::string(RuleName(policy.rule)) +
                    " with visibility " + std::string(VisibilityName(policy.visibility)));
  }
}

AccessPolicy MakeAllPolicy(AttributeSet scope) {
  return {Rule::kAll, Visibility::kNotApplicable, std::move(scope)};
}

AccessPolicy MakeHidePolicy() { return {Rule::kHide, Visibility::kNotApplicable, {}}; }

AccessPolicy MakeLimitedPolicy(Visibility visibility, AttributeSet scope) {
  AccessPolicy p{Rule::kLimited, visibility, std::move(scope)};
  ValidatePolicy(p);
  return p;
}

std::string_view RuleName(Rule rule) {
  switch (rule) {
    case Rule::kAll: return "all";
    case Rule::kLimited: return "limited";
    case Rule::kHide: return "hide";
  }
  return "?";
}

std::string_view VisibilityName(Visibility visibility) {
  switch (visibility) {
    case Visibility::kUpStream: return "up";
    case Visibility::kDownStream: return "down";
    case Visibility::kWholeStream: return "whole";
    case Visibility::kNotApplicable: return "n/a";
  }
  return "?";
}

Rule ParseRule(std::string_view text) {
  if (text == "all") return Rule::kAll;
  if (text == "limited") return Rule::kLimited;
  if (text == "hide") return Rule::kHide;
  throw Error(ErrorCode::kInvalidPolicy, "unknown rule '" + std::string(text) + "'");
}

Visibility ParseVisibility(std::string_view text) {
  if (text == "up") return Visibility::kUpStream;
  if (text == "down") return Visibility::kDownStream;
  if (text == "whole") return Visibility::kWholeStream;
  throw Error(ErrorCode::kInvalidPolicy, "unknown visibility '" + std::string(text) + "'");
}

}  // namespace signepc
