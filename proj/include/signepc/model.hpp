#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace signepc {

// Integer UTC seconds. No time zones anywhere.
using Timestamp = std::int64_t;

// Attribute-name set; empty means "all attributes".
using AttributeSet = std::set<std::string>;

/// Normalized URN-style EPC, e.g. `urn:epc:id:sgtin:0614141.112345.400`.
/// Only constructible through ParseEpc.
class EpcCode {
 public:
  EpcCode() = default;
  const std::string& value() const noexcept { return value_; }
  auto operator<=>(const EpcCode&) const = default;

 private:
  explicit EpcCode(std::string v) : value_(std::move(v)) {}
  friend EpcCode ParseEpc(std::string_view raw);
  std::string value_;
};

/// Lowercases the `urn:epc:id:sgtin:` prefix and checks for three dot-separated
/// numeric segments. Throws Error(kMalformedEpc).
EpcCode ParseEpc(std::string_view raw);

/// Authenticated principal identifier. Non-empty, no control characters.
class UserId {
 public:
  UserId() = default;
  explicit UserId(std::string v);
  const std::string& value() const noexcept { return value_; }
  auto operator<=>(const UserId&) const = default;

 private:
  std::string value_;
};

/// Supply-chain company identifier. Non-empty.
class CompanyId {
 public:
  CompanyId() = default;
  explicit CompanyId(std::string v);
  const std::string& value() const noexcept { return value_; }
  auto operator<=>(const CompanyId&) const = default;

 private:
  std::string value_;
};

enum class Rule { kAll, kLimited, kHide };
enum class Visibility { kUpStream, kDownStream, kWholeStream, kNotApplicable };

/// Per-(company, EPC) access policy. Visibility refines only the Limited rule.
struct AccessPolicy {
  Rule rule = Rule::kAll;
  Visibility visibility = Visibility::kNotApplicable;
  AttributeSet scope;

  bool operator==(const AccessPolicy&) const = default;
};

/// Throws Error(kInvalidPolicy) unless visibility is NotApplicable exactly
/// when the rule is All or Hide.
void ValidatePolicy(const AccessPolicy& policy);

AccessPolicy MakeAllPolicy(AttributeSet scope = {});
AccessPolicy MakeHidePolicy();
AccessPolicy MakeLimitedPolicy(Visibility visibility, AttributeSet scope = {});

std::string_view RuleName(Rule rule);
std::string_view VisibilityName(Visibility visibility);
// Accept the scenario-file literals: all|limited|hide, up|down|whole.
Rule ParseRule(std::string_view text);
Visibility ParseVisibility(std::string_view text);

struct EventRecord {
  EpcCode epc;
  CompanyId company;
  Timestamp event_time = 0;
  std::string location;
  std::string business_step;
  std::map<std::string, std::string> attributes;

  bool operator==(const EventRecord&) const = default;
};

struct PublishRecord {
  EpcCode epc;
  CompanyId company;
  Timestamp publish_time = 0;
  std::string epcis_url;
  AccessPolicy policy;

  bool operator==(const PublishRecord&) const = default;
};

}  // namespace signepc
