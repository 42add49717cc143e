#include "signepc/policy.hpp"

#include "signepc/error.hpp"

namespace signepc {

std::string_view GrantReasonName(GrantReason reason) {
  switch (reason) {
    case GrantReason::kRuleAll: return "RuleAll";
    case GrantReason::kRuleLimitedMember: return "RuleLimitedMember";
    case GrantReason::kVisibilityMatch: return "VisibilityMatch";
    case GrantReason::kDeniedHide: return "DeniedHide";
    case GrantReason::kDeniedNotPartner: return "DeniedNotPartner";
    case GrantReason::kDeniedUnknownUser: return "DeniedUnknownUser";
  }
  return "?";
}

namespace {

enum class Direction { kBefore, kAfter, kAny };

CompanySet StreamSet(const PublishRegistry& registry, const EpcCode& epc,
                     const CompanyId& owner, Direction direction) {
  const PublishRecord* own = registry.Find(epc, owner);
  if (own == nullptr) {
    throw Error(ErrorCode::kOwnerNotPublished,
                owner.value() + " has not published " + epc.value());
  }
  CompanySet out;
  for (const auto& rec : registry.Lookup(epc)) {
    if (rec.company == owner) continue;
    bool before = rec.publish_time < own->publish_time;
    if (direction == Direction::kAny || (direction == Direction::kBefore) == before) {
      out.insert(rec.company);
    }
  }
  return out;
}

GrantDecision Deny(GrantReason reason) { return {false, {}, reason}; }

}  // namespace

CompanySet UpstreamSet(const PublishRegistry& registry, const EpcCode& epc,
                       const CompanyId& owner) {
  return StreamSet(registry, epc, owner, Direction::kBefore);
}

CompanySet DownstreamSet(const PublishRegistry& registry, const EpcCode& epc,
                         const CompanyId& owner) {
  return StreamSet(registry, epc, owner, Direction::kAfter);
}

CompanySet WholeStreamSet(const PublishRegistry& registry, const EpcCode& epc,
                          const CompanyId& owner) {
  return StreamSet(registry, epc, owner, Direction::kAny);
}

GrantDecision Evaluate(const PublishRegistry& registry, const AccessPolicy& policy,
                       const CompanyId& owner, const UserId& requester,
                       const EpcCode& epc) {
  if (registry.Find(epc, owner) == nullptr) {
    throw Error(ErrorCode::kOwnerNotPublished,
                owner.value() + " has not published " + epc.value());
  }
  ValidatePolicy(policy);
  switch (policy.rule) {
    case Rule::kAll:
      return {true, policy.scope, GrantReason::kRuleAll};
    case Rule::kHide:
      return Deny(GrantReason::kDeniedHide);
    case Rule::kLimited:
      break;
  }

  auto company = registry.CompanyOf(requester);
  if (!company) return Deny(GrantReason::kDeniedUnknownUser);

  CompanySet partners;
  GrantReason grant_reason = GrantReason::kVisibilityMatch;
  switch (policy.visibility) {
    case Visibility::kUpStream:
      partners = UpstreamSet(registry, epc, owner);
      break;
    case Visibility::kDownStream:
      partners = DownstreamSet(registry, epc, owner);
      break;
    case Visibility::kWholeStream:
    case Visibility::kNotApplicable:
      partners = WholeStreamSet(registry, epc, owner);
      grant_reason = GrantReason::kRuleLimitedMember;
      break;
  }
  if (!partners.contains(*company)) return Deny(GrantReason::kDeniedNotPartner);
  return {true, policy.scope, grant_reason};
}

}  // namespace signepc
