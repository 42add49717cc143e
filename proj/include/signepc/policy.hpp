#pragma once

#include <set>

#include "signepc/model.hpp"
#include "signepc/registry.hpp"

namespace signepc {

using CompanySet = std::set<CompanyId>;

enum class GrantReason {
  kRuleAll,
  kRuleLimitedMember,
  kVisibilityMatch,
  kDeniedHide,
  kDeniedNotPartner,
  kDeniedUnknownUser,
};

std::string_view GrantReasonName(GrantReason reason);

struct GrantDecision {
  bool granted = false;
  AttributeSet scope;  // empty when denied
  GrantReason reason = GrantReason::kDeniedNotPartner;

  bool operator==(const GrantDecision&) const = default;
};

// Stream sets are computed from publish order for one EPC. Each throws
// kOwnerNotPublished when owner has no record for epc.

/// Companies that published epc strictly before owner.
CompanySet UpstreamSet(const PublishRegistry& registry, const EpcCode& epc,
                       const CompanyId& owner);
/// Companies that published epc strictly after owner.
CompanySet DownstreamSet(const PublishRegistry& registry, const EpcCode& epc,
                         const CompanyId& owner);
/// Every other company that published epc.
CompanySet WholeStreamSet(const PublishRegistry& registry, const EpcCode& epc,
                          const CompanyId& owner);

/// Decides whether requester may read owner's events for epc under policy.
///
/// All grants everyone and Hide denies everyone. Limited grants only users
/// bound to a company in the owner's stream set selected by the visibility
/// attribute. The owner's own users are not partners and are denied here;
/// their implicit access is handled outside the policy engine.
GrantDecision Evaluate(const PublishRegistry& registry, const AccessPolicy& policy,
                       const CompanyId& owner, const UserId& requester,
                       const EpcCode& epc);

}  // namespace signepc
