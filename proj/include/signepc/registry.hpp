#pragma once

#include <map>
#include <optional>
#include <vector>

#include "signepc/model.hpp"

namespace signepc {

/// Which companies published which EPC, when, and under what policy; plus the
/// binding of principals to companies. Value type, read-mostly.
class PublishRegistry {
 public:
  /// Inserts rec, replacing any prior record for the same (epc, company).
  /// Throws kTimestampCollision if another company already holds the same
  /// publish_time for this EPC, kInvalidArgument/kInvalidPolicy on bad input.
  void Publish(PublishRecord rec);

  /// Records for epc in ascending publish_time; empty when unknown.
  std::vector<PublishRecord> Lookup(const EpcCode& epc) const;

  const PublishRecord* Find(const EpcCode& epc, const CompanyId& company) const;

  void BindUser(const UserId& user, const CompanyId& company);
  std::optional<CompanyId> CompanyOf(const UserId& user) const;

  std::vector<EpcCode> Epcs() const;
  const std::map<UserId, CompanyId>& user_bindings() const { return user_company_; }
  std::size_t size() const;

 private:
  // Each vector kept sorted by publish_time.
  std::map<EpcCode, std::vector<PublishRecord>> records_;
  std::map<UserId, CompanyId> user_company_;
};

}  // namespace signepc
