#include "signepc/registry.hpp"

#include <algorithm>

#include "signepc/error.hpp"

namespace signepc {

void PublishRegistry::Publish(PublishRecord rec) {
  if (rec.epc.value().empty()) throw Error(ErrorCode::kInvalidArgument, "record without EPC");
  if (rec.company.value().empty()) {
    throw Error(ErrorCode::kInvalidArgument, "record without company");
  }
  if (rec.epcis_url.empty()) throw Error(ErrorCode::kInvalidArgument, "record without URL");
  ValidatePolicy(rec.policy);

  auto& list = records_[rec.epc];
  for (const auto& existing : list) {
    if (existing.company != rec.company && existing.publish_time == rec.publish_time) {
      throw Error(ErrorCode::kTimestampCollision,
                  rec.company.value() + " and " + existing.company.value() +
                      " both published " + rec.epc.value() + " at " +
                      std::to_string(rec.publish_time));
    }
  }
  std::erase_if(list, [&](const PublishRecord& r) { return r.company == rec.company; });
  auto pos = std::upper_bound(
      list.begin(), list.end(), rec.publish_time,
      [](Timestamp t, const PublishRecord& r) { return t < r.publish_time; });
  list.insert(pos, std::move(rec));
}

std::vector<PublishRecord> PublishRegistry::Lookup(const EpcCode& epc) const {
  auto it = records_.find(epc);
  if (it == records_.end()) return {};
  return it->second;
}

const PublishRecord* PublishRegistry::Find(const EpcCode& epc,
                                           const CompanyId& company) const {
  auto it = records_.find(epc);
  if (it == records_.end()) return nullptr;
  for (const auto& r : it->second) {
    if (r.company == company) return &r;
  }
  return nullptr;
}

void PublishRegistry::BindUser(const UserId& user, const CompanyId& company) {
  user_company_[user] = company;
}

std::optional<CompanyId> PublishRegistry::CompanyOf(const UserId& user) const {
  auto it = user_company_.find(user);
  if (it == user_company_.end()) return std::nullopt;
  return it->second;
}

std::vector<EpcCode> PublishRegistry::Epcs() const {
  std::vector<EpcCode> out;
  out.reserve(records_.size());
  for (const auto& [epc, list] : records_) {
    if (!list.empty()) out.push_back(epc);
  }
  return out;
}

std::size_t PublishRegistry::size() const {
  std::size_t n = 0;
  for (const auto& [epc, list] : records_) n += list.size();
  return n;
}

}  // namespace signepc
