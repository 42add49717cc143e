#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "signepc/nodes.hpp"

namespace signepc {

enum class ArrivalProcess { kPoisson, kFixedInterval };

struct CompanySpec {
  CompanyId id;
  std::string url;
};

struct UserSpec {
  UserId id;
  std::optional<CompanyId> company;  // nullopt = external user
  double rate = 0;                   // transactions per simulated second
  std::vector<EpcCode> epcs;         // uniform choice; empty = every published EPC
};

struct AttackSpec {
  AttackKind kind = AttackKind::kReplayAsSelf;
  UserId attacker;
  UserId victim;
  EpcCode epc;
  Micros at = 0;
};

struct LatencySpec {
  Micros base = 10000;  // one-way
  Micros jitter = 0;    // uniform extra in [0, jitter], seeded per link
};

struct KeySpec {
  int bits = kMinModulusBits;
  std::uint64_t seed = 1;
  std::optional<Timestamp> valid_until;  // default: start_time + 1 year
};

struct ScenarioConfig {
  std::string name = "scenario";
  AccessModel model = AccessModel::kSignEpc;
  CryptoMode crypto = CryptoMode::kModeled;
  ExpiryWindow window;
  ServiceTimes service_times;
  LatencySpec latency;
  ArrivalProcess arrivals = ArrivalProcess::kPoisson;
  Micros duration = 10'000'000;
  bool drain = true;  // keep running after duration until all work completes
  Micros queue_sample_interval = 0;  // 0 = duration / 100
  std::uint64_t seed = 1;
  int k = 1;  // EPCIS contacted per transaction
  Timestamp start_time = 0;
  KeySpec key;

  std::vector<CompanySpec> companies;
  std::vector<PublishRecord> publishes;
  std::vector<UserSpec> users;
  std::vector<EventRecord> events;  // synthesized per publish when empty
  std::vector<AttackSpec> attacks;
};

/// Throws Error(kConfigInvalid) describing the first violated constraint.
void ValidateScenario(const ScenarioConfig& cfg);

PublishRegistry BuildRegistry(const ScenarioConfig& cfg);

/// The configured events, or one synthetic event per publish record.
std::vector<EventRecord> ScenarioEvents(const ScenarioConfig& cfg);

/// Parses and validates a `format: 1` scenario document. Errors are
/// kConfigInvalid with a "line N:" prefix pointing at the offending value.
ScenarioConfig ParseScenario(std::string_view text);
ScenarioConfig LoadScenarioFile(const std::string& path);

nlohmann::json ScenarioToJson(const ScenarioConfig& cfg);

}  // namespace signepc
