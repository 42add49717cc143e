#pragma once

#include <map>
#include <optional>
#include <string>

#include "signepc/pki.hpp"
#include "signepc/scenario.hpp"

namespace signepc {

inline DenyReason ExpectedDenyReason(AttackKind kind) {
  switch (kind) {
    case AttackKind::kTamperRights: return DenyReason::kDigestMismatch;
    case AttackKind::kReplayAsSelf: return DenyReason::kUseridMismatch;
    case AttackKind::kReuseExpired: return DenyReason::kDigestMismatch;
    case AttackKind::kForgeSignature: return DenyReason::kSignatureInvalid;
  }
  return DenyReason::kSignatureInvalid;
}

struct AttackTally {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::uint64_t expected_reason = 0;  // rejected with the documented reason
  std::map<std::string, std::uint64_t> rejected;
};

struct AttackSuiteResult {
  std::uint64_t trials = 0;
  std::uint64_t honest_accepted = 0;
  std::map<std::string, std::uint64_t> honest_rejected;
  std::map<AttackKind, AttackTally> attacks;

  bool all_attacks_rejected() const;
  bool all_honest_accepted() const { return honest_accepted == trials; }
  bool passed() const { return all_attacks_rejected() && all_honest_accepted(); }
};

struct AttackSuiteOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  // EPCIS trusts this key instead of the EPCDS key (negative control).
  std::optional<TrustedKey> verifier_override;
};

/// Runs every attack kind against freshly captured honest discovery
/// responses, alongside an honest control for each capture. Handlers are
/// invoked directly; the scenario must use the sign_epc model. Always runs
/// real RSA regardless of the scenario's crypto mode.
AttackSuiteResult RunAttackSuite(const ScenarioConfig& scenario, const AttackSuiteOptions& options);

}  // namespace signepc
