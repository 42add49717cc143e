#include "signepc/attack_suite.hpp"

#include "signepc/error.hpp"
#include "signepc/policy.hpp"

namespace signepc {

bool AttackSuiteResult::all_attacks_rejected() const {
  for (const auto& [kind, tally] : attacks) {
    if (tally.accepted != 0) return false;
  }
  return true;
}

namespace {

struct Capture {
  UserId user;
  EpcCode epc;
};

// Every (user, epc) pair for which EPCDS grants at least one company.
std::vector<Capture> GrantablePairs(const PublishRegistry& reg, const ScenarioConfig& cfg) {
  std::vector<Capture> out;
  for (const auto& u : cfg.users) {
    for (const auto& epc : reg.Epcs()) {
      for (const auto& rec : reg.Lookup(epc)) {
        if (Evaluate(reg, rec.policy, rec.company, u.id, epc).granted) {
          out.push_back({u.id, epc});
          break;
        }
      }
    }
  }
  return out;
}

DenyReason Outcome(const std::vector<Message>& out) {
  if (out.size() == 1) {
    if (const auto* err = std::get_if<ErrorResponse>(&out.front().payload)) return err->reason;
  }
  throw Error(ErrorCode::kInvalidArgument, "accepted");
}

}  // namespace

AttackSuiteResult RunAttackSuite(const ScenarioConfig& scenario, const AttackSuiteOptions& options) {
  if (scenario.model != AccessModel::kSignEpc) {
    throw Error(ErrorCode::kConfigInvalid, "attack suite needs a sign_epc scenario");
  }
  ScenarioConfig cfg = scenario;
  cfg.crypto = CryptoMode::kReal;
  ValidateScenario(cfg);

  AttackSuiteResult result;
  for (auto kind : kAllAttacks) result.attacks[kind];
  if (options.trials <= 0) return result;

  const NodeConfig node_cfg{AccessModel::kSignEpc, cfg.window, cfg.service_times, CryptoMode::kReal};
  EpcdsState epcds;
  epcds.registry = BuildRegistry(cfg);
  epcds.config = node_cfg;
  KeyGenOptions key_opts;
  key_opts.modulus_bits = cfg.key.bits;
  key_opts.created_at = cfg.start_time;
  key_opts.valid_until = cfg.key.valid_until.value_or(cfg.start_time + 365 * 86400);
  key_opts.seed = cfg.key.seed;
  epcds.key = GenerateKeyPair(key_opts);

  KeyGenOptions forger_opts = key_opts;
  forger_opts.seed = options.seed ^ 0xf0f6e5ULL;
  const SigningKey forger = GenerateKeyPair(forger_opts).private_key;

  const TrustedKey verifier =
      options.verifier_override.value_or(TrustedKey{epcds.key->public_key, epcds.key->valid_until});
  std::map<CompanyId, EpcisState> epcis;
  for (const auto& c : cfg.companies) {
    EpcisState st;
    st.id = EpcisNodeId(c.id);
    st.company = c.id;
    st.url = c.url;
    st.config = node_cfg;
    st.trusted.Add(verifier.key, verifier.valid_until);
    epcis.emplace(c.id, std::move(st));
  }
  for (const auto& ev : ScenarioEvents(cfg)) {
    if (auto it = epcis.find(ev.company); it != epcis.end()) it->second.events.push_back(ev);
  }

  const auto pairs = GrantablePairs(epcds.registry, cfg);
  if (pairs.empty()) throw Error(ErrorCode::kConfigInvalid, "no user is granted any EPC");

  Drbg rng(options.seed);
  const std::int64_t w = cfg.window.window_seconds();
  // Stay clear of key expiry so only the token logic is under test.
  const Timestamp horizon = std::max<Timestamp>(1, std::min<Timestamp>(30 * 86400, key_opts.valid_until - cfg.start_time - 2 * w));

  for (int trial = 0; trial < options.trials; ++trial) {
    ++result.trials;
    const Capture& cap = pairs[rng() % pairs.size()];
    const Timestamp issued = cfg.start_time + static_cast<Timestamp>(rng() % static_cast<std::uint64_t>(horizon));
    const Timestamp window_end = (issued / w + 1) * w - 1;
    const Timestamp checked = issued + static_cast<Timestamp>(rng() % static_cast<std::uint64_t>(window_end - issued + 1));
    const Timestamp next_window = window_end + 1 + static_cast<Timestamp>(rng() % static_cast<std::uint64_t>(w));

    auto ds = EpcdsHandleQuery(epcds, UserQueryDs{static_cast<std::uint64_t>(trial), cap.user, cap.epc}, issued);
    const auto& captured = std::get<DsResponse>(ds);
    const Grant& grant = captured.grants.front();
    EpcisState& target = epcis.at(grant.company);

    Message honest{UserNodeId(cap.user), target.id,
                   UserQueryIs{captured.txn, cap.user, cap.epc, grant.rights, grant.tag}};
    auto honest_out = EpcisHandleQuery(target, honest, checked);
    if (honest_out.size() == 1 && honest_out.front().kind() == MessageKind::kIsResponse) {
      ++result.honest_accepted;
    } else {
      ++result.honest_rejected[std::string(DenyReasonName(Outcome(honest_out)))];
    }

    // The attacker is another authenticated principal.
    UserId attacker("mallory-" + std::to_string(trial));
    AttackContext ctx{cfg.window, &forger, &rng};
    for (auto kind : kAllAttacks) {
      const Timestamp at = kind == AttackKind::kReuseExpired ? next_window : checked;
      Message m = AttackerAction(kind, captured, attacker, at, ctx);
      auto out = EpcisHandleQuery(epcis.at(grant.company), m, at);
      AttackTally& tally = result.attacks[kind];
      ++tally.trials;
      if (out.size() == 1 && out.front().kind() == MessageKind::kIsResponse) {
        ++tally.accepted;
        continue;
      }
      DenyReason reason = Outcome(out);
      ++tally.rejected[std::string(DenyReasonName(reason))];
      if (reason == ExpectedDenyReason(kind)) ++tally.expected_reason;
    }
  }
  return result;
}

}  // namespace signepc
