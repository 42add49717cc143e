#include "signepc/nodes.hpp"

#include <algorithm>

#include "signepc/error.hpp"

namespace signepc {

std::string_view AccessModelName(AccessModel model) {
  switch (model) {
    case AccessModel::kDirectoryOpen: return "directory_open";
    case AccessModel::kSecureEpcds: return "secure_epcds";
    case AccessModel::kSignEpc: return "sign_epc";
  }
  return "?";
}

AccessModel ParseAccessModel(std::string_view text) {
  if (text == "directory_open") return AccessModel::kDirectoryOpen;
  if (text == "secure_epcds") return AccessModel::kSecureEpcds;
  if (text == "sign_epc") return AccessModel::kSignEpc;
  throw Error(ErrorCode::kConfigInvalid, "unknown model '" + std::string(text) + "'");
}

std::string_view DenyReasonName(DenyReason reason) {
  switch (reason) {
    case DenyReason::kUnknownEpc: return "UnknownEpc";
    case DenyReason::kNoGrant: return "NoGrant";
    case DenyReason::kSignatureInvalid: return "SignatureInvalid";
    case DenyReason::kDigestMismatch: return "DigestMismatch";
    case DenyReason::kUseridMismatch: return "UseridMismatch";
    case DenyReason::kSignerKeyExpired: return "SignerKeyExpired";
    case DenyReason::kWrongService: return "WrongService";
    case DenyReason::kPolicyDenied: return "PolicyDenied";
    case DenyReason::kMissingToken: return "MissingToken";
  }
  return "?";
}

std::string_view MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kUserQueryDs: return "UserQueryDS";
    case MessageKind::kDsResponse: return "DsResponse";
    case MessageKind::kUserQueryIs: return "UserQueryIS";
    case MessageKind::kIsResponse: return "IsResponse";
    case MessageKind::kAccessCheckRequest: return "AccessCheckRequest";
    case MessageKind::kAccessCheckResponse: return "AccessCheckResponse";
    case MessageKind::kChallenge: return "ChallengeMsg";
    case MessageKind::kChallengeResponse: return "ChallengeResponseMsg";
    case MessageKind::kErrorResponse: return "ErrorResponse";
  }
  return "?";
}

NodeId EpcdsNodeId() { return "epcds"; }
NodeId EpcisNodeId(const CompanyId& company) { return "epcis:" + company.value(); }
NodeId UserNodeId(const UserId& user) { return "user:" + user.value(); }

std::vector<EventRecord> FilterEvents(const std::vector<EventRecord>& events,
                                      const EpcCode& epc, const AttributeSet& scope) {
  std::vector<EventRecord> out;
  for (const auto& ev : events) {
    if (ev.epc != epc) continue;
    EventRecord copy = ev;
    if (!scope.empty()) {
      if (!scope.contains("location")) copy.location.clear();
      if (!scope.contains("business_step")) copy.business_step.clear();
      std::erase_if(copy.attributes,
                    [&](const auto& kv) { return !scope.contains(kv.first); });
    }
    out.push_back(std::move(copy));
  }
  return out;
}

namespace {

SignatureTag IssueTag(EpcdsState& state, const Digest& digest) {
  ++state.tallies.signs;
  if (state.config.crypto == CryptoMode::kModeled) {
    return {Bytes(digest.begin(), digest.end()), kModeledKeyId};
  }
  if (!state.key) throw Error(ErrorCode::kConfigInvalid, "SignEpc EPCDS without a key");
  return SignTag(state.key->private_key, digest);
}

// Modeled tags carry the digest verbatim; the same accept/reject logic as
// CheckToken applies.
TokenVerdict CheckModeledToken(const UserId& requester, const AccessRight& rights,
                               const SignatureTag& tag, Timestamp now,
                               const ExpiryWindow& window) {
  if (tag.key_id != kModeledKeyId || tag.signature.size() != Digest{}.size()) {
    return TokenVerdict::Reject(RejectReason::kSignatureInvalid);
  }
  if (requester != rights.userid) return TokenVerdict::Reject(RejectReason::kUseridMismatch);
  Digest recovered;
  std::copy(tag.signature.begin(), tag.signature.end(), recovered.begin());
  if (MakeDigest(requester, rights, ComputeExpiry(now, window)) != recovered) {
    return TokenVerdict::Reject(RejectReason::kDigestMismatch);
  }
  return TokenVerdict::Accept();
}

DenyReason FromReject(RejectReason r) {
  switch (r) {
    case RejectReason::kSignatureInvalid: return DenyReason::kSignatureInvalid;
    case RejectReason::kDigestMismatch: return DenyReason::kDigestMismatch;
    case RejectReason::kUseridMismatch: return DenyReason::kUseridMismatch;
  }
  return DenyReason::kSignatureInvalid;
}

Message Reply(const EpcisState& state, const NodeId& to, Payload payload) {
  return {state.id, to, std::move(payload)};
}

Message Deny(const EpcisState& state, const NodeId& to, std::uint64_t txn, DenyReason reason,
             std::string detail = {}) {
  return Reply(state, to, ErrorResponse{txn, reason, std::move(detail)});
}

Message Serve(const EpcisState& state, const NodeId& to, std::uint64_t txn, const EpcCode& epc,
              const AttributeSet& scope) {
  return Reply(state, to, IsResponse{txn, state.company, FilterEvents(state.events, epc, scope)});
}

// SignEpc: local verification, no EPCDS round-trip.
Message CheckSignedQuery(EpcisState& state, const Message& msg, const UserQueryIs& q,
                         Timestamp now) {
  if (!q.rights || !q.tag) return Deny(state, msg.sender, q.txn, DenyReason::kMissingToken);
  const auto& cfg = state.config;
  ++state.tallies.verifies;

  TokenVerdict verdict;
  if (cfg.crypto == CryptoMode::kModeled) {
    verdict = CheckModeledToken(q.user, *q.rights, *q.tag, now, cfg.window);
  } else {
    const TrustedKey* trusted = state.trusted.Find(q.tag->key_id);
    if (trusted == nullptr) {
      return Deny(state, msg.sender, q.txn, DenyReason::kSignatureInvalid,
                  "unknown key id " + q.tag->key_id);
    }
    if (CheckKeyExpiry(trusted->valid_until, now) == KeyStatus::kExpired) {
      return Deny(state, msg.sender, q.txn, DenyReason::kSignerKeyExpired, q.tag->key_id);
    }
    verdict = CheckToken(q.user, *q.rights, *q.tag, now, cfg.window, trusted->key);
  }
  if (!verdict.accepted()) return Deny(state, msg.sender, q.txn, FromReject(*verdict.reject));
  // A genuine token for another service or EPC is not a grant here.
  if (q.rights->epcis_url != state.url || q.rights->epc != q.epc) {
    return Deny(state, msg.sender, q.txn, DenyReason::kWrongService);
  }
  return Serve(state, msg.sender, q.txn, q.epc, q.rights->scope);
}

}  // namespace

std::variant<DsResponse, ErrorResponse> EpcdsHandleQuery(EpcdsState& state,
                                                         const UserQueryDs& query,
                                                         Timestamp now) {
  auto records = state.registry.Lookup(query.epc);
  if (records.empty()) return ErrorResponse{query.txn, DenyReason::kUnknownEpc, query.epc.value()};

  DsResponse resp{query.txn, query.epc, {}};
  const AccessModel model = state.config.model;
  std::string label;
  if (model == AccessModel::kSignEpc) label = ComputeExpiry(now, state.config.window);

  for (const auto& rec : records) {
    AttributeSet scope;
    if (model != AccessModel::kDirectoryOpen) {
      ++state.tallies.policy_checks;
      auto decision = Evaluate(state.registry, rec.policy, rec.company, query.user, query.epc);
      if (!decision.granted) continue;
      scope = decision.scope;
    }
    Grant grant{rec.company, rec.epcis_url, AccessRight{query.user, query.epc, rec.epcis_url, scope},
                {}, std::nullopt};
    if (model == AccessModel::kSignEpc) {
      grant.expiry_label = label;
      grant.tag = IssueTag(state, MakeDigest(query.user, grant.rights, label));
    }
    resp.grants.push_back(std::move(grant));
  }
  if (resp.grants.empty()) {
    return ErrorResponse{query.txn, DenyReason::kNoGrant, query.epc.value()};
  }
  return resp;
}

AccessCheckResponse EpcdsHandleAccessCheck(EpcdsState& state, const AccessCheckRequest& req) {
  ++state.tallies.policy_checks;
  const PublishRecord* rec = state.registry.Find(req.epc, req.owner);
  if (rec == nullptr) return {req.check_id, false, {}};
  auto decision = Evaluate(state.registry, rec->policy, req.owner, req.user, req.epc);
  return {req.check_id, decision.granted, decision.scope};
}

ChallengeResponseMsg EpcdsHandleChallenge(const EpcdsState& state, const ChallengeMsg& msg) {
  if (!state.key) throw Error(ErrorCode::kConfigInvalid, "EPCDS has no key to prove");
  return {msg.challenge, RespondChallenge(state.key->private_key, msg.challenge)};
}

std::vector<Message> EpcisHandleQuery(EpcisState& state, const Message& msg, Timestamp now) {
  const auto* q = std::get_if<UserQueryIs>(&msg.payload);
  if (q == nullptr) throw Error(ErrorCode::kInvalidArgument, "EPCIS expects UserQueryIS");

  switch (state.config.model) {
    case AccessModel::kDirectoryOpen:
      return {Serve(state, msg.sender, q->txn, q->epc, {})};
    case AccessModel::kSignEpc:
      return {CheckSignedQuery(state, msg, *q, now)};
    case AccessModel::kSecureEpcds:
      break;
  }
  const std::uint64_t id = state.next_check_id++;
  state.pending.emplace(id, msg);
  return {Reply(state, EpcdsNodeId(), AccessCheckRequest{id, q->user, q->epc, state.company})};
}

std::vector<Message> EpcisHandleAccessCheckResponse(EpcisState& state,
                                                    const AccessCheckResponse& resp) {
  auto it = state.pending.find(resp.check_id);
  if (it == state.pending.end()) return {};
  Message original = std::move(it->second);
  state.pending.erase(it);
  const auto& q = std::get<UserQueryIs>(original.payload);
  if (!resp.granted) return {Deny(state, original.sender, q.txn, DenyReason::kPolicyDenied)};
  return {Serve(state, original.sender, q.txn, q.epc, resp.scope)};
}

Message EpcisBeginKeyVerification(EpcisState& state, const TrustedKey& claimed, Drbg& rng,
                                  Timestamp now) {
  Challenge ch = state.challenges.Issue(rng, now);
  state.unverified.insert_or_assign(HexEncode(ch.nonce), claimed);
  return Reply(state, EpcdsNodeId(), ChallengeMsg{ch});
}

bool EpcisHandleChallengeResponse(EpcisState& state, const ChallengeResponseMsg& msg,
                                  Timestamp now) {
  auto it = state.unverified.find(HexEncode(msg.challenge.nonce));
  if (it == state.unverified.end()) {
    throw Error(ErrorCode::kChallengeConsumed, "no key awaiting this challenge");
  }
  TrustedKey claimed = it->second;
  state.unverified.erase(it);
  ++state.tallies.verifies;
  bool ok = state.challenges.Verify(claimed.key, msg.challenge, msg.response, now);
  if (ok) state.trusted.Add(claimed.key, claimed.valid_until);
  return ok;
}

std::vector<Message> EpcdsHandleMessage(EpcdsState& state, const Message& msg, Timestamp now) {
  return std::visit(
      [&](const auto& p) -> std::vector<Message> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UserQueryDs>) {
          return {std::visit([&](auto r) { return Message{EpcdsNodeId(), msg.sender, r}; },
                             EpcdsHandleQuery(state, p, now))};
        } else if constexpr (std::is_same_v<T, AccessCheckRequest>) {
          return {Message{EpcdsNodeId(), msg.sender, EpcdsHandleAccessCheck(state, p)}};
        } else if constexpr (std::is_same_v<T, ChallengeMsg>) {
          return {Message{EpcdsNodeId(), msg.sender, EpcdsHandleChallenge(state, p)}};
        } else {
          throw Error(ErrorCode::kInvalidArgument,
                      "EPCDS cannot handle " + std::string(MessageKindName(msg.kind())));
        }
      },
      msg.payload);
}

std::vector<Message> EpcisHandleMessage(EpcisState& state, const Message& msg, Timestamp now) {
  switch (msg.kind()) {
    case MessageKind::kUserQueryIs:
      return EpcisHandleQuery(state, msg, now);
    case MessageKind::kAccessCheckResponse:
      return EpcisHandleAccessCheckResponse(state, std::get<AccessCheckResponse>(msg.payload));
    case MessageKind::kChallengeResponse:
      EpcisHandleChallengeResponse(state, std::get<ChallengeResponseMsg>(msg.payload), now);
      return {};
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "EPCIS cannot handle " + std::string(MessageKindName(msg.kind())));
  }
}

std::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kTamperRights: return "tamper_rights";
    case AttackKind::kReplayAsSelf: return "replay_as_self";
    case AttackKind::kReuseExpired: return "reuse_expired";
    case AttackKind::kForgeSignature: return "forge_signature";
  }
  return "?";
}

AttackKind ParseAttackKind(std::string_view text) {
  for (auto k : kAllAttacks) {
    if (AttackKindName(k) == text) return k;
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown attack '" + std::string(text) + "'");
}

namespace {

EpcCode BumpSerial(const EpcCode& epc) {
  std::string v = epc.value();
  char& last = v.back();
  last = last == '9' ? '0' : static_cast<char>(last + 1);
  return ParseEpc(v);
}

}  // namespace

Message AttackerAction(AttackKind kind, const DsResponse& captured, const UserId& attacker_id,
                       Timestamp now, const AttackContext& ctx) {
  if (captured.grants.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing captured");
  const Grant& g = captured.grants.front();
  UserQueryIs q{captured.txn, attacker_id, captured.epc, g.rights, g.tag};

  switch (kind) {
    case AttackKind::kTamperRights: {
      // The attacker rebinds the rights to itself and alters one more field.
      q.rights->userid = attacker_id;
      int field = ctx.rng ? static_cast<int>((*ctx.rng)() % 3) : 2;
      if (field == 0) {
        q.rights->epc = BumpSerial(q.rights->epc);
      } else if (field == 1) {
        q.rights->epcis_url += "/all";
      } else if (!q.rights->scope.empty()) {
        q.rights->scope.insert("quality");
        if (q.rights->scope.size() == g.rights.scope.size()) {
          q.rights->scope.insert("quality_" + std::to_string(q.rights->scope.size()));
        }
      } else {
        q.rights->scope.insert("location");
      }
      if (field == 0) q.epc = q.rights->epc;
      break;
    }
    case AttackKind::kReplayAsSelf:
      break;
    case AttackKind::kReuseExpired:
      q.user = g.rights.userid;
      break;
    case AttackKind::kForgeSignature: {
      if (ctx.forging_key == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "ForgeSignature needs a forging key");
      }
      q.rights->userid = attacker_id;
      std::string label = ComputeExpiry(now, ctx.window);
      SignatureTag forged = SignTag(*ctx.forging_key, MakeDigest(attacker_id, *q.rights, label));
      if (g.tag) forged.key_id = g.tag->key_id;  // claim the EPCDS key
      q.tag = std::move(forged);
      break;
    }
  }
  return {UserNodeId(attacker_id), EpcisNodeId(g.company), std::move(q)};
}

}  // namespace signepc

namespace signepc {
namespace {

nlohmann::json RightsJson(const AccessRight& r) {
  return {{"userid", r.userid.value()},
          {"epc", r.epc.value()},
          {"epcis_url", r.epcis_url},
          {"scope", std::vector<std::string>(r.scope.begin(), r.scope.end())}};
}

nlohmann::json TagJson(const SignatureTag& t) {
  return {{"key_id", t.key_id}, {"signature", Base64Encode(t.signature)}};
}

nlohmann::json EventJson(const EventRecord& e) {
  nlohmann::json j = {{"epc", e.epc.value()},
                      {"company", e.company.value()},
                      {"time", e.event_time},
                      {"attributes", e.attributes}};
  if (!e.location.empty()) j["location"] = e.location;
  if (!e.business_step.empty()) j["business_step"] = e.business_step;
  return j;
}

}  // namespace

nlohmann::json MessageToJson(const Message& msg) {
  using nlohmann::json;
  json j = {{"kind", std::string(MessageKindName(msg.kind()))},
            {"sender", msg.sender},
            {"recipient", msg.recipient}};
  json p = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UserQueryDs>) {
          return {{"txn", m.txn}, {"user", m.user.value()}, {"epc", m.epc.value()}};
        } else if constexpr (std::is_same_v<T, DsResponse>) {
          json grants = json::array();
          for (const auto& g : m.grants) {
            json gj = {{"company", g.company.value()},
                       {"epcis_url", g.epcis_url},
                       {"rights", RightsJson(g.rights)}};
            if (g.tag) {
              gj["expiry_label"] = g.expiry_label;
              gj["tag"] = TagJson(*g.tag);
            }
            grants.push_back(gj);
          }
          return {{"txn", m.txn}, {"epc", m.epc.value()}, {"grants", grants}};
        } else if constexpr (std::is_same_v<T, UserQueryIs>) {
          json q = {{"txn", m.txn}, {"user", m.user.value()}, {"epc", m.epc.value()}};
          if (m.rights) q["rights"] = RightsJson(*m.rights);
          if (m.tag) q["tag"] = TagJson(*m.tag);
          return q;
        } else if constexpr (std::is_same_v<T, IsResponse>) {
          json events = json::array();
          for (const auto& e : m.events) events.push_back(EventJson(e));
          return {{"txn", m.txn}, {"company", m.company.value()}, {"events", events}};
        } else if constexpr (std::is_same_v<T, AccessCheckRequest>) {
          return {{"check_id", m.check_id},
                  {"user", m.user.value()},
                  {"epc", m.epc.value()},
                  {"owner", m.owner.value()}};
        } else if constexpr (std::is_same_v<T, AccessCheckResponse>) {
          return {{"check_id", m.check_id},
                  {"granted", m.granted},
                  {"scope", std::vector<std::string>(m.scope.begin(), m.scope.end())}};
        } else if constexpr (std::is_same_v<T, ChallengeMsg>) {
          return {{"nonce", HexEncode(m.challenge.nonce)}, {"issued_at", m.challenge.issued_at}};
        } else if constexpr (std::is_same_v<T, ChallengeResponseMsg>) {
          return {{"nonce", HexEncode(m.challenge.nonce)}, {"response", TagJson(m.response)}};
        } else {
          return {{"txn", m.txn}, {"reason", std::string(DenyReasonName(m.reason))},
                  {"detail", m.detail}};
        }
      },
      msg.payload);
  j["payload"] = p;
  return j;
}

}  // namespace signepc
