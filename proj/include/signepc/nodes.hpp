#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "signepc/pki.hpp"
#include "signepc/policy.hpp"
#include "signepc/registry.hpp"
#include "signepc/token.hpp"

namespace signepc {

using NodeId = std::string;
// Simulated durations are integer microseconds.
using Micros = std::int64_t;

enum class AccessModel { kDirectoryOpen, kSecureEpcds, kSignEpc };
std::string_view AccessModelName(AccessModel model);
AccessModel ParseAccessModel(std::string_view text);  // directory_open|secure_epcds|sign_epc

// Real crypto runs RSA; modeled crypto carries the digest itself in the tag
// so large runs stay cheap. Both charge simulated time from ServiceTimes.
enum class CryptoMode { kReal, kModeled };

struct ServiceTimes {
  Micros policy_check = 1000;
  Micros sign = 5000;
  Micros verify = 500;
  Micros remote_check_roundtrip = 0;  // EPCIS-side overhead to issue a remote check
  Micros db_lookup = 1000;

  bool operator==(const ServiceTimes&) const = default;
};

struct NodeConfig {
  AccessModel model = AccessModel::kSignEpc;
  ExpiryWindow window;
  ServiceTimes service_times;
  CryptoMode crypto = CryptoMode::kReal;
};

inline const std::string kModeledKeyId = "modeled";

// ---- Messages -------------------------------------------------------------

struct UserQueryDs {
  std::uint64_t txn = 0;
  UserId user;  // authenticated out of band
  EpcCode epc;
};

struct Grant {
  CompanyId company;
  std::string epcis_url;
  AccessRight rights;
  std::string expiry_label;          // SignEpc only
  std::optional<SignatureTag> tag;   // SignEpc only
};

struct DsResponse {
  std::uint64_t txn = 0;
  EpcCode epc;
  std::vector<Grant> grants;
};

struct UserQueryIs {
  std::uint64_t txn = 0;
  UserId user;  // authenticated out of band
  EpcCode epc;
  std::optional<AccessRight> rights;
  std::optional<SignatureTag> tag;
};

struct IsResponse {
  std::uint64_t txn = 0;
  CompanyId company;
  std::vector<EventRecord> events;
};

struct AccessCheckRequest {
  std::uint64_t check_id = 0;
  UserId user;
  EpcCode epc;
  CompanyId owner;
};

struct AccessCheckResponse {
  std::uint64_t check_id = 0;
  bool granted = false;
  AttributeSet scope;
};

struct ChallengeMsg {
  Challenge challenge;
};

struct ChallengeResponseMsg {
  Challenge challenge;
  SignatureTag response;
};

enum class DenyReason {
  kUnknownEpc,
  kNoGrant,
  kSignatureInvalid,
  kDigestMismatch,
  kUseridMismatch,
  kSignerKeyExpired,
  kWrongService,
  kPolicyDenied,
  kMissingToken,
};
std::string_view DenyReasonName(DenyReason reason);

struct ErrorResponse {
  std::uint64_t txn = 0;
  DenyReason reason = DenyReason::kNoGrant;
  std::string detail;
};

enum class MessageKind {
  kUserQueryDs,
  kDsResponse,
  kUserQueryIs,
  kIsResponse,
  kAccessCheckRequest,
  kAccessCheckResponse,
  kChallenge,
  kChallengeResponse,
  kErrorResponse,
};
inline constexpr int kMessageKindCount = 9;
std::string_view MessageKindName(MessageKind kind);

using Payload = std::variant<UserQueryDs, DsResponse, UserQueryIs, IsResponse,
                             AccessCheckRequest, AccessCheckResponse, ChallengeMsg,
                             ChallengeResponseMsg, ErrorResponse>;

struct Message {
  NodeId sender;
  NodeId recipient;
  Payload payload;

  // Variant alternatives are declared in MessageKind order.
  MessageKind kind() const { return static_cast<MessageKind>(payload.index()); }
};

NodeId EpcdsNodeId();
NodeId EpcisNodeId(const CompanyId& company);
NodeId UserNodeId(const UserId& user);

/// Keeps only the attributes named in scope (empty scope keeps everything).
/// `location` and `business_step` count as attributes for this purpose.
std::vector<EventRecord> FilterEvents(const std::vector<EventRecord>& events,
                                      const EpcCode& epc, const AttributeSet& scope);

// ---- EPCDS ----------------------------------------------------------------

struct NodeTallies {
  std::uint64_t signs = 0;
  std::uint64_t verifies = 0;
  std::uint64_t policy_checks = 0;

  bool operator==(const NodeTallies&) const = default;
};

struct EpcdsState {
  PublishRegistry registry;
  NodeConfig config;
  std::optional<KeyPair> key;  // required for SignEpc with real crypto
  NodeTallies tallies;
};

/// Answers a discovery query. DirectoryOpen returns every URL; the secured
/// models return only granting companies, and SignEpc attaches one signed
/// (rights, tag) per grant.
std::variant<DsResponse, ErrorResponse> EpcdsHandleQuery(EpcdsState& state,
                                                         const UserQueryDs& query,
                                                         Timestamp now);

AccessCheckResponse EpcdsHandleAccessCheck(EpcdsState& state, const AccessCheckRequest& req);

ChallengeResponseMsg EpcdsHandleChallenge(const EpcdsState& state, const ChallengeMsg& msg);

// ---- EPCIS ----------------------------------------------------------------

struct EpcisState {
  NodeId id;
  CompanyId company;
  std::string url;
  std::vector<EventRecord> events;
  NodeConfig config;
  KeyRing trusted;
  NodeTallies tallies;

  // Secure EPCDS: queries waiting for the remote access check.
  std::map<std::uint64_t, Message> pending;
  std::uint64_t next_check_id = 1;

  // Key bootstrap: claimed EPCDS keys awaiting a challenge round.
  ChallengeStore challenges;
  std::map<std::string, TrustedKey> unverified;
};

/// Entry point for a user's query. Returns the messages to send: either the
/// reply to the user, or (Secure EPCDS) an access-check request to EPCDS.
std::vector<Message> EpcisHandleQuery(EpcisState& state, const Message& query, Timestamp now);

/// Completes a Secure EPCDS query once EPCDS has answered.
std::vector<Message> EpcisHandleAccessCheckResponse(EpcisState& state,
                                                    const AccessCheckResponse& resp);

/// Starts proof-of-possession for a published EPCDS key bundle.
Message EpcisBeginKeyVerification(EpcisState& state, const TrustedKey& claimed, Drbg& rng,
                                  Timestamp now);
/// Trusts the claimed key iff the response verifies. Returns whether it did.
bool EpcisHandleChallengeResponse(EpcisState& state, const ChallengeResponseMsg& msg,
                                  Timestamp now);

/// Dispatches any message to the matching handler.
std::vector<Message> EpcdsHandleMessage(EpcdsState& state, const Message& msg, Timestamp now);
std::vector<Message> EpcisHandleMessage(EpcisState& state, const Message& msg, Timestamp now);

// ---- Attacker -------------------------------------------------------------

enum class AttackKind { kTamperRights, kReplayAsSelf, kReuseExpired, kForgeSignature };
inline constexpr AttackKind kAllAttacks[] = {AttackKind::kTamperRights,
                                             AttackKind::kReplayAsSelf,
                                             AttackKind::kReuseExpired,
                                             AttackKind::kForgeSignature};
std::string_view AttackKindName(AttackKind kind);
AttackKind ParseAttackKind(std::string_view text);

struct AttackContext {
  ExpiryWindow window;
  const SigningKey* forging_key = nullptr;  // a non-EPCDS key, ForgeSignature only
  Drbg* rng = nullptr;                      // picks the tampered field
};

/// Builds the malicious EPCIS query for a captured legitimate DsResponse.
/// The attacker is an authenticated principal, so the query goes out under
/// attacker_id except for ReuseExpired, which replays the owner's own query
/// once the window has rolled (now is supplied by the caller).
Message AttackerAction(AttackKind kind, const DsResponse& captured, const UserId& attacker_id,
                       Timestamp now, const AttackContext& ctx);

}  // namespace signepc

namespace signepc {

/// Debug rendering of a message (CLI node-eval).
nlohmann::json MessageToJson(const Message& msg);

}  // namespace signepc
