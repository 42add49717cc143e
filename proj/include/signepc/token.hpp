#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "signepc/bytes.hpp"
#include "signepc/model.hpp"
#include "signepc/rsa.hpp"

namespace signepc {

inline constexpr int kMinModulusBits = 2048;

/// The capability: who may read what, at which EPCIS.
struct AccessRight {
  UserId userid;
  EpcCode epc;
  std::string epcis_url;
  AttributeSet scope;  // empty = all attributes

  bool operator==(const AccessRight&) const = default;
};

using Digest = Sha256Digest;

struct SignatureTag {
  Bytes signature;
  std::string key_id;

  bool operator==(const SignatureTag&) const = default;
};

class ExpiryWindow {
 public:
  static constexpr std::int64_t kDaily = 86400;

  ExpiryWindow() : ExpiryWindow(kDaily) {}
  explicit ExpiryWindow(std::int64_t window_seconds);
  std::int64_t window_seconds() const { return window_seconds_; }
  bool operator==(const ExpiryWindow&) const = default;

 private:
  std::int64_t window_seconds_;
};

class VerifyKey {
 public:
  VerifyKey(RsaPublicKey key, std::string key_id);
  const RsaPublicKey& rsa() const { return key_; }
  const std::string& key_id() const { return key_id_; }
  bool operator==(const VerifyKey&) const = default;

 private:
  RsaPublicKey key_;
  std::string key_id_;
};

class SigningKey {
 public:
  /// Checks key consistency. Throws kWeakKeyRequested below 2048 bits unless
  /// allow_weak is set (test mode).
  SigningKey(RsaPrivateKey key, std::string key_id, bool allow_weak = false);
  const RsaPrivateKey& rsa() const { return key_; }
  const std::string& key_id() const { return key_id_; }
  VerifyKey verify_key() const { return VerifyKey(key_.pub, key_id_); }
  bool operator==(const SigningKey&) const = default;

 private:
  RsaPrivateKey key_;
  std::string key_id_;
};

/// Length-prefixed claims layout: userid, epc, epcis_url, scope entry count
/// followed by each sorted entry, expiry_label. Every string is a 4-byte
/// big-endian length and its UTF-8 bytes.
Bytes CanonicalClaimsBytes(const UserId& userid, const AccessRight& rights,
                           std::string_view expiry_label);

Digest MakeDigest(const UserId& userid, const AccessRight& rights,
                  std::string_view expiry_label);

/// Daily windows label as the UTC date `YYYY-MM-DD`; any other window length
/// labels as the decimal window index floor(issue_time / window_seconds).
std::string ComputeExpiry(Timestamp issue_time, const ExpiryWindow& window);

SignatureTag SignTag(const SigningKey& key, const Digest& digest);

/// Recovers the digest committed to by tag. Throws kUnknownKeyId when the tag
/// names a different key, kBadSignature when the signature does not verify.
Digest VerifyTag(const VerifyKey& key, const SignatureTag& tag);

enum class RejectReason { kSignatureInvalid, kDigestMismatch, kUseridMismatch };
std::string_view RejectReasonName(RejectReason reason);

struct TokenVerdict {
  std::optional<RejectReason> reject;  // nullopt = accept

  bool accepted() const { return !reject.has_value(); }
  static TokenVerdict Accept() { return {}; }
  static TokenVerdict Reject(RejectReason r) { return {r}; }
  bool operator==(const TokenVerdict&) const = default;
};

/// EPCIS-side check. Recomputes the expected digest from the requester, the
/// presented rights and the verifier's own clock, recovers the signed digest
/// from tag, and accepts only if both agree and requester owns the rights.
TokenVerdict CheckToken(const UserId& requester, const AccessRight& rights,
                        const SignatureTag& tag, Timestamp now, const ExpiryWindow& window,
                        const VerifyKey& epcds_key);

/// What a user carries from EPCDS to EPCIS. expiry_label travels for
/// debugging only; verifiers recompute it.
struct TransportToken {
  AccessRight rights;
  std::string expiry_label;
  SignatureTag tag;

  bool operator==(const TransportToken&) const = default;
};

inline constexpr int kTokenFormatVersion = 1;

nlohmann::json TokenToJson(const TransportToken& token);
/// Throws kInvalidArgument on schema or version mismatch.
TransportToken TokenFromJson(const nlohmann::json& j);

}  // namespace signepc
