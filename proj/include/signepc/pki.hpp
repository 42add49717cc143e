#pragma once

#include <map>
#include <optional>

#include "json.hpp"
#include "signepc/token.hpp"

namespace signepc {

/// An EPCDS signing identity. EPCDS acts as its own CA: the distributed
/// public material is (key_id, public key, valid_until).
struct KeyPair {
  SigningKey private_key;
  VerifyKey public_key;
  Timestamp created_at = 0;
  Timestamp valid_until = 0;
};

struct KeyGenOptions {
  int modulus_bits = kMinModulusBits;
  Timestamp created_at = 0;
  Timestamp valid_until = 0;
  std::optional<std::uint64_t> seed;  // nullopt = OS randomness
  bool allow_weak = false;            // test mode: permits >= 1024 bits
};

/// Throws kWeakKeyRequested below 2048 bits (below 1024 even with
/// allow_weak), kInvalidArgument when valid_until <= created_at.
KeyPair GenerateKeyPair(const KeyGenOptions& options);

/// key_id derived from the public material: "epcds-" + 16 hex digits.
std::string DeriveKeyId(const RsaPublicKey& key);

enum class KeyStatus { kValid, kExpired };
/// Expired iff now > valid_until; the bound itself is still valid.
KeyStatus CheckKeyExpiry(Timestamp valid_until, Timestamp now);
inline KeyStatus CheckKeyExpiry(const KeyPair& kp, Timestamp now) {
  return CheckKeyExpiry(kp.valid_until, now);
}

/// Public keys an EPCIS trusts, indexed by key_id (supports rotation).
struct TrustedKey {
  VerifyKey key;
  Timestamp valid_until = 0;
};

class KeyRing {
 public:
  void Add(const VerifyKey& key, Timestamp valid_until);
  const TrustedKey* Find(const std::string& key_id) const;
  bool empty() const { return keys_.empty(); }

 private:
  std::map<std::string, TrustedKey> keys_;
};

struct Challenge {
  std::array<std::uint8_t, 32> nonce{};
  Timestamp issued_at = 0;

  bool operator==(const Challenge&) const = default;
};

/// Signature over SHA-256(nonce), proving possession of the private key.
SignatureTag RespondChallenge(const SigningKey& key, const Challenge& challenge);

/// Verifier-side bookkeeping of outstanding challenges. Each challenge can be
/// checked exactly once.
class ChallengeStore {
 public:
  static constexpr Timestamp kDefaultTtl = 300;

  explicit ChallengeStore(Timestamp ttl = kDefaultTtl) : ttl_(ttl) {}

  Challenge Issue(Drbg& rng, Timestamp now);

  /// True iff response is a valid signature over SHA-256(nonce) under
  /// claimed. Consumes the challenge whatever the outcome. Throws
  /// kChallengeConsumed for unknown or already-used challenges and
  /// kChallengeExpired when older than the TTL.
  bool Verify(const VerifyKey& claimed, const Challenge& challenge,
              const SignatureTag& response, Timestamp now);

  std::size_t outstanding() const { return outstanding_.size(); }

 private:
  Timestamp ttl_;
  std::map<std::array<std::uint8_t, 32>, Timestamp> outstanding_;
};

// Key bundle: {key_id, modulus, exponent (base64), valid_until}.
nlohmann::json PublicBundleToJson(const VerifyKey& key, Timestamp valid_until);
TrustedKey PublicBundleFromJson(const nlohmann::json& j);

// Private key file: bundle fields plus the private components.
nlohmann::json PrivateKeyToJson(const KeyPair& kp);
KeyPair PrivateKeyFromJson(const nlohmann::json& j, bool allow_weak = false);

}  // namespace signepc
