#include "signepc/pki.hpp"

#include "signepc/error.hpp"

namespace signepc {

std::string DeriveKeyId(const RsaPublicKey& key) {
  Bytes material = key.modulus;
  material.insert(material.end(), key.exponent.begin(), key.exponent.end());
  auto h = Sha256(material);
  return "epcds-" + HexEncode(std::span(h).first(8));
}

KeyPair GenerateKeyPair(const KeyGenOptions& options) {
  const int floor = options.allow_weak ? 1024 : kMinModulusBits;
  if (options.modulus_bits < floor) {
    throw Error(ErrorCode::kWeakKeyRequested,
                std::to_string(options.modulus_bits) + " bits requested, floor is " +
                    std::to_string(floor));
  }
  if (options.valid_until <= options.created_at) {
    throw Error(ErrorCode::kInvalidArgument, "valid_until must follow created_at");
  }
  Drbg rng = options.seed ? Drbg(*options.seed) : Drbg::FromOs();
  RsaPrivateKey rsa = GenerateRsaKey(options.modulus_bits, rng);
  std::string id = DeriveKeyId(rsa.pub);
  SigningKey priv(std::move(rsa), id, options.allow_weak);
  VerifyKey pub = priv.verify_key();
  return {std::move(priv), std::move(pub), options.created_at, options.valid_until};
}

KeyStatus CheckKeyExpiry(Timestamp valid_until, Timestamp now) {
  return now > valid_until ? KeyStatus::kExpired : KeyStatus::kValid;
}

void KeyRing::Add(const VerifyKey& key, Timestamp valid_until) {
  keys_.insert_or_assign(key.key_id(), TrustedKey{key, valid_until});
}

const TrustedKey* KeyRing::Find(const std::string& key_id) const {
  auto it = keys_.find(key_id);
  return it == keys_.end() ? nullptr : &it->second;
}

SignatureTag RespondChallenge(const SigningKey& key, const Challenge& challenge) {
  return SignTag(key, Sha256(challenge.nonce));
}

Challenge ChallengeStore::Issue(Drbg& rng, Timestamp now) {
  Challenge ch;
  do {
    rng.Fill(ch.nonce);
  } while (outstanding_.contains(ch.nonce));
  ch.issued_at = now;
  outstanding_.emplace(ch.nonce, now);
  return ch;
}

bool ChallengeStore::Verify(const VerifyKey& claimed, const Challenge& challenge,
                            const SignatureTag& response, Timestamp now) {
  auto it = outstanding_.find(challenge.nonce);
  if (it == outstanding_.end()) {
    throw Error(ErrorCode::kChallengeConsumed, "challenge not outstanding");
  }
  const Timestamp issued_at = it->second;
  outstanding_.erase(it);
  if (now - issued_at > ttl_) {
    throw Error(ErrorCode::kChallengeExpired,
                "issued at " + std::to_string(issued_at) + ", now " + std::to_string(now));
  }
  auto expected = Sha256(challenge.nonce);
  auto recovered = RsaRecoverSha256(claimed.rsa(), response.signature);
  return recovered && *recovered == expected;
}

nlohmann::json PublicBundleToJson(const VerifyKey& key, Timestamp valid_until) {
  return {{"key_id", key.key_id()},
          {"modulus", Base64Encode(key.rsa().modulus)},
          {"exponent", Base64Encode(key.rsa().exponent)},
          {"valid_until", valid_until}};
}

TrustedKey PublicBundleFromJson(const nlohmann::json& j) {
  try {
    RsaPublicKey rsa{Base64Decode(j.at("modulus").get<std::string>()),
                     Base64Decode(j.at("exponent").get<std::string>())};
    return {VerifyKey(std::move(rsa), j.at("key_id").get<std::string>()),
            j.at("valid_until").get<Timestamp>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("key bundle: ") + e.what());
  }
}

nlohmann::json PrivateKeyToJson(const KeyPair& kp) {
  const auto& k = kp.private_key.rsa();
  nlohmann::json j = PublicBundleToJson(kp.public_key, kp.valid_until);
  j["created_at"] = kp.created_at;
  j["private_exponent"] = Base64Encode(k.private_exponent);
  j["prime1"] = Base64Encode(k.prime1);
  j["prime2"] = Base64Encode(k.prime2);
  j["exponent1"] = Base64Encode(k.exponent1);
  j["exponent2"] = Base64Encode(k.exponent2);
  j["coefficient"] = Base64Encode(k.coefficient);
  return j;
}

KeyPair PrivateKeyFromJson(const nlohmann::json& j, bool allow_weak) {
  try {
    TrustedKey pub = PublicBundleFromJson(j);
    auto field = [&](const char* name) { return Base64Decode(j.at(name).get<std::string>()); };
    RsaPrivateKey rsa{pub.key.rsa(),   field("private_exponent"), field("prime1"),
                      field("prime2"), field("exponent1"),        field("exponent2"),
                      field("coefficient")};
    SigningKey priv(std::move(rsa), pub.key.key_id(), allow_weak);
    return {std::move(priv), pub.key, j.value("created_at", Timestamp{0}), pub.valid_until};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("private key: ") + e.what());
  }
}

}  // namespace signepc
