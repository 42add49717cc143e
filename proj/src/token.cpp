#include "signepc/token.hpp"

#include <cstdio>

#include "signepc/error.hpp"

namespace signepc {
namespace {

void AppendU32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void AppendField(Bytes& out, std::string_view s) {
  AppendU32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

// Days since 1970-01-01 to proleptic Gregorian (y, m, d).
void CivilFromDays(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
}

}  // namespace

ExpiryWindow::ExpiryWindow(std::int64_t window_seconds) : window_seconds_(window_seconds) {
  if (window_seconds <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "expiry window must be positive");
  }
}

VerifyKey::VerifyKey(RsaPublicKey key, std::string key_id)
    : key_(std::move(key)), key_id_(std::move(key_id)) {
  if (key_id_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty key id");
  if (key_.modulus.empty() || key_.exponent.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty public key");
  }
}

SigningKey::SigningKey(RsaPrivateKey key, std::string key_id, bool allow_weak)
    : key_(std::move(key)), key_id_(std::move(key_id)) {
  if (key_id_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty key id");
  if (key_.pub.modulus_bits() < kMinModulusBits && !allow_weak) {
    throw Error(ErrorCode::kWeakKeyRequested,
                std::to_string(key_.pub.modulus_bits()) + "-bit modulus");
  }
  CheckRsaKey(key_);
}

Bytes CanonicalClaimsBytes(const UserId& userid, const AccessRight& rights,
                           std::string_view expiry_label) {
  Bytes out;
  AppendField(out, userid.value());
  AppendField(out, rights.epc.value());
  AppendField(out, rights.epcis_url);
  // std::set already orders entries bytewise.
  AppendU32(out, static_cast<std::uint32_t>(rights.scope.size()));
  for (const auto& attr : rights.scope) AppendField(out, attr);
  AppendField(out, expiry_label);
  return out;
}

Digest MakeDigest(const UserId& userid, const AccessRight& rights,
                  std::string_view expiry_label) {
  return Sha256(CanonicalClaimsBytes(userid, rights, expiry_label));
}

std::string ComputeExpiry(Timestamp issue_time, const ExpiryWindow& window) {
  if (issue_time < 0) throw Error(ErrorCode::kInvalidArgument, "negative issue time");
  const std::int64_t index = issue_time / window.window_seconds();
  if (window.window_seconds() != ExpiryWindow::kDaily) return std::to_string(index);
  std::int64_t y;
  unsigned m, d;
  CivilFromDays(index, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

SignatureTag SignTag(const SigningKey& key, const Digest& digest) {
  return {RsaSignSha256(key.rsa(), digest), key.key_id()};
}

Digest VerifyTag(const VerifyKey& key, const SignatureTag& tag) {
  if (tag.key_id != key.key_id()) {
    throw Error(ErrorCode::kUnknownKeyId, "tag signed under '" + tag.key_id + "'");
  }
  auto recovered = RsaRecoverSha256(key.rsa(), tag.signature);
  if (!recovered) throw Error(ErrorCode::kBadSignature, "signature does not verify");
  return *recovered;
}

std::string_view RejectReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kSignatureInvalid: return "SignatureInvalid";
    case RejectReason::kDigestMismatch: return "DigestMismatch";
    case RejectReason::kUseridMismatch: return "UseridMismatch";
  }
  return "?";
}

TokenVerdict CheckToken(const UserId& requester, const AccessRight& rights,
                        const SignatureTag& tag, Timestamp now, const ExpiryWindow& window,
                        const VerifyKey& epcds_key) {
  Digest recovered;
  try {
    recovered = VerifyTag(epcds_key, tag);
  } catch (const Error&) {
    return TokenVerdict::Reject(RejectReason::kSignatureInvalid);
  }
  if (requester != rights.userid) return TokenVerdict::Reject(RejectReason::kUseridMismatch);
  Digest expected = MakeDigest(requester, rights, ComputeExpiry(now, window));
  if (expected != recovered) return TokenVerdict::Reject(RejectReason::kDigestMismatch);
  return TokenVerdict::Accept();
}

nlohmann::json TokenToJson(const TransportToken& token) {
  nlohmann::json j;
  j["version"] = kTokenFormatVersion;
  j["userid"] = token.rights.userid.value();
  j["epc"] = token.rights.epc.value();
  j["epcis_url"] = token.rights.epcis_url;
  j["scope"] = std::vector<std::string>(token.rights.scope.begin(), token.rights.scope.end());
  j["expiry_label"] = token.expiry_label;
  j["key_id"] = token.tag.key_id;
  j["signature"] = Base64Encode(token.tag.signature);
  return j;
}

TransportToken TokenFromJson(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kTokenFormatVersion) {
      throw Error(ErrorCode::kInvalidArgument, "unsupported token version");
    }
    TransportToken t;
    t.rights.userid = UserId(j.at("userid").get<std::string>());
    t.rights.epc = ParseEpc(j.at("epc").get<std::string>());
    t.rights.epcis_url = j.at("epcis_url").get<std::string>();
    for (const auto& attr : j.at("scope")) {
      if (!t.rights.scope.insert(attr.get<std::string>()).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate scope entry");
      }
    }
    t.expiry_label = j.at("expiry_label").get<std::string>();
    t.tag.key_id = j.at("key_id").get<std::string>();
    t.tag.signature = Base64Decode(j.at("signature").get<std::string>());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("token JSON: ") + e.what());
  }
}

}  // namespace signepc
