#pragma once

#include <optional>
#include <span>

#include "signepc/bytes.hpp"

namespace signepc {

// Big integers are carried as minimal big-endian byte strings.

struct RsaPublicKey {
  Bytes modulus;
  Bytes exponent;

  std::size_t modulus_bytes() const { return modulus.size(); }
  std::size_t modulus_bits() const;
  bool operator==(const RsaPublicKey&) const = default;
};

struct RsaPrivateKey {
  RsaPublicKey pub;
  Bytes private_exponent;
  Bytes prime1;
  Bytes prime2;
  Bytes exponent1;    // d mod (p-1)
  Bytes exponent2;    // d mod (q-1)
  Bytes coefficient;  // q^-1 mod p

  bool operator==(const RsaPrivateKey&) const = default;
};

/// Generates a two-prime key with e = 65537 and an exact modulus length.
/// All randomness comes from rng, so a seeded Drbg reproduces the key.
RsaPrivateKey GenerateRsaKey(int modulus_bits, Drbg& rng);

/// Throws kInvalidArgument when the components are inconsistent.
void CheckRsaKey(const RsaPrivateKey& key);

/// RSASSA-PKCS1-v1_5 over a precomputed SHA-256 hash. Deterministic; the
/// output is exactly modulus_bytes() long.
Bytes RsaSignSha256(const RsaPrivateKey& key, const Sha256Digest& hash);

/// Inverse of RsaSignSha256: applies the public exponent and strictly parses
/// the encoded message. Returns the embedded hash, or nullopt on any mismatch.
std::optional<Sha256Digest> RsaRecoverSha256(const RsaPublicKey& key,
                                             std::span<const std::uint8_t> signature);

}  // namespace signepc
