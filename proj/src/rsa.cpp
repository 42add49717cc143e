#include "signepc/rsa.hpp"

#include <gmpxx.h>

#include <algorithm>

#include "signepc/error.hpp"

namespace signepc {
namespace {

// DER prefix of DigestInfo for SHA-256.
constexpr std::array<std::uint8_t, 19> kSha256DigestInfo = {
    0x30, 0x31, 0x30, 0x0d, 0x06, 0x09, 0x60, 0x86, 0x48, 0x01,
    0x65, 0x03, 0x04, 0x02, 0x01, 0x05, 0x00, 0x04, 0x20};

mpz_class FromBytes(std::span<const std::uint8_t> bytes) {
  mpz_class out;
  if (!bytes.empty()) mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return out;
}

Bytes ToBytes(const mpz_class& value) {
  std::size_t count = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  if (value != 0) mpz_export(out.data(), &count, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(count);
  return out;
}

Bytes ToFixedBytes(const mpz_class& value, std::size_t len) {
  Bytes raw = ToBytes(value);
  if (raw.size() > len) throw Error(ErrorCode::kInvalidArgument, "integer too large");
  Bytes out(len - raw.size(), 0);
  out.insert(out.end(), raw.begin(), raw.end());
  return out;
}

mpz_class RandomPrime(int bits, const mpz_class& e, Drbg& rng) {
  Bytes buf(static_cast<std::size_t>((bits + 7) / 8));
  int excess = static_cast<int>(buf.size()) * 8 - bits;
  while (true) {
    rng.Fill(buf);
    buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
    // Top two bits set so the product has exactly the requested length.
    mpz_class candidate = FromBytes(buf);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    if (static_cast<int>(mpz_sizeinbase(p.get_mpz_t(), 2)) != bits) continue;
    mpz_class pm1 = p - 1;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), pm1.get_mpz_t(), e.get_mpz_t());
    if (g == 1) return p;
  }
}

Bytes EncodeMessage(const Sha256Digest& hash, std::size_t em_len) {
  std::size_t t_len = kSha256DigestInfo.size() + hash.size();
  if (em_len < t_len + 11) throw Error(ErrorCode::kInvalidArgument, "modulus too short");
  Bytes em(em_len, 0xff);
  em[0] = 0x00;
  em[1] = 0x01;
  std::size_t sep = em_len - t_len - 1;
  em[sep] = 0x00;
  std::copy(kSha256DigestInfo.begin(), kSha256DigestInfo.end(), em.begin() + sep + 1);
  std::copy(hash.begin(), hash.end(), em.end() - hash.size());
  return em;
}

}  // namespace

std::size_t RsaPublicKey::modulus_bits() const {
  return mpz_sizeinbase(FromBytes(modulus).get_mpz_t(), 2);
}

RsaPrivateKey GenerateRsaKey(int modulus_bits, Drbg& rng) {
  if (modulus_bits < 512) throw Error(ErrorCode::kInvalidArgument, "modulus below 512 bits");
  const mpz_class e = 65537;
  const int p_bits = (modulus_bits + 1) / 2;
  const int q_bits = modulus_bits / 2;
  while (true) {
    mpz_class p = RandomPrime(p_bits, e, rng);
    mpz_class q = RandomPrime(q_bits, e, rng);
    if (p == q) continue;
    if (p < q) std::swap(p, q);
    mpz_class n = p * q;
    if (static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2)) != modulus_bits) continue;
    mpz_class pm1 = p - 1;
    mpz_class qm1 = q - 1;
    mpz_class lambda;
    mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    mpz_class d;
    if (mpz_invert(d.get_mpz_t(), e.get_mpz_t(), lambda.get_mpz_t()) == 0) continue;
    mpz_class qinv;
    mpz_invert(qinv.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    RsaPrivateKey key;
    key.pub.modulus = ToBytes(n);
    key.pub.exponent = ToBytes(e);
    key.private_exponent = ToBytes(d);
    key.prime1 = ToBytes(p);
    key.prime2 = ToBytes(q);
    key.exponent1 = ToBytes(mpz_class(d % pm1));
    key.exponent2 = ToBytes(mpz_class(d % qm1));
    key.coefficient = ToBytes(qinv);
    return key;
  }
}

void CheckRsaKey(const RsaPrivateKey& key) {
  mpz_class n = FromBytes(key.pub.modulus);
  mpz_class e = FromBytes(key.pub.exponent);
  mpz_class d = FromBytes(key.private_exponent);
  mpz_class p = FromBytes(key.prime1);
  mpz_class q = FromBytes(key.prime2);
  if (n == 0 || e < 3 || p * q != n) {
    throw Error(ErrorCode::kInvalidArgument, "RSA key: n != p*q");
  }
  mpz_class pm1 = p - 1;
  mpz_class qm1 = q - 1;
  if (mpz_class((e * d) % pm1) != 1 || mpz_class((e * d) % qm1) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "RSA key: e*d != 1 mod (p-1)(q-1)");
  }
  if (FromBytes(key.exponent1) != mpz_class(d % pm1) ||
      FromBytes(key.exponent2) != mpz_class(d % qm1) ||
      mpz_class((FromBytes(key.coefficient) * q) % p) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "RSA key: CRT components inconsistent");
  }
}

Bytes RsaSignSha256(const RsaPrivateKey& key, const Sha256Digest& hash) {
  const std::size_t k = key.pub.modulus_bytes();
  mpz_class m = FromBytes(EncodeMessage(hash, k));
  mpz_class n = FromBytes(key.pub.modulus);
  mpz_class p = FromBytes(key.prime1);
  mpz_class q = FromBytes(key.prime2);
  mpz_class dp = FromBytes(key.exponent1);
  mpz_class dq = FromBytes(key.exponent2);
  mpz_class qinv = FromBytes(key.coefficient);

  mpz_class mp = m % p;
  mpz_class mq = m % q;
  mpz_class s1, s2;
  mpz_powm_sec(s1.get_mpz_t(), mp.get_mpz_t(), dp.get_mpz_t(), p.get_mpz_t());
  mpz_powm_sec(s2.get_mpz_t(), mq.get_mpz_t(), dq.get_mpz_t(), q.get_mpz_t());
  mpz_class h = (qinv * (s1 - s2)) % p;
  if (h < 0) h += p;
  mpz_class s = s2 + h * q;

  // Fault check before releasing the signature.
  mpz_class e = FromBytes(key.pub.exponent);
  mpz_class back;
  mpz_powm(back.get_mpz_t(), s.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  if (back != m) throw Error(ErrorCode::kInvalidArgument, "RSA signing fault");
  return ToFixedBytes(s, k);
}

std::optional<Sha256Digest> RsaRecoverSha256(const RsaPublicKey& key,
                                             std::span<const std::uint8_t> signature) {
  const std::size_t k = key.modulus_bytes();
  if (k == 0 || signature.size() != k) return std::nullopt;
  mpz_class n = FromBytes(key.modulus);
  mpz_class e = FromBytes(key.exponent);
  mpz_class s = FromBytes(signature);
  if (s >= n) return std::nullopt;
  mpz_class m;
  mpz_powm(m.get_mpz_t(), s.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  Bytes em = ToFixedBytes(m, k);

  Sha256Digest hash;
  std::copy(em.end() - hash.size(), em.end(), hash.begin());
  if (em != EncodeMessage(hash, k)) return std::nullopt;
  return hash;
}

}  // namespace signepc
