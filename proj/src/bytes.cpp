#include "signepc/bytes.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <algorithm>

#include "signepc/error.hpp"

namespace signepc {

Sha256Digest Sha256(std::span<const std::uint8_t> data) {
  Sha256Digest out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

std::string HexEncode(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes HexDecode(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "odd-length hex");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kInvalidArgument, "bad hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string Base64Encode(std::span<const std::uint8_t> data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                          static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kInvalidArgument, "base64 length");
  Bytes out(text.size() / 4 * 3);
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "invalid base64");
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

Drbg::Drbg(std::uint64_t seed) {
  std::array<std::uint8_t, 20> material{'s', 'i', 'g', 'n', 'e', 'p', 'c', '-',
                                        'd', 'r', 'b', 'g'};
  for (int i = 0; i < 8; ++i) material[12 + i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  seed_ = Sha256(material);
}

Drbg Drbg::FromOs() {
  Sha256Digest seed;
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw Error(ErrorCode::kIo, "RAND_bytes failed");
  }
  return Drbg(seed);
}

void Drbg::Refill() {
  std::array<std::uint8_t, 40> input{};
  std::copy(seed_.begin(), seed_.end(), input.begin());
  for (int i = 0; i < 8; ++i) input[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  block_ = Sha256(input);
  used_ = 0;
}

void Drbg::Fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) Refill();
    b = block_[used_++];
  }
}

Bytes Drbg::Take(std::size_t n) {
  Bytes out(n);
  Fill(out);
  return out;
}

Drbg::result_type Drbg::operator()() {
  std::array<std::uint8_t, 8> b;
  Fill(b);
  result_type v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

}  // namespace signepc
