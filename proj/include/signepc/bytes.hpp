#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signepc {

using Bytes = std::vector<std::uint8_t>;
using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest Sha256(std::span<const std::uint8_t> data);

std::string HexEncode(std::span<const std::uint8_t> data);
Bytes HexDecode(std::string_view hex);  // throws kInvalidArgument

std::string Base64Encode(std::span<const std::uint8_t> data);
Bytes Base64Decode(std::string_view text);  // throws kInvalidArgument

/// Deterministic byte generator: SHA-256 in counter mode over a 32-byte seed.
/// Also usable as a UniformRandomBitGenerator.
class Drbg {
 public:
  using result_type = std::uint64_t;

  explicit Drbg(std::uint64_t seed);
  explicit Drbg(const Sha256Digest& seed) : seed_(seed) {}
  /// Seeded from the operating system's CSPRNG.
  static Drbg FromOs();

  void Fill(std::span<std::uint8_t> out);
  Bytes Take(std::size_t n);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  void Refill();

  Sha256Digest seed_{};
  std::uint64_t counter_ = 0;
  Sha256Digest block_{};
  std::size_t used_ = block_.size();
};

}  // namespace signepc
