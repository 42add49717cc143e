#include <gtest/gtest.h>

#include "signepc/error.hpp"
#include "signepc/pki.hpp"
#include "test_support.hpp"

namespace signepc {
namespace {

using testing::FixtureKey;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(KeyGenTest, SeededIsDeterministic) {
  auto a = GenerateKeyPair({2048, 0, 1000, 42, false});
  auto b = GenerateKeyPair({2048, 0, 1000, 42, false});
  EXPECT_EQ(a.public_key, b.public_key);
  EXPECT_EQ(a.private_key, b.private_key);
  auto c = GenerateKeyPair({2048, 0, 1000, 43, false});
  EXPECT_NE(a.public_key.rsa(), c.public_key.rsa());
}

TEST(KeyGenTest, ExactModulusLengthAndSaneKey) {
  const auto& kp = FixtureKey();
  EXPECT_EQ(kp.public_key.rsa().modulus_bits(), 2048u);
  EXPECT_NO_THROW(CheckRsaKey(kp.private_key.rsa()));
  EXPECT_EQ(kp.public_key.key_id(), DeriveKeyId(kp.public_key.rsa()));
  EXPECT_EQ(kp.public_key.key_id().rfind("epcds-", 0), 0u);
}

TEST(KeyGenTest, WeakSizesRefused) {
  EXPECT_EQ(CodeOf([] { GenerateKeyPair({512, 0, 10, 1, false}); }),
            ErrorCode::kWeakKeyRequested);
  EXPECT_EQ(CodeOf([] { GenerateKeyPair({1024, 0, 10, 1, false}); }),
            ErrorCode::kWeakKeyRequested);
  EXPECT_EQ(CodeOf([] { GenerateKeyPair({512, 0, 10, 1, true}); }),
            ErrorCode::kWeakKeyRequested);
  EXPECT_EQ(GenerateKeyPair({1024, 0, 10, 1, true}).public_key.rsa().modulus_bits(), 1024u);
}

TEST(KeyGenTest, ValidityMustBePositive) {
  EXPECT_EQ(CodeOf([] { GenerateKeyPair({2048, 10, 10, 1, false}); }),
            ErrorCode::kInvalidArgument);
}

TEST(KeyGenTest, OsRandomnessDiffers) {
  auto a = GenerateKeyPair({1024, 0, 10, std::nullopt, true});
  auto b = GenerateKeyPair({1024, 0, 10, std::nullopt, true});
  EXPECT_NE(a.public_key.rsa(), b.public_key.rsa());
}

TEST(KeyExpiryTest, InclusiveBound) {
  EXPECT_EQ(CheckKeyExpiry(100, 99), KeyStatus::kValid);
  EXPECT_EQ(CheckKeyExpiry(100, 100), KeyStatus::kValid);
  EXPECT_EQ(CheckKeyExpiry(100, 101), KeyStatus::kExpired);
}

TEST(KeyRingTest, RotationKeepsBothIds) {
  KeyRing ring;
  ring.Add(FixtureKey(0).public_key, 100);
  ring.Add(FixtureKey(1).public_key, 200);
  ASSERT_NE(ring.Find(FixtureKey(0).public_key.key_id()), nullptr);
  EXPECT_EQ(ring.Find(FixtureKey(1).public_key.key_id())->valid_until, 200);
  EXPECT_EQ(ring.Find("epcds-0000"), nullptr);
}

class ChallengeTest : public ::testing::Test {
 protected:
  ChallengeStore store_;
  Drbg rng_{7};
};

TEST_F(ChallengeTest, HonestRoundSucceeds) {
  const auto& kp = FixtureKey();
  auto ch = store_.Issue(rng_, 1000);
  EXPECT_TRUE(store_.Verify(kp.public_key, ch, RespondChallenge(kp.private_key, ch), 1010));
  EXPECT_EQ(store_.outstanding(), 0u);
}

TEST_F(ChallengeTest, WrongPrivateKeyFails) {
  auto ch = store_.Issue(rng_, 1000);
  auto resp = RespondChallenge(FixtureKey(1).private_key, ch);
  EXPECT_FALSE(store_.Verify(FixtureKey(0).public_key, ch, resp, 1000));
}

TEST_F(ChallengeTest, ReuseIsConsumed) {
  const auto& kp = FixtureKey();
  auto ch = store_.Issue(rng_, 1000);
  auto resp = RespondChallenge(kp.private_key, ch);
  EXPECT_TRUE(store_.Verify(kp.public_key, ch, resp, 1000));
  EXPECT_EQ(CodeOf([&] { store_.Verify(kp.public_key, ch, resp, 1000); }),
            ErrorCode::kChallengeConsumed);
}

TEST_F(ChallengeTest, ExpiresAfterTtl) {
  const auto& kp = FixtureKey();
  auto ch = store_.Issue(rng_, 1000);
  auto ok = store_.Issue(rng_, 1000);
  EXPECT_EQ(CodeOf([&] {
              store_.Verify(kp.public_key, ch, RespondChallenge(kp.private_key, ch), 1301);
            }),
            ErrorCode::kChallengeExpired);
  EXPECT_TRUE(store_.Verify(kp.public_key, ok, RespondChallenge(kp.private_key, ok), 1300));
}

TEST_F(ChallengeTest, NoncesAreFresh) {
  auto a = store_.Issue(rng_, 0);
  auto b = store_.Issue(rng_, 0);
  EXPECT_NE(a.nonce, b.nonce);
}

TEST(KeyJsonTest, RoundTrips) {
  const auto& kp = FixtureKey();
  auto trusted = PublicBundleFromJson(PublicBundleToJson(kp.public_key, kp.valid_until));
  EXPECT_EQ(trusted.key, kp.public_key);
  EXPECT_EQ(trusted.valid_until, kp.valid_until);
  auto back = PrivateKeyFromJson(PrivateKeyToJson(kp));
  EXPECT_EQ(back.private_key, kp.private_key);
  EXPECT_EQ(back.created_at, kp.created_at);
}

}  // namespace
}  // namespace signepc
