#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "signepc/error.hpp"
#include "signepc/registry.hpp"
#include "test_support.hpp"

namespace signepc {
namespace {

using testing::Epc;

PublishRecord Rec(const std::string& company, Timestamp t, const std::string& serial = "400") {
  return {Epc(serial), CompanyId(company), t, "https://" + company + ".example/epcis",
          MakeAllPolicy()};
}

std::vector<std::string> Companies(const std::vector<PublishRecord>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(r.company.value());
  return out;
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(ParseEpcTest, AcceptsWellFormed) {
  EXPECT_EQ(ParseEpc("urn:epc:id:sgtin:0614141.112345.400").value(),
            "urn:epc:id:sgtin:0614141.112345.400");
}

TEST(ParseEpcTest, NormalizesPrefixCase) {
  EXPECT_EQ(ParseEpc("URN:EPC:ID:SGTIN:0614141.112345.400"),
            ParseEpc("urn:epc:id:sgtin:0614141.112345.400"));
}

TEST(ParseEpcTest, RejectsEmpty) {
  EXPECT_EQ(CodeOf([] { ParseEpc(""); }), ErrorCode::kMalformedEpc);
}

TEST(ParseEpcTest, RejectsTwoSegments) {
  EXPECT_EQ(CodeOf([] { ParseEpc("urn:epc:id:sgtin:0614141.112345"); }),
            ErrorCode::kMalformedEpc);
}

// Regex oracle for the three-segment pattern, over random near-miss inputs.
TEST(ParseEpcTest, AgreesWithRegexOracle) {
  const std::regex pattern(R"(^urn:epc:id:sgtin:[0-9]+\.[0-9]+\.[0-9]+$)", std::regex::icase);
  const char alphabet[] = "0123456789..a";
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    std::string body;
    std::size_t len = rng() % 14;
    for (std::size_t j = 0; j < len; ++j) body.push_back(alphabet[rng() % (sizeof alphabet - 1)]);
    std::string raw = "urn:epc:id:sgtin:" + body;
    bool oracle = std::regex_match(raw, pattern);
    bool parsed = true;
    try {
      ParseEpc(raw);
    } catch (const Error&) {
      parsed = false;
    }
    EXPECT_EQ(parsed, oracle) << raw;
  }
}

TEST(IdTest, RejectsEmptyAndControlCharacters) {
  EXPECT_EQ(CodeOf([] { UserId(""); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { UserId("bad\nid"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { CompanyId(""); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(UserId("alice").value(), "alice");
}

TEST(PolicyShapeTest, VisibilityOnlyWithLimited) {
  EXPECT_EQ(CodeOf([] { ValidatePolicy({Rule::kAll, Visibility::kUpStream, {}}); }),
            ErrorCode::kInvalidPolicy);
  EXPECT_EQ(CodeOf([] { ValidatePolicy({Rule::kLimited, Visibility::kNotApplicable, {}}); }),
            ErrorCode::kInvalidPolicy);
  EXPECT_NO_THROW(ValidatePolicy(MakeHidePolicy()));
  EXPECT_NO_THROW(ValidatePolicy(MakeLimitedPolicy(Visibility::kDownStream)));
}

TEST(RegistryTest, SingleInsert) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  EXPECT_EQ(Companies(reg.Lookup(Epc())), std::vector<std::string>{"A"});
}

TEST(RegistryTest, OrdersByTime) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  reg.Publish(Rec("B", 200));
  EXPECT_EQ(Companies(reg.Lookup(Epc())), (std::vector<std::string>{"A", "B"}));
}

TEST(RegistryTest, OutOfOrderInsertsSorted) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  reg.Publish(Rec("C", 300));
  reg.Publish(Rec("B", 200));
  EXPECT_EQ(Companies(reg.Lookup(Epc())), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(RegistryTest, RepublishReplaces) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  reg.Publish(Rec("A", 300));
  auto recs = reg.Lookup(Epc());
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].publish_time, 300);
  EXPECT_EQ(reg.size(), 1u);
}

TEST(RegistryTest, UnknownEpcIsEmpty) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  EXPECT_TRUE(reg.Lookup(Epc("999")).empty());
}

TEST(RegistryTest, TimestampCollisionRejectedAndStateKept) {
  PublishRegistry reg;
  reg.Publish(Rec("A", 100));
  EXPECT_EQ(CodeOf([&] { reg.Publish(Rec("B", 100)); }), ErrorCode::kTimestampCollision);
  EXPECT_EQ(Companies(reg.Lookup(Epc())), std::vector<std::string>{"A"});
  // Same time on a different EPC is fine.
  EXPECT_NO_THROW(reg.Publish(Rec("B", 100, "401")));
}

TEST(RegistryTest, UserBinding) {
  PublishRegistry reg;
  reg.BindUser(UserId("alice"), CompanyId("A"));
  EXPECT_EQ(reg.CompanyOf(UserId("alice")), CompanyId("A"));
  EXPECT_FALSE(reg.CompanyOf(UserId("mallory")).has_value());
}

// Random publish sequences: lookup strictly increasing in time, one record
// per company (the latest), identical republish is a no-op.
TEST(RegistryProperty, OrderingReplacementIdempotence) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    PublishRegistry reg;
    std::map<std::string, Timestamp> latest;
    for (int i = 0; i < 20; ++i) {
      std::string company = "C" + std::to_string(rng() % 5);
      Timestamp t = static_cast<Timestamp>(rng() % 50);
      try {
        reg.Publish(Rec(company, t));
        latest[company] = t;
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::kTimestampCollision);
      }
    }
    auto recs = reg.Lookup(Epc());
    ASSERT_EQ(recs.size(), latest.size());
    for (std::size_t i = 1; i < recs.size(); ++i) {
      EXPECT_LT(recs[i - 1].publish_time, recs[i].publish_time);
    }
    for (const auto& r : recs) EXPECT_EQ(r.publish_time, latest[r.company.value()]);

    PublishRegistry again = reg;
    again.Publish(recs.front());
    EXPECT_EQ(again.Lookup(Epc()), recs);
  }
}

}  // namespace
}  // namespace signepc
