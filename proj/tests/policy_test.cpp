#include <gtest/gtest.h>

#include <random>

#include "signepc/error.hpp"
#include "signepc/policy.hpp"
#include "test_support.hpp"

namespace signepc {
namespace {

using testing::Epc;

CompanySet Set(std::initializer_list<const char*> names) {
  CompanySet out;
  for (auto* n : names) out.insert(CompanyId(n));
  return out;
}

class StreamTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Add("A", 100, MakeLimitedPolicy(Visibility::kDownStream, {"location"}));
    Add("B", 200, MakeLimitedPolicy(Visibility::kUpStream));
    Add("C", 300, MakeHidePolicy());
    reg_.BindUser(UserId("ann"), CompanyId("A"));
    reg_.BindUser(UserId("bea"), CompanyId("B"));
    reg_.BindUser(UserId("cid"), CompanyId("C"));
  }

  void Add(const char* company, Timestamp t, AccessPolicy p) {
    reg_.Publish({Epc(), CompanyId(company), t, std::string("https://") + company, std::move(p)});
  }

  GrantDecision Eval(const char* owner, const char* user) {
    const auto* rec = reg_.Find(Epc(), CompanyId(owner));
    return Evaluate(reg_, rec->policy, CompanyId(owner), UserId(user), Epc());
  }

  PublishRegistry reg_;
};

TEST_F(StreamTest, Upstream) {
  EXPECT_EQ(UpstreamSet(reg_, Epc(), CompanyId("B")), Set({"A"}));
  EXPECT_EQ(UpstreamSet(reg_, Epc(), CompanyId("A")), Set({}));
  EXPECT_EQ(UpstreamSet(reg_, Epc(), CompanyId("C")), Set({"A", "B"}));
}

TEST_F(StreamTest, Downstream) {
  EXPECT_EQ(DownstreamSet(reg_, Epc(), CompanyId("B")), Set({"C"}));
  EXPECT_EQ(DownstreamSet(reg_, Epc(), CompanyId("C")), Set({}));
  EXPECT_EQ(DownstreamSet(reg_, Epc(), CompanyId("A")), Set({"B", "C"}));
}

TEST_F(StreamTest, WholeStream) {
  EXPECT_EQ(WholeStreamSet(reg_, Epc(), CompanyId("B")), Set({"A", "C"}));
}

TEST_F(StreamTest, SinglePublisherHasNoPartners) {
  PublishRegistry solo;
  solo.Publish({Epc("1"), CompanyId("A"), 5, "u", MakeAllPolicy()});
  EXPECT_TRUE(WholeStreamSet(solo, Epc("1"), CompanyId("A")).empty());
}

TEST_F(StreamTest, OwnerNotPublished) {
  try {
    UpstreamSet(reg_, Epc(), CompanyId("Z"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOwnerNotPublished);
  }
  EXPECT_THROW(Evaluate(reg_, MakeAllPolicy(), CompanyId("Z"), UserId("ann"), Epc()), Error);
}

TEST_F(StreamTest, HideDeniesEveryone) {
  for (const char* u : {"ann", "bea", "cid", "stranger"}) {
    auto d = Eval("C", u);
    EXPECT_FALSE(d.granted);
    EXPECT_EQ(d.reason, GrantReason::kDeniedHide);
    EXPECT_TRUE(d.scope.empty());
  }
}

// Manufacturer A shares downstream only; retailer C published after A.
TEST_F(StreamTest, DownstreamGrantsLaterPublisher) {
  auto d = Eval("A", "cid");
  EXPECT_TRUE(d.granted);
  EXPECT_EQ(d.reason, GrantReason::kVisibilityMatch);
  EXPECT_EQ(d.scope, AttributeSet{"location"});
}

TEST_F(StreamTest, UpstreamDeniesDownstreamPartner) {
  auto d = Eval("B", "cid");
  EXPECT_FALSE(d.granted);
  EXPECT_EQ(d.reason, GrantReason::kDeniedNotPartner);
  EXPECT_TRUE(Eval("B", "ann").granted);
}

TEST_F(StreamTest, UnknownUserDeniedUnderLimitedOnly) {
  EXPECT_EQ(Eval("A", "stranger").reason, GrantReason::kDeniedUnknownUser);
  auto all = Evaluate(reg_, MakeAllPolicy(), CompanyId("A"), UserId("stranger"), Epc());
  EXPECT_TRUE(all.granted);
  EXPECT_EQ(all.reason, GrantReason::kRuleAll);
}

TEST_F(StreamTest, OwnUsersAreNotPartners) {
  EXPECT_EQ(Eval("A", "ann").reason, GrantReason::kDeniedNotPartner);
}

TEST_F(StreamTest, WholeStreamReason) {
  auto d = Evaluate(reg_, MakeLimitedPolicy(Visibility::kWholeStream), CompanyId("B"),
                    UserId("cid"), Epc());
  EXPECT_TRUE(d.granted);
  EXPECT_EQ(d.reason, GrantReason::kRuleLimitedMember);
}

TEST(PolicyProperty, MatchesLinearScanOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    auto raw = testing::RandomPublishes(rng);
    PublishRegistry reg;
    for (const auto& p : raw) {
      reg.Publish({Epc(), CompanyId(p.company), p.time, "https://" + p.company, p.policy});
      reg.BindUser(UserId("u-" + p.company), CompanyId(p.company));
    }
    for (const auto& owner : raw) {
      const CompanyId oid(owner.company);
      auto up = UpstreamSet(reg, Epc(), oid);
      auto down = DownstreamSet(reg, Epc(), oid);
      auto whole = WholeStreamSet(reg, Epc(), oid);
      CompanySet both = up;
      both.insert(down.begin(), down.end());
      EXPECT_EQ(both, whole);
      EXPECT_EQ(up.size() + down.size(), whole.size());

      std::vector<std::pair<std::string, std::optional<std::string>>> requesters;
      for (const auto& r : raw) requesters.emplace_back("u-" + r.company, r.company);
      requesters.emplace_back("outsider", std::nullopt);
      for (const auto& [user, company] : requesters) {
        auto d = Evaluate(reg, owner.policy, oid, UserId(user), Epc());
        EXPECT_EQ(d.granted, testing::OracleGrant(raw, owner.company, company));
        EXPECT_EQ(d, Evaluate(reg, owner.policy, oid, UserId(user), Epc()));
        if (owner.policy.rule == Rule::kAll) {
          EXPECT_TRUE(d.granted);
        }
        if (owner.policy.rule == Rule::kHide) {
          EXPECT_FALSE(d.granted);
        }
        if (!d.granted) {
          EXPECT_TRUE(d.scope.empty());
        }
      }
    }
  }
}

}  // namespace
}  // namespace signepc
