#include <gtest/gtest.h>

#include "signepc/simnet.hpp"
#include "test_support.hpp"

namespace signepc {
namespace {

using testing::FanOutScenario;

constexpr Micros kSec = 1'000'000;

TEST(SimnetTest, SecureEpcdsInboundIsQTimesOnePlusK) {
  for (int k : {1, 3, 5}) {
    auto r = RunScenario(FanOutScenario(AccessModel::kSecureEpcds, k, 6, 10, 10 * kSec));
    EXPECT_EQ(r.transactions_started, 100u);
    EXPECT_EQ(r.EpcdsInbound(), 100u * (1 + k)) << k;
    EXPECT_EQ(r.epcis_accepted, 100u * k);
  }
}

TEST(SimnetTest, SignEpcInboundIsQ) {
  for (int k : {1, 3, 5}) {
    auto r = RunScenario(FanOutScenario(AccessModel::kSignEpc, k, 6, 10, 10 * kSec));
    EXPECT_EQ(r.EpcdsInbound(), 100u) << k;
    EXPECT_EQ(r.epcis_accepted, 100u * k);
    EXPECT_EQ(r.epcds_tallies.signs, 600u);  // one tag per published grant
  }
}

TEST(SimnetTest, KLargerThanGrantsContactsAll) {
  auto r = RunScenario(FanOutScenario(AccessModel::kSecureEpcds, 10, 3, 10, 1 * kSec));
  EXPECT_EQ(r.EpcdsInbound(), 10u * (1 + 3));
}

TEST(SimnetTest, ZeroRateIsQuiet) {
  auto cfg = FanOutScenario(AccessModel::kSignEpc, 1, 2, 0, 5 * kSec);
  auto r = RunScenario(cfg);
  EXPECT_EQ(r.messages_sent, 0u);
  EXPECT_EQ(r.EpcdsInbound(), 0u);
  EXPECT_EQ(r.transactions_started, 0u);
}

TEST(SimnetTest, SameSeedSameReport) {
  auto cfg = FanOutScenario(AccessModel::kSecureEpcds, 2, 4, 30, 5 * kSec);
  cfg.arrivals = ArrivalProcess::kPoisson;
  cfg.latency.jitter = 5000;
  auto a = RunScenario(cfg);
  auto b = RunScenario(cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ReportToJson(a).dump(), ReportToJson(b).dump());
  EXPECT_EQ(ReportToCsv(a), ReportToCsv(b));
  cfg.seed = 2;
  EXPECT_NE(RunScenario(cfg).transaction_latency_ms, a.transaction_latency_ms);
}

TEST(SimnetTest, SnapshotsMonotoneAndFinalMatches) {
  auto cfg = FanOutScenario(AccessModel::kSecureEpcds, 2, 4, 30, 5 * kSec);
  cfg.arrivals = ArrivalProcess::kPoisson;
  Simulator sim(cfg);
  SimReport prev = sim.Snapshot();
  for (Micros t = kSec / 2; !sim.done(); t += kSec / 2) {
    sim.RunUntil(t);
    SimReport cur = sim.Snapshot();
    EXPECT_GE(cur.messages_sent, prev.messages_sent);
    EXPECT_GE(cur.messages_delivered, prev.messages_delivered);
    EXPECT_GE(cur.transactions_completed, prev.transactions_completed);
    EXPECT_GE(cur.EpcdsInbound(), prev.EpcdsInbound());
    EXPECT_LE(sim.now(), t);
    prev = cur;
  }
  sim.Run();
  EXPECT_EQ(sim.Snapshot(), RunScenario(cfg));
}

TEST(SimnetTest, MessageConservation) {
  auto cfg = FanOutScenario(AccessModel::kSignEpc, 3, 4, 40, 3 * kSec);
  cfg.arrivals = ArrivalProcess::kPoisson;
  Simulator sim(cfg);
  sim.RunUntil(kSec);
  auto mid = sim.Snapshot();
  EXPECT_EQ(mid.messages_sent,
            mid.messages_delivered + mid.messages_dropped + mid.messages_in_flight);
  sim.Run();
  auto end = sim.Snapshot();
  EXPECT_EQ(end.messages_in_flight, 0u);
  EXPECT_EQ(end.messages_sent, end.messages_delivered + end.messages_dropped);
  EXPECT_EQ(end.transactions_started, end.transactions_completed);
}

TEST(SimnetTest, LatencyRespectsCausality) {
  auto cfg = FanOutScenario(AccessModel::kSecureEpcds, 1, 2, 5, 2 * kSec);
  auto r = RunScenario(cfg);
  // user->DS->user->IS->DS->IS->user: six one-way hops plus service time
  const auto& st = cfg.service_times;
  double floor_ms = (6 * cfg.latency.base + 2 * st.db_lookup + 2 * st.policy_check +
                     st.db_lookup) / 1000.0;
  ASSERT_FALSE(r.transaction_latency_ms.empty());
  for (double ms : r.transaction_latency_ms) EXPECT_GE(ms, floor_ms);
  for (std::size_t i = 1; i < r.epcds_queue_series.size(); ++i) {
    EXPECT_LT(r.epcds_queue_series[i - 1].time, r.epcds_queue_series[i].time);
  }
}

TEST(SimnetTest, LittlesLaw) {
  auto cfg = FanOutScenario(AccessModel::kSecureEpcds, 3, 4, 60, 20 * kSec);
  cfg.arrivals = ArrivalProcess::kPoisson;
  auto r = RunScenario(cfg);
  double T = static_cast<double>(r.virtual_time);
  double L = r.epcds_area_total / T;
  double lambda = static_cast<double>(r.epcds_served) / T;  // per us
  double W = r.EpcdsMeanSojournMs() * 1000.0;
  ASSERT_GT(L, 0);
  EXPECT_NEAR(L, lambda * W, 0.1 * L);
}

TEST(SimnetTest, OverloadBuildsQueueOnlyUnderSecure) {
  auto secure = RunScenario(FanOutScenario(AccessModel::kSecureEpcds, 25, 25, 50, 20 * kSec));
  auto sign = RunScenario(FanOutScenario(AccessModel::kSignEpc, 25, 25, 50, 20 * kSec));
  EXPECT_GT(secure.EpcdsFinalQueue(), 10 * std::max(secure.EpcdsInitialQueue(), 1e-9));
  EXPECT_LT(sign.EpcdsFinalQueue(), 2 * std::max(sign.EpcdsInitialQueue(), 1e-9));
  EXPECT_GT(secure.EpcdsUtilization(), 0.99);
  EXPECT_LT(sign.EpcdsUtilization(), 0.5);
}

TEST(SimnetTest, CompareModelsTrends) {
  auto base = FanOutScenario(AccessModel::kSignEpc, 1, 25, 5, 10 * kSec);
  auto rows = CompareModels(base, {1, 5, 25});
  ASSERT_EQ(rows.size(), 6u);
  std::vector<ComparisonRow> secure, sign;
  for (const auto& r : rows) (r.model == AccessModel::kSecureEpcds ? secure : sign).push_back(r);
  ASSERT_EQ(secure.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GT(secure[i].epcds_utilization, secure[i - 1].epcds_utilization);
    EXPECT_GT(secure[i].epcds_inbound, secure[i - 1].epcds_inbound);
    EXPECT_EQ(sign[i].epcds_inbound, sign[0].epcds_inbound);
  }
  auto csv = ComparisonToCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model,k,transactions,epcds_inbound,auth_latency_mean_ms,auth_latency_p95_ms,"
            "issuance_latency_mean_ms,epcds_utilization,epcds_mean_queue");
}

TEST(SimnetTest, ScenarioAttacksAllRejected) {
  auto cfg = LoadScenarioFile(SIGNEPC_SOURCE_DIR "/scenarios/demo.json");
  auto r = RunScenario(cfg);
  ASSERT_FALSE(r.attacks.empty());
  for (const auto& [kind, o] : r.attacks) {
    EXPECT_GT(o.launched, 0u) << kind;
    EXPECT_EQ(o.accepted, 0u) << kind;
  }
}

TEST(StatsTest, PercentileNearestRank) {
  std::vector<double> xs = {5, 1, 4, 2, 3};
  EXPECT_DOUBLE_EQ(Percentile(xs, 50), 3);
  EXPECT_DOUBLE_EQ(Percentile(xs, 95), 5);
  EXPECT_DOUBLE_EQ(Percentile(xs, 0), 1);
  EXPECT_DOUBLE_EQ(Mean(xs), 3);
  EXPECT_DOUBLE_EQ(Mean({}), 0);
}

}  // namespace
}  // namespace signepc
