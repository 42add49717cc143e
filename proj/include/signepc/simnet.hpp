#pragma once

#include <array>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "signepc/nodes.hpp"
#include "signepc/scenario.hpp"

namespace signepc {

using KindCounts = std::array<std::uint64_t, kMessageKindCount>;

struct QueueSample {
  Micros time = 0;
  std::uint64_t length = 0;  // messages at EPCDS, waiting or in service
  bool operator==(const QueueSample&) const = default;
};

struct AttackOutcome {
  std::uint64_t launched = 0;
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> rejected;  // by deny reason
  bool operator==(const AttackOutcome&) const = default;
};

/// Counters and samples from one run, or a prefix of one (snapshot).
struct SimReport {
  Micros virtual_time = 0;

  std::map<NodeId, KindCounts> inbound;  // delivered messages per node and kind
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t messages_in_flight = 0;

  std::uint64_t transactions_started = 0;
  std::uint64_t transactions_completed = 0;
  std::uint64_t transactions_denied_at_discovery = 0;
  std::vector<double> transaction_latency_ms;  // end to end
  std::vector<double> issuance_latency_ms;     // EPCDS sojourn of UserQueryDS
  std::vector<double> authorization_latency_ms;  // EPCIS receipt -> EPCIS reply

  std::uint64_t epcis_accepted = 0;
  std::map<std::string, std::uint64_t> epcis_rejected;  // by deny reason

  NodeTallies epcds_tallies;
  NodeTallies epcis_tallies;  // summed over EPCIS nodes

  // EPCDS single-server queue.
  std::uint64_t epcds_arrivals = 0;
  std::uint64_t epcds_served = 0;
  Micros epcds_busy_in_window = 0;      // busy time within [0, duration]
  double epcds_area_in_window = 0;      // integral of queue length over [0, duration], us
  double epcds_area_total = 0;          // integral over the whole run, us
  double epcds_area_first_tenth = 0;    // over [0, duration/10]
  double epcds_area_last_tenth = 0;     // over [0.9 duration, duration]
  double epcds_sojourn_total_ms = 0;    // summed over served messages
  std::uint64_t epcds_max_queue = 0;
  std::vector<QueueSample> epcds_queue_series;

  std::map<std::string, AttackOutcome> attacks;  // by attack kind

  Micros duration = 0;

  std::uint64_t EpcdsInbound() const;
  double EpcdsUtilization() const;
  double EpcdsMeanQueue() const;      // time average over [0, duration]
  double EpcdsInitialQueue() const;   // time average over the first tenth
  double EpcdsFinalQueue() const;     // time average over the last tenth
  double EpcdsMeanSojournMs() const;
  std::uint64_t EpcisCompleted() const;

  bool operator==(const SimReport&) const = default;
};

nlohmann::json ReportToJson(const SimReport& report);
/// Two tables: a metric,value summary and per-node inbound counts.
std::string ReportToCsv(const SimReport& report);

double Mean(const std::vector<double>& xs);
/// Nearest-rank percentile, p in [0, 100].
double Percentile(std::vector<double> xs, double p);

/// Deterministic discrete-event simulation of one scenario. Single-threaded;
/// events run in (fire_time, insertion seq) order.
class Simulator {
 public:
  /// Throws kConfigInvalid.
  explicit Simulator(ScenarioConfig cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Executes every event with fire_time <= t.
  void RunUntil(Micros t);
  /// Runs to the end of the scenario (draining if configured).
  void Run();
  bool done() const;
  Micros now() const;

  /// Read-only view of the counters at the current virtual time.
  SimReport Snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SimReport RunScenario(const ScenarioConfig& cfg);

struct ComparisonRow {
  AccessModel model = AccessModel::kSecureEpcds;
  int k = 1;
  std::uint64_t transactions = 0;
  std::uint64_t epcds_inbound = 0;
  double auth_latency_mean_ms = 0;
  double auth_latency_p95_ms = 0;
  double issuance_latency_mean_ms = 0;
  double epcds_utilization = 0;
  double epcds_mean_queue = 0;
  bool operator==(const ComparisonRow&) const = default;
};

/// Runs Secure EPCDS and SignEPC for each k on the same seed and workload.
std::vector<ComparisonRow> CompareModels(const ScenarioConfig& base, const std::vector<int>& ks);
std::string ComparisonToCsv(const std::vector<ComparisonRow>& rows);

}  // namespace signepc
