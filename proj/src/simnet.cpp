#include "signepc/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "signepc/error.hpp"

namespace signepc {

std::uint64_t SimReport::EpcdsInbound() const {
  auto it = inbound.find(EpcdsNodeId());
  if (it == inbound.end()) return 0;
  std::uint64_t n = 0;
  for (auto c : it->second) n += c;
  return n;
}

double SimReport::EpcdsUtilization() const {
  return duration > 0 ? static_cast<double>(epcds_busy_in_window) / static_cast<double>(duration)
                      : 0.0;
}

double SimReport::EpcdsMeanQueue() const {
  return duration > 0 ? epcds_area_in_window / static_cast<double>(duration) : 0.0;
}

double SimReport::EpcdsInitialQueue() const {
  return duration > 0 ? epcds_area_first_tenth / (static_cast<double>(duration) / 10.0) : 0.0;
}

double SimReport::EpcdsFinalQueue() const {
  return duration > 0 ? epcds_area_last_tenth / (static_cast<double>(duration) / 10.0) : 0.0;
}

double SimReport::EpcdsMeanSojournMs() const {
  return epcds_served > 0 ? epcds_sojourn_total_ms / static_cast<double>(epcds_served) : 0.0;
}

std::uint64_t SimReport::EpcisCompleted() const {
  std::uint64_t n = epcis_accepted;
  for (const auto& [reason, count] : epcis_rejected) n += count;
  return n;
}

double Mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double Percentile(std::vector<double> xs, double p) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(xs.size())));
  rank = std::clamp<std::size_t>(rank, 1, xs.size());
  return xs[rank - 1];
}

namespace {

constexpr Micros kSecond = 1'000'000;

double ToMs(Micros us) { return static_cast<double>(us) / 1000.0; }

// Independent stream per purpose, derived from the run seed and a label so
// that adding traffic on one link never perturbs another.
std::mt19937_64 Stream(std::uint64_t seed, const std::string& label) {
  Bytes material(8);
  for (int i = 0; i < 8; ++i) material[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  material.insert(material.end(), label.begin(), label.end());
  auto h = Sha256(material);
  std::uint64_t s = 0;
  for (int i = 0; i < 8; ++i) s = s << 8 | h[i];
  return std::mt19937_64(s);
}

// Uniform in [0, 1) from 53 random bits; identical on every platform.
double Unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double Overlap(Micros a, Micros b, Micros lo, Micros hi) {
  return static_cast<double>(std::max<Micros>(0, std::min(b, hi) - std::max(a, lo)));
}

struct Deliver {
  Message msg;
};
struct Arrival {
  std::size_t user = 0;
};
struct AttackStart {
  std::size_t attack = 0;
};
struct EpcdsDone {};
struct EpcisDone {
  NodeId node;
  Message msg;
  Micros received = 0;
};
struct SendLater {
  Message msg;
};

using Action = std::variant<Deliver, Arrival, AttackStart, EpcdsDone, EpcisDone, SendLater>;

struct Event {
  Micros time = 0;
  std::uint64_t seq = 0;
  Action action;
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct Transaction {
  std::size_t user = 0;
  Micros started = 0;
  std::size_t expected = 0;
  std::size_t received = 0;
  bool discovery_done = false;
  std::optional<std::size_t> captured_by;  // attack index
};

struct Queued {
  Message msg;
  Micros arrived = 0;
};

}  // namespace

struct Simulator::Impl {
  ScenarioConfig cfg;
  EpcdsState epcds;
  std::map<NodeId, EpcisState> epcis;
  std::vector<std::vector<EpcCode>> user_epcs;
  std::vector<std::mt19937_64> arrival_rng;
  std::vector<std::mt19937_64> choice_rng;
  std::map<std::pair<NodeId, NodeId>, std::mt19937_64> link_rng;
  std::optional<SigningKey> forging_key;
  Drbg attack_rng{0};

  std::priority_queue<Event, std::vector<Event>, EventOrder> events;
  std::uint64_t next_seq = 0;
  Micros now = 0;
  Micros accounted_until = 0;
  Micros next_sample = 0;
  Micros sample_interval = 0;
  Micros last_event = 0;

  std::deque<Queued> epcds_queue;
  bool epcds_busy = false;

  std::uint64_t next_txn = 1;
  std::map<std::uint64_t, Transaction> txns;
  std::map<std::uint64_t, AttackKind> attack_txns;
  std::map<std::pair<NodeId, std::uint64_t>, Micros> pending_checks;

  SimReport report;

  explicit Impl(ScenarioConfig c) : cfg(std::move(c)) {
    ValidateScenario(cfg);
    report.duration = cfg.duration;
    sample_interval =
        cfg.queue_sample_interval > 0 ? cfg.queue_sample_interval : std::max<Micros>(1, cfg.duration / 100);

    NodeConfig node_cfg{cfg.model, cfg.window, cfg.service_times, cfg.crypto};
    epcds.registry = BuildRegistry(cfg);
    epcds.config = node_cfg;
    if (cfg.model == AccessModel::kSignEpc && cfg.crypto == CryptoMode::kReal) {
      KeyGenOptions opts;
      opts.modulus_bits = cfg.key.bits;
      opts.created_at = cfg.start_time;
      opts.valid_until = cfg.key.valid_until.value_or(cfg.start_time + 365 * 86400);
      opts.seed = cfg.key.seed;
      epcds.key = GenerateKeyPair(opts);
    }

    auto all_events = ScenarioEvents(cfg);
    for (const auto& c : cfg.companies) {
      EpcisState st;
      st.id = EpcisNodeId(c.id);
      st.company = c.id;
      st.url = c.url;
      st.config = node_cfg;
      for (const auto& ev : all_events) {
        if (ev.company == c.id) st.events.push_back(ev);
      }
      if (epcds.key) st.trusted.Add(epcds.key->public_key, epcds.key->valid_until);
      epcis.emplace(st.id, std::move(st));
    }

    const auto published = epcds.registry.Epcs();
    for (std::size_t i = 0; i < cfg.users.size(); ++i) {
      const auto& u = cfg.users[i];
      user_epcs.push_back(u.epcs.empty() ? published : u.epcs);
      arrival_rng.push_back(Stream(cfg.seed, "arrival:" + u.id.value()));
      choice_rng.push_back(Stream(cfg.seed, "epc:" + u.id.value()));
      if (u.rate > 0 && !user_epcs.back().empty()) {
        Micros first = 0;
        if (cfg.arrivals == ArrivalProcess::kFixedInterval) {
          first = FixedInterval(u.rate) * static_cast<Micros>(i) /
                  static_cast<Micros>(cfg.users.size());
        } else {
          first = PoissonGap(i);
        }
        if (first < cfg.duration) Schedule(first, Arrival{i});
      }
    }

    bool needs_forger = false;
    for (std::size_t i = 0; i < cfg.attacks.size(); ++i) {
      Schedule(cfg.attacks[i].at, AttackStart{i});
      needs_forger |= cfg.attacks[i].kind == AttackKind::kForgeSignature;
    }
    if (needs_forger) {
      KeyGenOptions opts;
      opts.modulus_bits = cfg.key.bits;
      opts.created_at = cfg.start_time;
      opts.valid_until = cfg.start_time + 365 * 86400;
      opts.seed = cfg.key.seed ^ 0x5eed'f0f0'f0f0'f0f0ULL;
      forging_key = GenerateKeyPair(opts).private_key;
    }
    attack_rng = Drbg(cfg.seed ^ 0xa77ac4ULL);
  }

  static Micros FixedInterval(double rate) {
    return std::max<Micros>(1, static_cast<Micros>(std::llround(1e6 / rate)));
  }

  Micros PoissonGap(std::size_t user) {
    double u = Unit(arrival_rng[user]);
    double gap_s = -std::log1p(-u) / cfg.users[user].rate;
    return std::max<Micros>(1, static_cast<Micros>(std::llround(gap_s * 1e6)));
  }

  Timestamp Wall(Micros t) const { return cfg.start_time + t / kSecond; }

  void Schedule(Micros t, Action a) { events.push(Event{t, next_seq++, std::move(a)}); }

  // Integrates queue length and busy time up to t.
  void Account(Micros t) {
    if (t <= accounted_until) return;
    const Micros a = accounted_until;
    const double len = static_cast<double>(epcds_queue.size());
    const Micros d = cfg.duration;
    while (next_sample <= t && next_sample <= d) {
      report.epcds_queue_series.push_back({next_sample, epcds_queue.size()});
      next_sample += sample_interval;
    }
    report.epcds_area_total += len * static_cast<double>(t - a);
    report.epcds_area_in_window += len * Overlap(a, t, 0, d);
    report.epcds_area_first_tenth += len * Overlap(a, t, 0, d / 10);
    report.epcds_area_last_tenth += len * Overlap(a, t, d - d / 10, d);
    if (epcds_busy) report.epcds_busy_in_window += static_cast<Micros>(Overlap(a, t, 0, d));
    accounted_until = t;
  }

  Micros Latency(const NodeId& from, const NodeId& to) {
    if (cfg.latency.jitter == 0) return cfg.latency.base;
    auto key = std::make_pair(from, to);
    auto it = link_rng.find(key);
    if (it == link_rng.end()) {
      it = link_rng.emplace(key, Stream(cfg.seed, "link:" + from + ">" + to)).first;
    }
    return cfg.latency.base + static_cast<Micros>(Unit(it->second) *
                                                  static_cast<double>(cfg.latency.jitter + 1));
  }

  void Send(Message msg) {
    ++report.messages_sent;
    ++report.messages_in_flight;
    Micros at = now + Latency(msg.sender, msg.recipient);
    Schedule(at, Deliver{std::move(msg)});
  }

  Micros EpcdsServiceTime(const Message& msg) const {
    const auto& st = cfg.service_times;
    switch (msg.kind()) {
      case MessageKind::kUserQueryDs:
        if (cfg.model == AccessModel::kDirectoryOpen) return st.db_lookup;
        // One signing charge per discovery response, however many grants.
        return st.db_lookup + st.policy_check + (cfg.model == AccessModel::kSignEpc ? st.sign : 0);
      case MessageKind::kAccessCheckRequest:
        return st.db_lookup + st.policy_check;
      case MessageKind::kChallenge:
        return st.sign;
      default:
        return 0;
    }
  }

  Micros EpcisServiceTime(const Message& msg) const {
    const auto& st = cfg.service_times;
    switch (msg.kind()) {
      case MessageKind::kUserQueryIs:
        switch (cfg.model) {
          case AccessModel::kDirectoryOpen: return st.db_lookup;
          case AccessModel::kSignEpc: return st.verify + st.db_lookup;
          case AccessModel::kSecureEpcds: return st.remote_check_roundtrip;
        }
        return 0;
      case MessageKind::kAccessCheckResponse:
        return st.db_lookup;
      case MessageKind::kChallengeResponse:
        return st.verify;
      default:
        return 0;
    }
  }

  void StartEpcdsService() {
    epcds_busy = true;
    Schedule(now + EpcdsServiceTime(epcds_queue.front().msg), EpcdsDone{});
  }

  void OnDeliver(Message msg) {
    --report.messages_in_flight;
    ++report.messages_delivered;
    report.inbound[msg.recipient][static_cast<std::size_t>(msg.kind())]++;
    if (msg.recipient == EpcdsNodeId()) {
      ++report.epcds_arrivals;
      epcds_queue.push_back({std::move(msg), now});
      report.epcds_max_queue = std::max<std::uint64_t>(report.epcds_max_queue, epcds_queue.size());
      if (!epcds_busy) StartEpcdsService();
    } else if (epcis.contains(msg.recipient)) {
      Micros service = EpcisServiceTime(msg);
      NodeId node = msg.recipient;
      Schedule(now + service, EpcisDone{std::move(node), std::move(msg), now});
    } else {
      OnUserMessage(msg);
    }
  }

  void OnEpcdsDone() {
    Queued q = std::move(epcds_queue.front());
    epcds_queue.pop_front();
    ++report.epcds_served;
    const double sojourn = ToMs(now - q.arrived);
    report.epcds_sojourn_total_ms += sojourn;
    if (q.msg.kind() == MessageKind::kUserQueryDs) report.issuance_latency_ms.push_back(sojourn);
    auto out = EpcdsHandleMessage(epcds, q.msg, Wall(now));
    report.epcds_tallies = epcds.tallies;
    for (auto& m : out) Send(std::move(m));
    if (!epcds_queue.empty()) {
      StartEpcdsService();
    } else {
      epcds_busy = false;
    }
  }

  void OnEpcisDone(EpcisDone& done) {
    EpcisState& st = epcis.at(done.node);
    Micros received = done.received;
    if (done.msg.kind() == MessageKind::kAccessCheckResponse) {
      auto key = std::make_pair(done.node, std::get<AccessCheckResponse>(done.msg.payload).check_id);
      auto it = pending_checks.find(key);
      if (it != pending_checks.end()) {
        received = it->second;
        pending_checks.erase(it);
      }
    }
    auto before = st.tallies;
    auto out = EpcisHandleMessage(st, done.msg, Wall(now));
    report.epcis_tallies.verifies += st.tallies.verifies - before.verifies;
    for (auto& m : out) {
      switch (m.kind()) {
        case MessageKind::kAccessCheckRequest:
          pending_checks[{done.node, std::get<AccessCheckRequest>(m.payload).check_id}] = received;
          break;
        case MessageKind::kIsResponse:
          ++report.epcis_accepted;
          report.authorization_latency_ms.push_back(ToMs(now - received));
          break;
        case MessageKind::kErrorResponse:
          ++report.epcis_rejected[std::string(
              DenyReasonName(std::get<ErrorResponse>(m.payload).reason))];
          report.authorization_latency_ms.push_back(ToMs(now - received));
          break;
        default:
          break;
      }
      Send(std::move(m));
    }
  }

  std::uint64_t StartTransaction(std::size_t user, const EpcCode& epc) {
    const std::uint64_t txn = next_txn++;
    txns[txn] = Transaction{user, now, 0, 0, false, std::nullopt};
    ++report.transactions_started;
    const UserId& id = cfg.users[user].id;
    Send({UserNodeId(id), EpcdsNodeId(), UserQueryDs{txn, id, epc}});
    return txn;
  }

  void OnArrival(std::size_t user) {
    const auto& epcs = user_epcs[user];
    auto idx = static_cast<std::size_t>(Unit(choice_rng[user]) * static_cast<double>(epcs.size()));
    StartTransaction(user, epcs[std::min(idx, epcs.size() - 1)]);
    Micros gap = cfg.arrivals == ArrivalProcess::kFixedInterval ? FixedInterval(cfg.users[user].rate)
                                                                : PoissonGap(user);
    if (now + gap < cfg.duration) Schedule(now + gap, Arrival{user});
  }

  void OnAttackStart(std::size_t attack) {
    const AttackSpec& spec = cfg.attacks[attack];
    std::size_t victim = 0;
    while (cfg.users[victim].id != spec.victim) ++victim;
    std::uint64_t txn = StartTransaction(victim, spec.epc);
    txns[txn].captured_by = attack;
  }

  void LaunchAttack(std::size_t attack, const DsResponse& captured) {
    const AttackSpec& spec = cfg.attacks[attack];
    auto& outcome = report.attacks[std::string(AttackKindName(spec.kind))];
    ++outcome.launched;
    AttackContext ctx{cfg.window, forging_key ? &*forging_key : nullptr, &attack_rng};
    Micros send_at = now;
    if (spec.kind == AttackKind::kReuseExpired) {
      // Wait for the verifier's window to roll over.
      const std::int64_t w = cfg.window.window_seconds();
      const Timestamp next_window = (Wall(now) / w + 1) * w;
      send_at = (next_window - cfg.start_time) * kSecond;
    }
    Message m = AttackerAction(spec.kind, captured, spec.attacker, Wall(send_at), ctx);
    auto& q = std::get<UserQueryIs>(m.payload);
    q.txn = next_txn++;
    attack_txns[q.txn] = spec.kind;
    if (send_at == now) {
      Send(std::move(m));
    } else {
      Schedule(send_at, SendLater{std::move(m)});
    }
  }

  void Complete(std::uint64_t txn) {
    auto it = txns.find(txn);
    ++report.transactions_completed;
    report.transaction_latency_ms.push_back(ToMs(now - it->second.started));
    txns.erase(it);
  }

  void OnUserMessage(const Message& msg) {
    std::uint64_t txn = std::visit(
        [](const auto& p) -> std::uint64_t {
          if constexpr (requires { p.txn; }) return p.txn;
          return 0;
        },
        msg.payload);

    if (auto at = attack_txns.find(txn); at != attack_txns.end()) {
      auto& outcome = report.attacks[std::string(AttackKindName(at->second))];
      if (msg.kind() == MessageKind::kIsResponse) {
        ++outcome.accepted;
      } else if (const auto* err = std::get_if<ErrorResponse>(&msg.payload)) {
        ++outcome.rejected[std::string(DenyReasonName(err->reason))];
      }
      attack_txns.erase(at);
      return;
    }

    auto it = txns.find(txn);
    if (it == txns.end()) return;
    Transaction& t = it->second;
    if (!t.discovery_done) {
      t.discovery_done = true;
      if (const auto* resp = std::get_if<DsResponse>(&msg.payload)) {
        if (t.captured_by) LaunchAttack(*t.captured_by, *resp);
        const UserId& user = cfg.users[t.user].id;
        t.expected = std::min<std::size_t>(static_cast<std::size_t>(cfg.k), resp->grants.size());
        for (std::size_t i = 0; i < t.expected; ++i) {
          const Grant& g = resp->grants[i];
          Send({UserNodeId(user), EpcisNodeId(g.company),
                UserQueryIs{txn, user, resp->epc, g.rights, g.tag}});
        }
        if (t.expected == 0) Complete(txn);
      } else {
        ++report.transactions_denied_at_discovery;
        Complete(txn);
      }
      return;
    }
    if (++t.received == t.expected) Complete(txn);
  }

  void Step() {
    Event ev = events.top();
    events.pop();
    Account(ev.time);
    now = ev.time;
    last_event = ev.time;
    std::visit(
        [&](auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Deliver>) OnDeliver(std::move(a.msg));
          else if constexpr (std::is_same_v<T, Arrival>) OnArrival(a.user);
          else if constexpr (std::is_same_v<T, AttackStart>) OnAttackStart(a.attack);
          else if constexpr (std::is_same_v<T, EpcdsDone>) OnEpcdsDone();
          else if constexpr (std::is_same_v<T, EpcisDone>) OnEpcisDone(a);
          else if constexpr (std::is_same_v<T, SendLater>) Send(std::move(a.msg));
        },
        ev.action);
  }

  void RunUntil(Micros t) {
    while (!events.empty() && events.top().time <= t) Step();
    if (t > now) {
      Account(t);
      now = t;
    }
  }

  void Run() {
    if (cfg.drain) {
      while (!events.empty()) Step();
      // Queue accounting always covers the whole arrival window.
      Account(cfg.duration);
      // The clock may have been stepped past the last event; the finished
      // report does not depend on how it was driven.
      now = std::max(last_event, cfg.duration);
      return;
    }
    RunUntil(cfg.duration);
    now = cfg.duration;
    // Whatever is still on the wire is dropped.
    report.messages_dropped += report.messages_in_flight;
    report.messages_in_flight = 0;
    while (!events.empty()) events.pop();
  }
};

Simulator::Simulator(ScenarioConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Simulator::~Simulator() = default;

void Simulator::RunUntil(Micros t) { impl_->RunUntil(t); }
void Simulator::Run() { impl_->Run(); }
bool Simulator::done() const { return impl_->events.empty(); }
Micros Simulator::now() const { return impl_->now; }

SimReport Simulator::Snapshot() const {
  SimReport r = impl_->report;
  r.virtual_time = impl_->now;
  return r;
}

SimReport RunScenario(const ScenarioConfig& cfg) {
  Simulator sim(cfg);
  sim.Run();
  return sim.Snapshot();
}

nlohmann::json ReportToJson(const SimReport& r) {
  using nlohmann::json;
  json j;
  j["virtual_time_ms"] = ToMs(r.virtual_time);
  j["duration_ms"] = ToMs(r.duration);
  json inbound = json::object();
  for (const auto& [node, counts] : r.inbound) {
    json per = json::object();
    for (int k = 0; k < kMessageKindCount; ++k) {
      if (counts[k] != 0) per[std::string(MessageKindName(static_cast<MessageKind>(k)))] = counts[k];
    }
    inbound[node] = per;
  }
  j["inbound"] = inbound;
  j["messages"] = {{"sent", r.messages_sent},
                   {"delivered", r.messages_delivered},
                   {"dropped", r.messages_dropped},
                   {"in_flight", r.messages_in_flight}};
  j["transactions"] = {{"started", r.transactions_started},
                       {"completed", r.transactions_completed},
                       {"denied_at_discovery", r.transactions_denied_at_discovery},
                       {"latency_ms", r.transaction_latency_ms}};
  j["issuance_latency_ms"] = r.issuance_latency_ms;
  j["authorization_latency_ms"] = r.authorization_latency_ms;
  j["epcis_outcomes"] = {{"accepted", r.epcis_accepted}, {"rejected", r.epcis_rejected}};
  auto tallies = [](const NodeTallies& t) {
    return json{{"signs", t.signs}, {"verifies", t.verifies}, {"policy_checks", t.policy_checks}};
  };
  j["crypto"] = {{"epcds", tallies(r.epcds_tallies)}, {"epcis", tallies(r.epcis_tallies)}};
  json series = json::array();
  for (const auto& s : r.epcds_queue_series) series.push_back({ToMs(s.time), s.length});
  j["epcds"] = {{"inbound", r.EpcdsInbound()},
                {"arrivals", r.epcds_arrivals},
                {"served", r.epcds_served},
                {"utilization", r.EpcdsUtilization()},
                {"mean_queue", r.EpcdsMeanQueue()},
                {"initial_queue", r.EpcdsInitialQueue()},
                {"final_queue", r.EpcdsFinalQueue()},
                {"max_queue", r.epcds_max_queue},
                {"mean_sojourn_ms", r.EpcdsMeanSojournMs()},
                {"queue_series", series}};
  json attacks = json::object();
  for (const auto& [kind, o] : r.attacks) {
    attacks[kind] = {{"launched", o.launched}, {"accepted", o.accepted}, {"rejected", o.rejected}};
  }
  j["attacks"] = attacks;
  return j;
}

std::string ReportToCsv(const SimReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "metric,value\n";
  out << "duration_ms," << ToMs(r.duration) << "\n";
  out << "messages_sent," << r.messages_sent << "\n";
  out << "messages_delivered," << r.messages_delivered << "\n";
  out << "messages_dropped," << r.messages_dropped << "\n";
  out << "transactions_started," << r.transactions_started << "\n";
  out << "transactions_completed," << r.transactions_completed << "\n";
  out << "transactions_denied_at_discovery," << r.transactions_denied_at_discovery << "\n";
  out << "transaction_latency_mean_ms," << Mean(r.transaction_latency_ms) << "\n";
  out << "issuance_latency_mean_ms," << Mean(r.issuance_latency_ms) << "\n";
  out << "authorization_latency_mean_ms," << Mean(r.authorization_latency_ms) << "\n";
  out << "authorization_latency_p95_ms," << Percentile(r.authorization_latency_ms, 95) << "\n";
  out << "epcis_accepted," << r.epcis_accepted << "\n";
  for (const auto& [reason, n] : r.epcis_rejected) out << "epcis_rejected_" << reason << "," << n << "\n";
  out << "epcds_inbound," << r.EpcdsInbound() << "\n";
  out << "epcds_utilization," << r.EpcdsUtilization() << "\n";
  out << "epcds_mean_queue," << r.EpcdsMeanQueue() << "\n";
  out << "epcds_max_queue," << r.epcds_max_queue << "\n";
  out << "epcds_signs," << r.epcds_tallies.signs << "\n";
  out << "epcis_verifies," << r.epcis_tallies.verifies << "\n";
  for (const auto& [kind, o] : r.attacks) {
    out << "attack_" << kind << "_launched," << o.launched << "\n";
    out << "attack_" << kind << "_accepted," << o.accepted << "\n";
  }
  out << "\nnode,kind,count\n";
  for (const auto& [node, counts] : r.inbound) {
    for (int k = 0; k < kMessageKindCount; ++k) {
      if (counts[k] != 0) {
        out << node << "," << MessageKindName(static_cast<MessageKind>(k)) << "," << counts[k] << "\n";
      }
    }
  }
  return out.str();
}

std::vector<ComparisonRow> CompareModels(const ScenarioConfig& base, const std::vector<int>& ks) {
  std::vector<ComparisonRow> rows;
  for (int k : ks) {
    for (AccessModel model : {AccessModel::kSecureEpcds, AccessModel::kSignEpc}) {
      ScenarioConfig cfg = base;
      cfg.k = k;
      cfg.model = model;
      cfg.attacks.clear();
      SimReport r = RunScenario(cfg);
      rows.push_back({model, k, r.transactions_completed, r.EpcdsInbound(),
                      Mean(r.authorization_latency_ms), Percentile(r.authorization_latency_ms, 95),
                      Mean(r.issuance_latency_ms), r.EpcdsUtilization(), r.EpcdsMeanQueue()});
    }
  }
  return rows;
}

std::string ComparisonToCsv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "model,k,transactions,epcds_inbound,auth_latency_mean_ms,auth_latency_p95_ms,"
         "issuance_latency_mean_ms,epcds_utilization,epcds_mean_queue\n";
  for (const auto& r : rows) {
    out << AccessModelName(r.model) << "," << r.k << "," << r.transactions << "," << r.epcds_inbound
        << "," << r.auth_latency_mean_ms << "," << r.auth_latency_p95_ms << ","
        << r.issuance_latency_mean_ms << "," << r.epcds_utilization << "," << r.epcds_mean_queue
        << "\n";
  }
  return out.str();
}

}  // namespace signepc
