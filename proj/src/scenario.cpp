#include "signepc/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "signepc/error.hpp"

namespace signepc {

using nlohmann::json;

void ValidateScenario(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); };
  if (cfg.duration <= 0) fail("duration must be positive");
  if (cfg.k < 1) fail("k must be at least 1");
  if (cfg.start_time < 0) fail("start_time must be non-negative");
  if (cfg.queue_sample_interval < 0) fail("queue_sample_interval must be non-negative");
  if (cfg.latency.base < 0 || cfg.latency.jitter < 0) fail("latency must be non-negative");
  const auto& st = cfg.service_times;
  if (st.policy_check < 0 || st.sign < 0 || st.verify < 0 || st.db_lookup < 0 ||
      st.remote_check_roundtrip < 0) {
    fail("service times must be non-negative");
  }

  std::set<CompanyId> companies;
  std::set<std::string> urls;
  for (const auto& c : cfg.companies) {
    if (!companies.insert(c.id).second) fail("duplicate company " + c.id.value());
    if (c.url.empty()) fail("company " + c.id.value() + " has no url");
    if (!urls.insert(c.url).second) fail("duplicate url " + c.url);
  }
  for (const auto& p : cfg.publishes) {
    if (!companies.contains(p.company)) fail("publish by unknown company " + p.company.value());
  }
  std::set<UserId> users;
  for (const auto& u : cfg.users) {
    if (!users.insert(u.id).second) fail("duplicate user " + u.id.value());
    if (!(u.rate >= 0) || !std::isfinite(u.rate)) fail("user " + u.id.value() + " has bad rate");
    if (u.company && !companies.contains(*u.company)) {
      fail("user " + u.id.value() + " bound to unknown company " + u.company->value());
    }
  }
  for (const auto& a : cfg.attacks) {
    if (cfg.model != AccessModel::kSignEpc) fail("attacks require the sign_epc model");
    if (cfg.crypto != CryptoMode::kReal) fail("attacks require real crypto");
    if (!users.contains(a.victim)) fail("attack victim " + a.victim.value() + " is not a user");
    if (a.attacker == a.victim) fail("attacker and victim must differ");
    if (a.at < 0) fail("attack time must be non-negative");
  }
  if (cfg.model == AccessModel::kSignEpc && cfg.crypto == CryptoMode::kReal &&
      cfg.key.bits < kMinModulusBits) {
    fail("key.bits below " + std::to_string(kMinModulusBits));
  }
  // Registry-level invariants (collisions, policy shape).
  try {
    BuildRegistry(cfg);
  } catch (const Error& e) {
    fail(e.what());
  }
}

PublishRegistry BuildRegistry(const ScenarioConfig& cfg) {
  PublishRegistry reg;
  for (const auto& p : cfg.publishes) reg.Publish(p);
  for (const auto& u : cfg.users) {
    if (u.company) reg.BindUser(u.id, *u.company);
  }
  return reg;
}

std::vector<EventRecord> ScenarioEvents(const ScenarioConfig& cfg) {
  if (!cfg.events.empty()) return cfg.events;
  std::vector<EventRecord> out;
  for (const auto& p : cfg.publishes) {
    out.push_back({p.epc,
                   p.company,
                   p.publish_time,
                   "site-" + p.company.value(),
                   "receiving",
                   {{"warehouse", "wh-" + p.company.value()}, {"quality", "pass"}}});
  }
  return out;
}

namespace {

// ---- JSON pointer -> line index ---------------------------------------------

class LineIndexer {
 public:
  explicit LineIndexer(std::string_view text) : text_(text) {}

  std::map<std::string, int> Run() {
    Ws();
    Value("");
    return lines_;
  }

 private:
  void Ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string String() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    ++pos_;
    return out;
  }

  static std::string Escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out.push_back(c);
    }
    return out;
  }

  void Value(const std::string& ptr) {
    lines_.emplace(ptr, line_);
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      Ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        std::string key = String();
        Ws();
        ++pos_;  // ':'
        Ws();
        Value(ptr + "/" + Escape(key));
        Ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        Ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      Ws();
      int index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        Value(ptr + "/" + std::to_string(index++));
        Ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        Ws();
      }
      ++pos_;
    } else if (c == '"') {
      String();
    } else {
      while (pos_ < text_.size() && !std::strchr(",]} \t\r\n", text_[pos_])) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// ---- Typed reader with pointer tracking ------------------------------------

struct PathError {
  std::string pointer;
  std::string message;
};

class Node {
 public:
  Node(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {}

  [[noreturn]] void Fail(const std::string& msg) const { throw PathError{ptr_, msg}; }

  const std::string& pointer() const { return ptr_; }
  const json& raw() const { return j_; }

  bool Has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node At(const char* key) const {
    if (!j_.is_object()) Fail("expected an object");
    if (!j_.contains(key)) Fail(std::string("missing field '") + key + "'");
    return Node(j_.at(key), ptr_ + "/" + key);
  }

  std::vector<Node> Items() const {
    if (!j_.is_array()) Fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], ptr_ + "/" + std::to_string(i));
    return out;
  }

  std::string Str() const {
    if (!j_.is_string()) Fail("expected a string");
    return j_.get<std::string>();
  }
  double Num() const {
    if (!j_.is_number()) Fail("expected a number");
    return j_.get<double>();
  }
  std::int64_t Int() const {
    if (!j_.is_number_integer()) Fail("expected an integer");
    return j_.get<std::int64_t>();
  }
  bool Bool() const {
    if (!j_.is_boolean()) Fail("expected a boolean");
    return j_.get<bool>();
  }

  // Runs fn, re-anchoring library errors at this node.
  template <typename F>
  auto Guard(F&& fn) const {
    try {
      return fn();
    } catch (const Error& e) {
      Fail(e.what());
    }
  }

 private:
  const json& j_;
  std::string ptr_;
};

Micros Millis(const Node& n) {
  double ms = n.Num();
  if (!(ms >= 0) || !std::isfinite(ms)) n.Fail("expected a non-negative duration");
  return static_cast<Micros>(std::llround(ms * 1000.0));
}

Micros Seconds(const Node& n) {
  double s = n.Num();
  if (!std::isfinite(s)) n.Fail("expected a finite number of seconds");
  return static_cast<Micros>(std::llround(s * 1e6));
}

AccessPolicy ReadPolicy(const Node& n) {
  AccessPolicy p;
  p.rule = n.At("rule").Guard([&] { return ParseRule(n.At("rule").Str()); });
  if (n.Has("visibility")) {
    Node v = n.At("visibility");
    p.visibility = v.Guard([&] { return ParseVisibility(v.Str()); });
  }
  if (n.Has("scope")) {
    for (const auto& s : n.At("scope").Items()) {
      if (!p.scope.insert(s.Str()).second) s.Fail("duplicate scope attribute");
    }
  }
  n.Guard([&] {
    ValidatePolicy(p);
    return 0;
  });
  return p;
}

EpcCode ReadEpc(const Node& n) {
  return n.Guard([&] { return ParseEpc(n.Str()); });
}

ScenarioConfig ReadScenario(const Node& root) {
  ScenarioConfig cfg;
  if (root.At("format").Int() != 1) root.At("format").Fail("unsupported format version");
  if (root.Has("name")) cfg.name = root.At("name").Str();
  {
    Node m = root.At("model");
    cfg.model = m.Guard([&] { return ParseAccessModel(m.Str()); });
  }
  if (root.Has("crypto")) {
    Node c = root.At("crypto");
    std::string s = c.Str();
    if (s == "real") cfg.crypto = CryptoMode::kReal;
    else if (s == "modeled") cfg.crypto = CryptoMode::kModeled;
    else c.Fail("crypto must be 'real' or 'modeled'");
  }
  if (root.Has("seed")) {
    auto s = root.At("seed").Int();
    if (s < 0) root.At("seed").Fail("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root.Has("start_time")) cfg.start_time = root.At("start_time").Int();
  cfg.duration = Seconds(root.At("duration_s"));
  if (cfg.duration <= 0) root.At("duration_s").Fail("must be positive");
  if (root.Has("drain")) cfg.drain = root.At("drain").Bool();
  if (root.Has("k")) {
    auto k = root.At("k").Int();
    if (k < 1 || k > 1'000'000) root.At("k").Fail("must be >= 1");
    cfg.k = static_cast<int>(k);
  }
  if (root.Has("window_seconds")) {
    Node w = root.At("window_seconds");
    cfg.window = w.Guard([&] { return ExpiryWindow(w.Int()); });
  }
  if (root.Has("arrivals")) {
    Node a = root.At("arrivals");
    std::string s = a.Str();
    if (s == "poisson") cfg.arrivals = ArrivalProcess::kPoisson;
    else if (s == "fixed") cfg.arrivals = ArrivalProcess::kFixedInterval;
    else a.Fail("arrivals must be 'poisson' or 'fixed'");
  }
  if (root.Has("latency_ms")) {
    Node l = root.At("latency_ms");
    cfg.latency.base = Millis(l.At("base"));
    if (l.Has("jitter")) cfg.latency.jitter = Millis(l.At("jitter"));
  }
  if (root.Has("service_times_ms")) {
    Node s = root.At("service_times_ms");
    auto& st = cfg.service_times;
    if (s.Has("policy_check")) st.policy_check = Millis(s.At("policy_check"));
    if (s.Has("sign")) st.sign = Millis(s.At("sign"));
    if (s.Has("verify")) st.verify = Millis(s.At("verify"));
    if (s.Has("remote_check_roundtrip")) {
      st.remote_check_roundtrip = Millis(s.At("remote_check_roundtrip"));
    }
    if (s.Has("db_lookup")) st.db_lookup = Millis(s.At("db_lookup"));
  }
  if (root.Has("queue_sample_interval_s")) {
    cfg.queue_sample_interval = Seconds(root.At("queue_sample_interval_s"));
  }
  if (root.Has("key")) {
    Node k = root.At("key");
    if (k.Has("bits")) cfg.key.bits = static_cast<int>(k.At("bits").Int());
    if (k.Has("seed")) cfg.key.seed = static_cast<std::uint64_t>(k.At("seed").Int());
    if (k.Has("valid_until")) cfg.key.valid_until = k.At("valid_until").Int();
  }

  for (const auto& c : root.At("companies").Items()) {
    cfg.companies.push_back(
        {c.At("id").Guard([&] { return CompanyId(c.At("id").Str()); }), c.At("url").Str()});
  }
  for (const auto& p : root.At("publishes").Items()) {
    PublishRecord rec;
    rec.epc = ReadEpc(p.At("epc"));
    rec.company = p.At("company").Guard([&] { return CompanyId(p.At("company").Str()); });
    rec.publish_time = p.At("time").Int();
    rec.policy = ReadPolicy(p.At("policy"));
    bool found = false;
    for (const auto& c : cfg.companies) {
      if (c.id == rec.company) {
        rec.epcis_url = c.url;
        found = true;
      }
    }
    if (!found) p.At("company").Fail("unknown company '" + rec.company.value() + "'");
    for (const auto& prior : cfg.publishes) {
      if (prior.epc == rec.epc && prior.company != rec.company &&
          prior.publish_time == rec.publish_time) {
        p.At("time").Fail("TimestampCollision with " + prior.company.value());
      }
    }
    cfg.publishes.push_back(std::move(rec));
  }
  for (const auto& u : root.At("users").Items()) {
    UserSpec spec;
    spec.id = u.At("id").Guard([&] { return UserId(u.At("id").Str()); });
    if (u.Has("company") && !u.At("company").raw().is_null()) {
      spec.company = u.At("company").Guard([&] { return CompanyId(u.At("company").Str()); });
    }
    if (u.Has("rate")) {
      spec.rate = u.At("rate").Num();
      if (spec.rate < 0) u.At("rate").Fail("rate must be non-negative");
    }
    if (u.Has("epcs")) {
      for (const auto& e : u.At("epcs").Items()) spec.epcs.push_back(ReadEpc(e));
    }
    cfg.users.push_back(std::move(spec));
  }
  if (root.Has("events")) {
    for (const auto& e : root.At("events").Items()) {
      EventRecord ev;
      ev.epc = ReadEpc(e.At("epc"));
      ev.company = e.At("company").Guard([&] { return CompanyId(e.At("company").Str()); });
      ev.event_time = e.At("time").Int();
      if (e.Has("location")) ev.location = e.At("location").Str();
      if (e.Has("business_step")) ev.business_step = e.At("business_step").Str();
      if (e.Has("attributes")) {
        Node attrs = e.At("attributes");
        if (!attrs.raw().is_object()) attrs.Fail("expected an object");
        for (const auto& [name, value] : attrs.raw().items()) {
          ev.attributes[name] = Node(value, attrs.pointer() + "/" + name).Str();
        }
      }
      cfg.events.push_back(std::move(ev));
    }
  }
  if (root.Has("attacks")) {
    for (const auto& a : root.At("attacks").Items()) {
      AttackSpec spec;
      spec.kind = a.At("kind").Guard([&] { return ParseAttackKind(a.At("kind").Str()); });
      spec.attacker = a.At("attacker").Guard([&] { return UserId(a.At("attacker").Str()); });
      spec.victim = a.At("victim").Guard([&] { return UserId(a.At("victim").Str()); });
      spec.epc = ReadEpc(a.At("epc"));
      spec.at = Seconds(a.At("at_s"));
      cfg.attacks.push_back(std::move(spec));
    }
  }
  return cfg;
}

}  // namespace

ScenarioConfig ParseScenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw Error(ErrorCode::kConfigInvalid,
                "line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  auto anchored = [&](const std::string& pointer, const std::string& message) {
    auto lines = LineIndexer(text).Run();
    std::string p = pointer;
    while (!lines.contains(p) && !p.empty()) p = p.substr(0, p.rfind('/'));
    int line = lines.contains(p) ? lines[p] : 1;
    return Error(ErrorCode::kConfigInvalid, "line " + std::to_string(line) + ": " +
                                                (pointer.empty() ? "/" : pointer) + ": " +
                                                message);
  };
  ScenarioConfig cfg;
  try {
    cfg = ReadScenario(Node(doc, ""));
  } catch (const PathError& e) {
    throw anchored(e.pointer, e.message);
  }
  ValidateScenario(cfg);
  return cfg;
}

ScenarioConfig LoadScenarioFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseScenario(ss.str());
}

json ScenarioToJson(const ScenarioConfig& cfg) {
  auto ms = [](Micros us) { return static_cast<double>(us) / 1000.0; };
  json j;
  j["format"] = 1;
  j["name"] = cfg.name;
  j["model"] = std::string(AccessModelName(cfg.model));
  j["crypto"] = cfg.crypto == CryptoMode::kReal ? "real" : "modeled";
  j["seed"] = cfg.seed;
  j["start_time"] = cfg.start_time;
  j["duration_s"] = static_cast<double>(cfg.duration) / 1e6;
  j["drain"] = cfg.drain;
  j["k"] = cfg.k;
  j["window_seconds"] = cfg.window.window_seconds();
  j["arrivals"] = cfg.arrivals == ArrivalProcess::kPoisson ? "poisson" : "fixed";
  j["latency_ms"] = {{"base", ms(cfg.latency.base)}, {"jitter", ms(cfg.latency.jitter)}};
  const auto& st = cfg.service_times;
  j["service_times_ms"] = {{"policy_check", ms(st.policy_check)},
                           {"sign", ms(st.sign)},
                           {"verify", ms(st.verify)},
                           {"remote_check_roundtrip", ms(st.remote_check_roundtrip)},
                           {"db_lookup", ms(st.db_lookup)}};
  j["queue_sample_interval_s"] = static_cast<double>(cfg.queue_sample_interval) / 1e6;
  j["key"] = {{"bits", cfg.key.bits}, {"seed", cfg.key.seed}};
  if (cfg.key.valid_until) j["key"]["valid_until"] = *cfg.key.valid_until;
  j["companies"] = json::array();
  for (const auto& c : cfg.companies) {
    j["companies"].push_back({{"id", c.id.value()}, {"url", c.url}});
  }
  j["publishes"] = json::array();
  for (const auto& p : cfg.publishes) {
    json policy = {{"rule", std::string(RuleName(p.policy.rule))},
                   {"scope", std::vector<std::string>(p.policy.scope.begin(), p.policy.scope.end())}};
    if (p.policy.visibility != Visibility::kNotApplicable) {
      policy["visibility"] = std::string(VisibilityName(p.policy.visibility));
    }
    j["publishes"].push_back({{"epc", p.epc.value()},
                              {"company", p.company.value()},
                              {"time", p.publish_time},
                              {"policy", policy}});
  }
  j["users"] = json::array();
  for (const auto& u : cfg.users) {
    json uj = {{"id", u.id.value()}, {"rate", u.rate}};
    uj["company"] = u.company ? json(u.company->value()) : json(nullptr);
    if (!u.epcs.empty()) {
      uj["epcs"] = json::array();
      for (const auto& e : u.epcs) uj["epcs"].push_back(e.value());
    }
    j["users"].push_back(uj);
  }
  if (!cfg.events.empty()) {
    j["events"] = json::array();
    for (const auto& e : cfg.events) {
      j["events"].push_back({{"epc", e.epc.value()},
                             {"company", e.company.value()},
                             {"time", e.event_time},
                             {"location", e.location},
                             {"business_step", e.business_step},
                             {"attributes", e.attributes}});
    }
  }
  if (!cfg.attacks.empty()) {
    j["attacks"] = json::array();
    for (const auto& a : cfg.attacks) {
      j["attacks"].push_back({{"kind", std::string(AttackKindName(a.kind))},
                              {"attacker", a.attacker.value()},
                              {"victim", a.victim.value()},
                              {"epc", a.epc.value()},
                              {"at_s", static_cast<double>(a.at) / 1e6}});
    }
  }
  return j;
}

}  // namespace signepc
