// epcsign-sim: key management, token operations, simulation and attack runs.
//
// Exit codes: 0 success, 1 I/O, 2 usage/config, 3 token rejected,
// 4 security regression in attack-suite.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "signepc/attack_suite.hpp"
#include "signepc/error.hpp"
#include "signepc/pki.hpp"
#include "signepc/scenario.hpp"
#include "signepc/simnet.hpp"
#include "signepc/token.hpp"

namespace {

using namespace signepc;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitReject = 3;
constexpr int kExitSecurity = 4;

int ExitFor(const Error& e) { return e.code() == ErrorCode::kIo ? kExitIo : kExitUsage; }

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ReadJsonFile(const std::string& path) {
  std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

// Writes to path, or to stdout when path is empty.
void Emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw Error(ErrorCode::kIo, "cannot write " + path);
}

Timestamp ClockOr(const std::optional<Timestamp>& now) {
  if (now) return *now;
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

AttributeSet ScopeFrom(const std::vector<std::string>& items) {
  AttributeSet scope;
  for (const auto& item : items) {
    if (!scope.insert(item).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate scope entry '" + item + "'");
    }
  }
  return scope;
}

struct KeygenArgs {
  int bits = kMinModulusBits;
  Timestamp created_at = 0;
  Timestamp valid_until = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string private_out;
  bool allow_weak = false;
};

int CmdKeygen(const KeygenArgs& a) {
  KeyGenOptions opts;
  opts.modulus_bits = a.bits;
  opts.created_at = a.created_at;
  opts.valid_until = a.valid_until;
  opts.seed = a.seed;
  opts.allow_weak = a.allow_weak;
  KeyPair kp = GenerateKeyPair(opts);
  json bundle = PublicBundleToJson(kp.public_key, kp.valid_until);
  json priv = PrivateKeyToJson(kp);
  if (a.out.empty()) {
    Emit("", json{{"public", bundle}, {"private", priv}}.dump(2) + "\n");
  } else {
    Emit(a.out, bundle.dump(2) + "\n");
    Emit(a.private_out.empty() ? a.out + ".key" : a.private_out, priv.dump(2) + "\n");
  }
  return kExitOk;
}

KeyPair LoadPrivateKey(const std::string& path, bool allow_weak) {
  json j = ReadJsonFile(path);
  // Accept the combined stdout form of keygen as well.
  if (j.contains("private")) j = j["private"];
  return PrivateKeyFromJson(j, allow_weak);
}

TrustedKey LoadPublicKey(const std::string& path) {
  json j = ReadJsonFile(path);
  if (j.contains("public")) j = j["public"];
  return PublicBundleFromJson(j);
}

struct TokenSignArgs {
  std::string key;
  std::string userid;
  std::string epc;
  std::string url;
  std::vector<std::string> scope;
  std::optional<Timestamp> now;
  std::int64_t window = ExpiryWindow::kDaily;
  std::string out;
  bool allow_weak = false;
};

int CmdTokenSign(const TokenSignArgs& a) {
  KeyPair kp = LoadPrivateKey(a.key, a.allow_weak);
  if (a.url.empty()) throw Error(ErrorCode::kInvalidArgument, "empty --url");
  AccessRight rights{UserId(a.userid), ParseEpc(a.epc), a.url, ScopeFrom(a.scope)};
  ExpiryWindow window(a.window);
  std::string label = ComputeExpiry(ClockOr(a.now), window);
  TransportToken token{rights, label, SignTag(kp.private_key, MakeDigest(rights.userid, rights, label))};
  Emit(a.out, TokenToJson(token).dump(2) + "\n");
  return kExitOk;
}

struct TokenVerifyArgs {
  std::string pub;
  std::string token;
  std::optional<std::string> requester;
  std::optional<std::string> epc;
  std::optional<std::string> url;
  std::optional<std::vector<std::string>> scope;
  std::optional<Timestamp> now;
  std::int64_t window = ExpiryWindow::kDaily;
};

int CmdTokenVerify(const TokenVerifyArgs& a) {
  TrustedKey trusted = LoadPublicKey(a.pub);
  TransportToken token = TokenFromJson(ReadJsonFile(a.token));
  // Overrides let the presenter alter the rights it shows the verifier.
  if (a.epc) token.rights.epc = ParseEpc(*a.epc);
  if (a.url) token.rights.epcis_url = *a.url;
  if (a.scope) token.rights.scope = ScopeFrom(*a.scope);
  UserId requester = a.requester ? UserId(*a.requester) : token.rights.userid;
  const Timestamp now = ClockOr(a.now);

  if (CheckKeyExpiry(trusted.valid_until, now) == KeyStatus::kExpired) {
    std::cout << "REJECT SignerKeyExpired\n";
    return kExitReject;
  }
  TokenVerdict v = CheckToken(requester, token.rights, token.tag, now, ExpiryWindow(a.window), trusted.key);
  if (v.accepted()) {
    std::cout << "ACCEPT\n";
    return kExitOk;
  }
  std::cout << "REJECT " << RejectReasonName(*v.reject) << "\n";
  return kExitReject;
}

struct RunSimArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<int> k;
  std::string format = "json";
  std::string out;
};

int CmdRunSim(const RunSimArgs& a) {
  ScenarioConfig cfg = LoadScenarioFile(a.scenario);
  if (a.seed) cfg.seed = *a.seed;
  if (a.model) cfg.model = ParseAccessModel(*a.model);
  if (a.k) cfg.k = *a.k;
  ValidateScenario(cfg);
  SimReport report = RunScenario(cfg);
  Emit(a.out, a.format == "csv" ? ReportToCsv(report) : ReportToJson(report).dump(2) + "\n");
  return kExitOk;
}

struct CompareArgs {
  std::string scenario;
  std::vector<int> ks{1, 5, 25};
  std::optional<std::uint64_t> seed;
  std::string out;
};

int CmdCompare(const CompareArgs& a) {
  ScenarioConfig cfg = LoadScenarioFile(a.scenario);
  if (a.seed) cfg.seed = *a.seed;
  for (int k : a.ks) {
    if (k < 1) throw Error(ErrorCode::kConfigInvalid, "k must be at least 1");
  }
  Emit(a.out, ComparisonToCsv(CompareModels(cfg, a.ks)));
  return kExitOk;
}

struct AttackSuiteArgs {
  std::string scenario;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string verifier_key;
};

int CmdAttackSuite(const AttackSuiteArgs& a) {
  ScenarioConfig cfg = LoadScenarioFile(a.scenario);
  AttackSuiteOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  if (!a.verifier_key.empty()) opts.verifier_override = LoadPublicKey(a.verifier_key);
  if (a.trials <= 0) std::cerr << "warning: no trials requested; nothing was tested\n";

  AttackSuiteResult r = RunAttackSuite(cfg, opts);
  std::cout << "honest " << r.honest_accepted << "/" << r.trials << " accepted";
  for (const auto& [reason, n] : r.honest_rejected) std::cout << " " << reason << "=" << n;
  std::cout << "\n";
  for (const auto& [kind, t] : r.attacks) {
    std::cout << AttackKindName(kind) << " " << (t.trials - t.accepted) << "/" << t.trials
              << " rejected";
    for (const auto& [reason, n] : t.rejected) std::cout << " " << reason << "=" << n;
    std::cout << "\n";
  }
  std::cout << (r.passed() ? "PASS" : "FAIL") << "\n";
  return r.passed() ? kExitOk : kExitSecurity;
}

struct NodeEvalArgs {
  std::string scenario;
  std::string node = "epcds";
  std::string user;
  std::string epc;
  std::string company;
  std::string token;
  std::optional<Timestamp> now;
};

int CmdNodeEval(const NodeEvalArgs& a) {
  ScenarioConfig cfg = LoadScenarioFile(a.scenario);
  const Timestamp now = a.now.value_or(cfg.start_time);
  NodeConfig node_cfg{cfg.model, cfg.window, cfg.service_times, cfg.crypto};
  std::optional<KeyPair> key;
  if (cfg.model == AccessModel::kSignEpc && cfg.crypto == CryptoMode::kReal) {
    KeyGenOptions opts;
    opts.modulus_bits = cfg.key.bits;
    opts.created_at = cfg.start_time;
    opts.valid_until = cfg.key.valid_until.value_or(cfg.start_time + 365 * 86400);
    opts.seed = cfg.key.seed;
    key = GenerateKeyPair(opts);
  }

  std::vector<Message> out;
  if (a.node == "epcds") {
    EpcdsState st{BuildRegistry(cfg), node_cfg, key, {}};
    Message query{UserNodeId(UserId(a.user)), EpcdsNodeId(), UserQueryDs{1, UserId(a.user), ParseEpc(a.epc)}};
    out = EpcdsHandleMessage(st, query, now);
  } else if (a.node == "epcis") {
    const CompanySpec* company = nullptr;
    for (const auto& c : cfg.companies) {
      if (c.id.value() == a.company) company = &c;
    }
    if (company == nullptr) throw Error(ErrorCode::kConfigInvalid, "unknown --company " + a.company);
    EpcisState st;
    st.id = EpcisNodeId(company->id);
    st.company = company->id;
    st.url = company->url;
    st.config = node_cfg;
    for (const auto& ev : ScenarioEvents(cfg)) {
      if (ev.company == company->id) st.events.push_back(ev);
    }
    if (key) st.trusted.Add(key->public_key, key->valid_until);
    UserQueryIs q{1, UserId(a.user), ParseEpc(a.epc), std::nullopt, std::nullopt};
    if (!a.token.empty()) {
      TransportToken t = TokenFromJson(ReadJsonFile(a.token));
      q.rights = t.rights;
      q.tag = t.tag;
    }
    out = EpcisHandleQuery(st, Message{UserNodeId(q.user), st.id, q}, now);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--node must be epcds or epcis");
  }
  json arr = json::array();
  for (const auto& m : out) arr.push_back(MessageToJson(m));
  std::cout << arr.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SignEPC protocol and discovery-network simulator"};
  app.require_subcommand(1);

  KeygenArgs keygen;
  auto* kg = app.add_subcommand("keygen", "Generate an EPCDS RSA key pair");
  kg->add_option("--bits", keygen.bits, "Modulus size in bits")->capture_default_str();
  kg->add_option("--created-at", keygen.created_at, "Creation time (UTC seconds)");
  kg->add_option("--valid-until", keygen.valid_until, "Key expiry (UTC seconds)")->required();
  kg->add_option("--seed", keygen.seed, "Deterministic generation seed");
  kg->add_option("--out", keygen.out, "Public bundle path (default: stdout, both keys)");
  kg->add_option("--private-out", keygen.private_out, "Private key path (default: <out>.key)");
  kg->add_flag("--allow-weak", keygen.allow_weak, "Test mode: allow 1024-bit keys");

  TokenSignArgs sign;
  auto* ts = app.add_subcommand("token-sign", "Issue a signed access token");
  ts->add_option("--key", sign.key, "Private key file")->required();
  ts->add_option("--userid", sign.userid)->required();
  ts->add_option("--epc", sign.epc)->required();
  ts->add_option("--url", sign.url)->required();
  ts->add_option("--scope", sign.scope, "Attribute names (repeat or comma-separate)")->delimiter(',');
  ts->add_option("--now", sign.now, "Issue time (UTC seconds)");
  ts->add_option("--window", sign.window, "Expiry window in seconds")->capture_default_str();
  ts->add_option("--out", sign.out);
  ts->add_flag("--allow-weak", sign.allow_weak);

  TokenVerifyArgs verify;
  auto* tv = app.add_subcommand("token-verify", "Check a token as an EPCIS would");
  tv->add_option("--pub", verify.pub, "Public key bundle")->required();
  tv->add_option("--token", verify.token, "Token JSON")->required();
  tv->add_option("--requester", verify.requester, "Querying user (default: token userid)");
  tv->add_option("--epc", verify.epc, "Present a different EPC");
  tv->add_option("--url", verify.url, "Present a different EPCIS url");
  tv->add_option("--scope", verify.scope, "Present a different scope")->delimiter(',');
  tv->add_option("--now", verify.now, "Verifier clock (UTC seconds)");
  tv->add_option("--window", verify.window)->capture_default_str();

  RunSimArgs run;
  auto* rs = app.add_subcommand("run-sim", "Simulate one scenario");
  rs->add_option("--scenario", run.scenario)->required();
  rs->add_option("--seed", run.seed);
  rs->add_option("--model", run.model, "Override the access model")
      ->check(CLI::IsMember({"directory_open", "secure_epcds", "sign_epc"}));
  rs->add_option("--k", run.k, "Override EPCIS contacted per transaction");
  rs->add_option("--format", run.format)->check(CLI::IsMember({"json", "csv"}));
  rs->add_option("--out", run.out);

  CompareArgs cmp;
  auto* cm = app.add_subcommand("compare", "Secure EPCDS vs SignEPC across k");
  cm->add_option("--scenario", cmp.scenario)->required();
  cm->add_option("--k", cmp.ks, "EPCIS per transaction")->delimiter(',')->capture_default_str();
  cm->add_option("--seed", cmp.seed);
  cm->add_option("--out", cmp.out);

  AttackSuiteArgs atk;
  auto* as = app.add_subcommand("attack-suite", "Run all attacks against SignEPC");
  as->add_option("--scenario", atk.scenario)->required();
  as->add_option("--trials", atk.trials)->capture_default_str();
  as->add_option("--seed", atk.seed)->capture_default_str();
  as->add_option("--verifier-key", atk.verifier_key, "Public bundle EPCIS should trust instead");

  NodeEvalArgs ne;
  auto* nv = app.add_subcommand("node-eval", "Invoke one node handler");
  nv->add_option("--scenario", ne.scenario)->required();
  nv->add_option("--node", ne.node)->check(CLI::IsMember({"epcds", "epcis"}));
  nv->add_option("--user", ne.user)->required();
  nv->add_option("--epc", ne.epc)->required();
  nv->add_option("--company", ne.company, "EPCIS company (node=epcis)");
  nv->add_option("--token", ne.token, "Token JSON to present (node=epcis)");
  nv->add_option("--now", ne.now);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*kg) return CmdKeygen(keygen);
    if (*ts) return CmdTokenSign(sign);
    if (*tv) return CmdTokenVerify(verify);
    if (*rs) return CmdRunSim(run);
    if (*cm) return CmdCompare(cmp);
    if (*as) return CmdAttackSuite(atk);
    if (*nv) return CmdNodeEval(ne);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
