#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kBin = EPCSIGN_SIM;
const std::string kSrc = SIGNEPC_SOURCE_DIR;
const std::string kGolden = kSrc + "/tests/golden/";
const std::string kEpc = "urn:epc:id:sgtin:0614141.112345.400";

struct Result {
  int exit = -1;
  std::string out;
  std::string err;
};

fs::path Scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("epcsign-cli-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

Result Cli(const std::string& args) {
  const std::string err_path = (Scratch() / "stderr.txt").string();
  const std::string cmd = kBin + " " + args + " 2>" + err_path;
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  r.err.assign(std::istreambuf_iterator<char>(err), {});
  return r;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Scenario(const std::string& name) { return kSrc + "/scenarios/" + name; }

TEST(CliGolden, KeygenIsReproducible) {
  const auto out = (Scratch() / "pub.json").string();
  auto r = Cli("keygen --seed 5 --created-at 1710000000 --valid-until 1900000000 --out " + out);
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(Slurp(out), Slurp(kGolden + "epcds_pub.json"));
  EXPECT_EQ(Slurp(out + ".key"), Slurp(kGolden + "epcds_pub.json.key"));
}

TEST(CliGolden, KeygenToStdout) {
  auto a = Cli("keygen --seed 9 --valid-until 1900000000");
  auto b = Cli("keygen --seed 9 --valid-until 1900000000");
  ASSERT_EQ(a.exit, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\"public\""), std::string::npos);
  EXPECT_NE(a.out.find("\"private\""), std::string::npos);
}

TEST(CliGolden, TokenSign) {
  auto r = Cli("token-sign --key " + kGolden + "epcds_pub.json.key --userid alice --epc " + kEpc +
               " --url https://epcis.acme.example/query --scope warehouse,location --now 1710464400");
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(r.out, Slurp(kGolden + "token_alice.json"));
}

TEST(CliGolden, RunSimReports) {
  auto secure = Cli("run-sim --scenario " + Scenario("fanout.json") + " --model secure_epcds --format csv");
  auto sign = Cli("run-sim --scenario " + Scenario("fanout.json") + " --model sign_epc --format csv");
  ASSERT_EQ(secure.exit, 0) << secure.err;
  EXPECT_EQ(secure.out, Slurp(kGolden + "fanout_secure.csv"));
  EXPECT_EQ(sign.out, Slurp(kGolden + "fanout_sign.csv"));
  // 100 fixed-interval transactions at k=3
  EXPECT_NE(secure.out.find("\nepcds_inbound,400\n"), std::string::npos);
  EXPECT_NE(sign.out.find("\nepcds_inbound,100\n"), std::string::npos);

  auto demo = Cli("run-sim --scenario " + Scenario("demo.json"));
  EXPECT_EQ(demo.out, Slurp(kGolden + "demo_report.json"));
}

TEST(CliGolden, Compare) {
  auto r = Cli("compare --scenario " + Scenario("fanout.json") + " --k 1,5,25");
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(r.out, Slurp(kGolden + "fanout_compare.csv"));
}

TEST(CliGolden, AttackSuite) {
  auto r = Cli("attack-suite --scenario " + Scenario("demo.json") + " --trials 5 --seed 1");
  EXPECT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(r.out, Slurp(kGolden + "attack_suite_demo.txt"));
}

TEST(CliGolden, NodeEval) {
  auto r = Cli("node-eval --scenario " + Scenario("demo.json") + " --node epcds --user alice --epc " +
               kEpc + " --now 1710460800");
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(r.out, Slurp(kGolden + "node_eval_epcds.json"));
}

TEST(CliTest, RunSimWritesOutFile) {
  const auto out = (Scratch() / "report.csv").string();
  auto r = Cli("run-sim --scenario " + Scenario("fanout.json") +
               " --model secure_epcds --format csv --out " + out);
  ASSERT_EQ(r.exit, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(Slurp(out), Slurp(kGolden + "fanout_secure.csv"));
}

class TokenCli : public ::testing::Test {
 protected:
  void SetUp() override {
    token_ = (Scratch() / "token.json").string();
    auto r = Cli("token-sign --key " + kGolden + "epcds_pub.json.key --userid bob --epc " + kEpc +
                 " --url https://epcis.b.example --scope location --now 1710464400 --out " + token_);
    ASSERT_EQ(r.exit, 0) << r.err;
  }
  Result Verify(const std::string& extra) {
    return Cli("token-verify --pub " + kGolden + "epcds_pub.json --token " + token_ + " " + extra);
  }
  std::string token_;
};

TEST_F(TokenCli, RoundTripAccepts) {
  auto r = Verify("--now 1710464400");
  EXPECT_EQ(r.exit, 0);
  EXPECT_EQ(r.out, "ACCEPT\n");
}

TEST_F(TokenCli, TamperedScopeRejected) {
  auto r = Verify("--now 1710464400 --scope location,quality");
  EXPECT_EQ(r.exit, 3);
  EXPECT_EQ(r.out, "REJECT DigestMismatch\n");
}

TEST_F(TokenCli, NextWindowRejected) {
  auto r = Verify("--now " + std::to_string(1710464400 + 86400));
  EXPECT_EQ(r.exit, 3);
  EXPECT_EQ(r.out, "REJECT DigestMismatch\n");
}

TEST_F(TokenCli, OtherRequesterRejected) {
  auto r = Verify("--now 1710464400 --requester mallory");
  EXPECT_EQ(r.exit, 3);
  EXPECT_EQ(r.out, "REJECT UseridMismatch\n");
}

TEST_F(TokenCli, WrongPublicKeyRejected) {
  const auto other = (Scratch() / "other.json").string();
  ASSERT_EQ(Cli("keygen --seed 6 --valid-until 1900000000 --out " + other).exit, 0);
  auto r = Cli("token-verify --pub " + other + " --token " + token_ + " --now 1710464400");
  EXPECT_EQ(r.exit, 3);
  EXPECT_EQ(r.out, "REJECT SignatureInvalid\n");
}

TEST(CliExit, UsageErrors) {
  EXPECT_EQ(Cli("").exit, 2);
  EXPECT_EQ(Cli("no-such-command").exit, 2);
  EXPECT_EQ(Cli("keygen").exit, 2);  // --valid-until is required
  EXPECT_EQ(Cli("run-sim --scenario x --format xml").exit, 2);
}

TEST(CliExit, WeakKey) {
  EXPECT_EQ(Cli("keygen --bits 512 --valid-until 5").exit, 2);
  EXPECT_EQ(Cli("keygen --bits 1024 --valid-until 5").exit, 2);
}

TEST(CliExit, MalformedInputs) {
  auto r = Cli("token-sign --key " + kGolden + "epcds_pub.json.key --userid a --epc not-an-epc "
               "--url u --now 0");
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.err.find("MalformedEpc"), std::string::npos);
}

TEST(CliExit, MissingFileIsIo) {
  EXPECT_EQ(Cli("run-sim --scenario /nonexistent/scenario.json").exit, 1);
}

TEST(CliExit, BadScenarioHasLineDiagnostic) {
  const auto path = (Scratch() / "bad.json").string();
  std::ofstream(path) << "{\n  \"format\": 1,\n  \"model\": \"sign_epc\",\n"
                         "  \"k\": 0\n}\n";
  auto r = Cli("run-sim --scenario " + path);
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.err.find("line "), std::string::npos) << r.err;
}

TEST(CliExit, MiswiredVerifierKeyIsRegression) {
  const auto other = (Scratch() / "wrong.json").string();
  ASSERT_EQ(Cli("keygen --seed 77 --valid-until 4000000000 --out " + other).exit, 0);
  auto r = Cli("attack-suite --scenario " + Scenario("demo.json") + " --trials 3 --verifier-key " + other);
  EXPECT_EQ(r.exit, 4);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(CliExit, ZeroTrialsIsVacuousPass) {
  auto r = Cli("attack-suite --scenario " + Scenario("demo.json") + " --trials 0");
  EXPECT_EQ(r.exit, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos) << r.err;
}

TEST(CliExit, AttackSuiteNeedsSignEpc) {
  auto r = Cli("attack-suite --scenario " + Scenario("fanout.json") + " --trials 1");
  EXPECT_EQ(r.exit, 2);
}

}  // namespace
