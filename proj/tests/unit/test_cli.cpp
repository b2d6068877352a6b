#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdf/cli.hpp"

using namespace sdf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result sdfc(std::vector<std::string> args) {
  args.insert(args.begin(), "sdfc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) { return std::string(SDF_CORPUS_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sdfc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, CheckPrintsSchemesAndChannels) {
  auto r = sdfc({"check", corpus("chain_g.sdf")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("node g : int@A -{A,B}-> int@B"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c$1: A -> B (int)"), std::string::npos) << r.out;
}

TEST(Cli, CheckSoftwareRadio) {
  auto r = sdfc({"check", corpus("multichannel_sdr.sdf")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("node multichannel_sdr : int@FPGA -{FPGA,DSP,GPP}-> int@GPP"), std::string::npos) << r.out;
}

TEST(Cli, RejectedProgramExitsOne) {
  auto r = sdfc({"check", corpus("chain_g_reversed.sdf")});
  EXPECT_EQ(r.code, kExitDiagnostics);
  EXPECT_NE(r.err.find("TYPE007"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("chain_g_reversed.sdf:"), std::string::npos) << r.err;

  auto j = sdfc({"check", corpus("chain_g_reversed.sdf"), "--format", "json"});
  EXPECT_EQ(j.code, kExitDiagnostics);
  auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["diagnostics"][0]["code"], "TYPE007");
}

TEST(Cli, SyntaxErrorExitsOne) {
  auto dir = scratch("syntax");
  std::ofstream(dir / "bad.sdf") << "loc A; y = ;";
  EXPECT_EQ(sdfc({"check", (dir / "bad.sdf").string()}).code, kExitDiagnostics);
}

TEST(Cli, GraphIsSortedJson) {
  auto r = sdfc({"graph", corpus("multichannel_sdr.sdf")});
  ASSERT_EQ(r.code, kExitOk);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["locations"], nlohmann::json({"DSP", "FPGA", "GPP"}));
  EXPECT_EQ(doc["links"].size(), 6u);
  EXPECT_EQ(doc["links"][0], nlohmann::json({"DSP", "FPGA"}));
}

TEST(Cli, ProjectWritesDeterministicFiles) {
  auto a = scratch("proj_a"), b = scratch("proj_b");
  auto ra = sdfc({"project", corpus("multichannel_sdr.sdf"), "-o", a.string()});
  auto rb = sdfc({"project", corpus("multichannel_sdr.sdf"), "-o", b.string()});
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk);
  for (const char* f : {"multichannel_sdr.FPGA.sdf", "multichannel_sdr.DSP.sdf", "multichannel_sdr.GPP.sdf",
                        "wiring.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  auto wiring = nlohmann::json::parse(slurp(a / "wiring.json"));
  EXPECT_EQ(wiring.size(), 6u);
  EXPECT_TRUE(wiring[0].contains("sort"));
}

TEST(Cli, RunReadsAndWritesJsonLines) {
  auto dir = scratch("run");
  std::ofstream(dir / "in.jsonl") << "{\"x\": 1}\n{\"x\": 2}\n\n{\"x\": 3}\n";
  auto r = sdfc({"run", corpus("node_f.sdf"), "--inputs", (dir / "in.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::vector<std::int64_t> zs;
  for (std::string l; std::getline(lines, l);) zs.push_back(nlohmann::json::parse(l)["z"].get<std::int64_t>());
  EXPECT_EQ(zs, (std::vector<std::int64_t>{4, 6, 8}));
}

TEST(Cli, RunDistShowsLocations) {
  auto dir = scratch("dist");
  std::ofstream(dir / "in.jsonl") << "{\"x\": 1}\n";
  auto in = (dir / "in.jsonl").string();
  auto net = sdfc({"run-dist", corpus("node_f.sdf"), "--inputs", in});
  ASSERT_EQ(net.code, kExitOk) << net.err;
  auto step = nlohmann::json::parse(net.out);
  EXPECT_EQ(step["locations"]["B"]["z$B"], 4);
  EXPECT_TRUE(step["locations"]["A"]["z$A"].is_null());

  auto sem = sdfc({"run-dist", corpus("node_f.sdf"), "--inputs", in, "--semantics"});
  ASSERT_EQ(sem.code, kExitOk) << sem.err;
  auto s = nlohmann::json::parse(sem.out);
  EXPECT_EQ(s["env"]["z"]["value"], 4);
  EXPECT_EQ(s["env"]["z"]["at"], "B");
}

TEST(Cli, VerifyExitCodes) {
  auto ok = sdfc({"verify", corpus("node_f.sdf"), "--steps", "50"});
  EXPECT_EQ(ok.code, kExitOk) << ok.out << ok.err;
  EXPECT_EQ(nlohmann::json::parse(ok.out)["equivalent"], true);

  auto bad = sdfc({"verify", corpus("node_f.sdf"), "--steps", "5", "--prefill", "c$1=0"});
  EXPECT_EQ(bad.code, kExitMismatch);
  EXPECT_FALSE(nlohmann::json::parse(bad.out)["mismatches"].empty());

  auto swapped =
      sdfc({"verify", corpus("two_wires.sdf"), "--steps", "5", "--reroute", "c$1=c$2", "--reroute", "c$2=c$1"});
  EXPECT_EQ(swapped.code, kExitMismatch);

  EXPECT_EQ(sdfc({"run", corpus("causality_cycle.sdf"), "--steps", "1"}).code, kExitRuntime);
}

TEST(Cli, SameInvocationSameBytes) {
  std::vector<std::string> args{"verify", corpus("multichannel_sdr.sdf"), "--steps", "30", "--schedule", "random",
                                "--seed", "4"};
  auto a = sdfc(args), b = sdfc(args);
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("random:4"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(sdfc({}).code, kExitUsage);
  EXPECT_EQ(sdfc({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"check"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"verify", corpus("node_f.sdf"), "--schedule", "random"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"verify", corpus("node_f.sdf"), "--schedule", "eager"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"verify", corpus("node_f.sdf"), "--seed", "3"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"run", corpus("node_f.sdf"), "--steps", "-1"}).code, kExitUsage);
  EXPECT_EQ(sdfc({"check", corpus("node_f.sdf"), "--format", "xml"}).code, kExitUsage);
  auto help = sdfc({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("run-dist"), std::string::npos);
}
