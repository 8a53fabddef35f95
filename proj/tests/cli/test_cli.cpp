#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qsuff_cli/cli.hpp"

namespace fs = std::filesystem;
using qsuff::cli::json;

namespace {

const fs::path kExamples(QSUFF_EXAMPLES_DIR);

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qsuff::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return (kExamples / name).string(); }

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qsuff_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST(CliExamples, ProductSubalgebraIsSufficient) {
  const CliRun r = run({"check-subalgebra", example("bipartite_product.json")});
  EXPECT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["format_version"], "1");
  EXPECT_EQ(j["command"], "check-subalgebra");
  EXPECT_EQ(j["result"]["verdict"], "sufficient");
  EXPECT_EQ(j["exit_code"], 0);
}

TEST(CliExamples, ChannelOnProductIsSufficient) {
  EXPECT_EQ(run({"check-channel", example("bipartite_product.json")}).code, 0);
}

TEST(CliExamples, GenericIsInsufficient) {
  const CliRun r = run({"check-subalgebra", example("generic_qubits.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["result"]["verdict"], "insufficient");
}

TEST(CliExamples, DecomposeTwoBlocks) {
  const CliRun r = run({"decompose", example("two_blocks.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  std::vector<std::pair<int, int>> shapes;
  for (const json& b : j["result"]["blocks"]) shapes.emplace_back(b["d"].get<int>(), b["m"].get<int>());
  std::sort(shapes.begin(), shapes.end());
  EXPECT_EQ(shapes, (std::vector<std::pair<int, int>>{{1, 3}, {2, 2}}));
}

TEST(CliExamples, SsaCases) {
  EXPECT_EQ(run({"ssa", example("ssa_product.json")}).code, 0);
  EXPECT_EQ(run({"ssa", example("ssa_equality.json")}).code, 0);
  const CliRun r = run({"ssa", example("ssa_random.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_GT(json::parse(r.out)["result"]["gap"]["entropy_form"].get<double>(), 1e-3);
}

TEST(CliExamples, ExpfamFitMatchesClosedForm) {
  const CliRun r = run({"expfam", "fit", example("qubit_tilt.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["result"]["fits"][0]["xi"][0].get<double>(), std::atanh(0.4), 1e-9);
}

TEST(CliExamples, ExpfamOutsideRegion) {
  const CliRun r = run({"expfam", "fit", example("qubit_tilt_outside.json")});
  EXPECT_EQ(r.code, 4);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["exit_code"], 4);
  EXPECT_TRUE(j["error"].contains("last_iterate"));
}

TEST(CliExamples, ExpfamSufficiency) {
  EXPECT_EQ(run({"expfam", "check-sufficiency", example("expfam_embedding.json")}).code, 0);
}

TEST(CliExamples, HumanOutput) {
  const CliRun r = run({"check-subalgebra", example("generic_qubits.json"), "--human"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("insufficient"), std::string::npos);
}

TEST(CliErrors, EmptyStates) {
  const CliRun r = run({"check-subalgebra", example("empty_states.json")});
  EXPECT_EQ(r.code, 64);
  EXPECT_EQ(json::parse(r.out)["error"]["pointer"], "/states");
  EXPECT_NE(r.err.find("/states"), std::string::npos);
}

TEST(CliErrors, UnknownCommandIsUsageError) {
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"check-subalgebra"}).code, 64);
}

TEST(CliErrors, BadTGrid) {
  EXPECT_EQ(run({"check-subalgebra", example("generic_qubits.json"), "--t-grid", "0.5,x"}).code, 64);
}

TEST(CliErrors, JsonAndHumanAreExclusive) {
  EXPECT_EQ(run({"check-subalgebra", example("generic_qubits.json"), "--json", "--human"}).code, 64);
}

TEST_F(TempDir, SyntaxErrorHasPosition) {
  const CliRun r = run({"check-subalgebra", write("bad.json", "{\"format_version\": \"1\", \"dim\": 2,\n  \"states\": [}")});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("2:"), std::string::npos) << r.err;
}

TEST_F(TempDir, DimsMismatch) {
  const std::string f = write("dims.json", R"({"format_version": "1", "dim": 2, "tensor_dims": [2, 2],
    "states": [{"matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]}]})");
  const CliRun r = run({"check-subalgebra", f});
  EXPECT_EQ(r.code, 64);
  EXPECT_EQ(json::parse(r.out)["error"]["pointer"], "/tensor_dims");
}

TEST_F(TempDir, NotADensity) {
  const std::string f = write("neg.json", R"({"format_version": "1", "dim": 2,
    "states": [{"matrix": [[[2,0],[0,0]],[[0,0],[-1,0]]]}]})");
  const CliRun r = run({"check-subalgebra", f});
  EXPECT_EQ(r.code, 64);
  EXPECT_EQ(json::parse(r.out)["error"]["pointer"], "/states/0/matrix");
}

TEST_F(TempDir, OutputIsDeterministic) {
  for (const std::string cmd : {"decompose", "check-subalgebra"}) {
    const std::string file = cmd == "decompose" ? "two_blocks.json" : "bipartite_product.json";
    EXPECT_EQ(run({cmd, example(file), "--seed", "7", "--out", path("a.json")}).code, 0);
    EXPECT_EQ(run({cmd, example(file), "--seed", "7", "--out", path("b.json")}).code, 0);
    std::ifstream a(path("a.json")), b(path("b.json"));
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_FALSE(sa.str().empty());
    EXPECT_EQ(sa.str(), sb.str()) << cmd;
  }
}

TEST_F(TempDir, TimingsOnlyOnRequest) {
  EXPECT_FALSE(json::parse(run({"decompose", example("single_state.json")}).out).contains("timings"));
  EXPECT_TRUE(json::parse(run({"decompose", example("single_state.json"), "--timings"}).out).contains("timings"));
}

TEST_F(TempDir, SeedFromEnvironment) {
  ::setenv("QSUFF_SEED", "not-a-number", 1);
  EXPECT_EQ(run({"decompose", example("single_state.json")}).code, 64);
  ::setenv("QSUFF_SEED", "99", 1);
  const json j = json::parse(run({"decompose", example("single_state.json")}).out);
  EXPECT_EQ(j["settings"]["seed"], 99);
  const json k = json::parse(run({"decompose", example("single_state.json"), "--seed", "5"}).out);
  EXPECT_EQ(k["settings"]["seed"], 5);
  ::unsetenv("QSUFF_SEED");
}

TEST_F(TempDir, VerifyAcceptsReports) {
  for (const auto& [cmd, file] : std::vector<std::pair<std::string, std::string>>{
           {"decompose", "two_blocks.json"}, {"ssa", "ssa_equality.json"}, {"check-channel", "bipartite_product.json"}}) {
    run({cmd, example(file), "--out", path("r.json")});
    const CliRun v = run({"verify", path("r.json")});
    EXPECT_EQ(v.code, 0) << cmd << ": " << v.out;
  }
}

TEST_F(TempDir, VerifyRejectsTamperedUnitary) {
  run({"decompose", example("two_blocks.json"), "--out", path("r.json")});
  json report = qsuff::cli::load_json_file(path("r.json"));
  json& entry = report["result"]["unitary"][0][0];
  entry[0] = entry[0].get<double>() + 1e-4;
  EXPECT_NE(run({"verify", write("t.json", report.dump(2))}).code, 0);
}

TEST_F(TempDir, VerifyRejectsChangedVerdict) {
  run({"check-subalgebra", example("generic_qubits.json"), "--out", path("r.json")});
  json report = qsuff::cli::load_json_file(path("r.json"));
  report["result"]["verdict"] = "sufficient";
  report["exit_code"] = 0;
  EXPECT_NE(run({"verify", write("t.json", report.dump(2))}).code, 0);
}
