#include "cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "mec/scenario.hpp"
#include "mec/serialization.hpp"

namespace mec {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"mec-offload"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mec_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_instance(const std::string& name, std::size_t K, std::size_t L) {
    ScenarioConfig c;
    c.num_helpers = K;
    c.num_tasks = L;
    c.seed = 4;
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << instance_to_json(generate_instance(c)).dump(2);
    return path;
  }

  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

TEST_F(CliTest, SolveWritesSolutionDocument) {
  const std::string inst = write_instance("inst.json", 2, 3);
  const CliRun r = run_cli({"solve", "--instance", inst, "--scheme", "proposed"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["scheme"], "proposed");
  EXPECT_EQ(doc["status"], "optimal");
  EXPECT_TRUE(doc["feasible"].get<bool>());
  EXPECT_TRUE(doc.contains("schedule"));
  EXPECT_NE(r.err.find("proposed"), std::string::npos);
}

TEST_F(CliTest, LocalExecutionObjectiveIsLocalComputeTime) {
  const std::string path = write_instance("inst.json", 2, 4);
  const Instance inst = instance_from_json(read_json_file(path));
  double expected = 0.0;
  for (std::size_t l = 0; l < inst.num_tasks(); ++l) {
    expected += inst.local.cycles_per_bit[l] * inst.tasks[l].input_bits / inst.local.cpu_freq;
  }
  const std::string out = (dir_ / "sol.json").string();
  const CliRun r =
      run_cli({"solve", "--instance", path, "--scheme", "local_execution", "--out", out});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json doc = read_json_file(out);
  ASSERT_TRUE(doc["objective"].is_number());
  EXPECT_NEAR(doc["objective"].get<double>(), expected, 1e-12 * expected);
}

TEST_F(CliTest, ExhaustiveOverLimitExitsTwo) {
  const std::string inst = write_instance("big.json", 3, 9);
  const CliRun r = run_cli({"solve", "--instance", inst, "--scheme", "exhaustive"});
  EXPECT_EQ(r.code, cli::kInvalidInput);
  EXPECT_NE(r.err.find("limit"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadInputsExitTwo) {
  EXPECT_EQ(run_cli({"solve", "--instance", (dir_ / "missing.json").string()}).code,
            cli::kInvalidInput);
  std::ofstream(dir_ / "bad.json") << R"({"bandwidth": 0})";
  EXPECT_EQ(run_cli({"solve", "--instance", (dir_ / "bad.json").string()}).code,
            cli::kInvalidInput);
  const std::string inst = write_instance("inst.json", 1, 1);
  EXPECT_EQ(run_cli({"solve", "--instance", inst, "--scheme", "greedy"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"sweep", "--preset", "fig9"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"sweep", "--preset", "fig2", "--seeds", "3..1"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({}).code, cli::kInvalidInput);
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRuns) {
  const std::string a = (dir_ / "a.csv").string();
  const std::string b = (dir_ / "b.csv").string();
  auto sweep = [](const std::string& out, const std::string& jobs) {
    return run_cli({"sweep", "--preset", "fig4", "--values", "2,4", "--seeds", "0..1", "--schemes",
                    "proposed,heuristic1,random_search", "--draws", "5", "--no-timing", "--jobs",
                    jobs, "--out", out});
  };
  const CliRun ra = sweep(a, "1");
  ASSERT_EQ(ra.code, cli::kOk) << ra.err;
  ASSERT_EQ(sweep(b, "3").code, cli::kOk);
  const std::string csv = read("a.csv");
  EXPECT_EQ(csv, read("b.csv"));
  EXPECT_EQ(csv.rfind("scheme,axis,value,seed,objective_s,feasible,wall_ms\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2 * 3);
  EXPECT_NE(ra.out.find("12 rows"), std::string::npos) << ra.out;
}

TEST_F(CliTest, SweepConfigFileAndExplicitAxis) {
  ScenarioConfig c;
  c.num_helpers = 1;
  c.num_tasks = 2;
  std::ofstream(dir_ / "cfg.json") << config_to_json(c).dump();
  const CliRun r =
      run_cli({"sweep", "--config", (dir_ / "cfg.json").string(), "--axis", "helper_freq",
               "--values", "1e9,2e9", "--seeds", "0", "--schemes", "exhaustive", "--no-timing"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("exhaustive,helper_freq,1000000000,0,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("exhaustive,helper_freq,2000000000,0,"), std::string::npos) << r.out;
}

TEST_F(CliTest, GenerateIsDeterministic) {
  const CliRun a = run_cli({"generate", "--preset", "fig3", "--seed", "8"});
  const CliRun b = run_cli({"generate", "--preset", "fig3", "--seed", "8"});
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(instance_from_json(Json::parse(a.out)).num_tasks(), 6u);
}

TEST_F(CliTest, VerifyWithOneSeedPasses) {
  const CliRun r = run_cli({"verify", "--seed-count", "1"});
  EXPECT_EQ(r.code, cli::kOk) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace mec
