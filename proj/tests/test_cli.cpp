#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using namespace gpbucb;
using namespace gpbucb::cli;

namespace {

constexpr const char* kSmallConfig = R"(decision_set:
  lower: [0.0]
  upper: [1.0]
  resolution: [40]
kernel:
  family: matern
  smoothness: 2.5
  lengthscales: [0.1]
noise:
  variance: 0.01
policy: gp-bucb
schedule:
  kind: batch
  B: 4
confidence:
  delta: 0.1
  C: 0.25
horizon: 20
trials: 3
seed: 5
)";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gpbucb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gpbucb_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "config.yaml";
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, ValidateWritesNothing) {
  const auto dir = scratch_dir("validate");
  const auto cfg = write_config(dir, kSmallConfig);
  const auto out_dir = dir / "out";
  const auto r = invoke({"validate", cfg.string(), "--output-dir", out_dir.string()});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_FALSE(fs::exists(out_dir));
}

TEST(Cli, DeltaOutOfRangeNamesTheField) {
  const auto dir = scratch_dir("delta");
  const auto cfg = write_config(dir, kSmallConfig);
  const auto r = invoke({"validate", cfg.string(), "--set", "confidence.delta=1.5"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("confidence.delta: must lie in (0, 1), got 1.5"), std::string::npos) << r.err;
}

TEST(Cli, UnknownPolicyListsValidNames) {
  const auto dir = scratch_dir("policy");
  const auto cfg = write_config(dir, kSmallConfig);
  const auto r = invoke({"validate", cfg.string(), "--set", "policy=sm-ucb"});
  EXPECT_EQ(r.code, kConfigError);
  for (auto name : kPolicyNames) EXPECT_NE(r.err.find(std::string(name)), std::string::npos) << name;
}

TEST(Cli, ReportsEveryProblemAtOnce) {
  const auto dir = scratch_dir("many");
  const auto cfg = write_config(dir, std::string(kSmallConfig) + "bogus: 1\n");
  const auto r = invoke({"validate", cfg.string(), "--set", "noise.variance=-1", "--set", "horizon=0"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("bogus"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("noise.variance"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("horizon"), std::string::npos) << r.err;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kConfigError);
  EXPECT_EQ(invoke({"validate", "/nonexistent/config.yaml"}).code, kIoError);
  const auto dir = scratch_dir("codes");
  EXPECT_EQ(invoke({"validate", write_config(dir, "horizon: [1\n").string()}).code, kConfigError);
  EXPECT_EQ(invoke({"--help"}).code, kOk);

  // A regular file where the output directory should go.
  const auto cfg = write_config(dir, kSmallConfig);
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(invoke({"run", cfg.string(), "--output-dir", (dir / "blocker" / "sub").string()}).code, kIoError);

  // GP-UCB with a batch schedule fails in every trial.
  const auto bad = write_config(dir, std::string(kSmallConfig));
  auto root = load_config_file(bad.string());
  EXPECT_THROW(
      {
        apply_override(root, "policy=gp-ucb");
        parse_config(root);
      },
      ConfigError);
}

TEST(Cli, InitSizeTable) {
  const auto r = invoke({"init-size", "--family", "matern", "-B", "11", "--nu", "1", "--epsilon", "0.5"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("T_init: 100\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("multiplier: 2.7182818284590451 (e)"), std::string::npos) << r.out;
  EXPECT_EQ(invoke({"init-size", "--family", "cosine", "-B", "3"}).code, kConfigError);
  EXPECT_EQ(invoke({"init-size", "--family", "matern", "-B", "3", "--epsilon", "1.5"}).code, kConfigError);
}

TEST(Cli, RunIsByteIdenticalAcrossInvocations) {
  const auto dir = scratch_dir("repeat");
  const auto cfg = write_config(dir, kSmallConfig);
  const auto a = invoke({"run", cfg.string(), "--output-dir", (dir / "a").string()});
  const auto b = invoke({"run", cfg.string(), "--output-dir", (dir / "b").string(), "--threads", "2"});
  ASSERT_EQ(a.code, kOk) << a.err;
  ASSERT_EQ(b.code, kOk) << b.err;
  for (const char* f : {"trials.csv", "aggregate.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const std::string trials = slurp(dir / "a" / "trials.csv");
  EXPECT_EQ(trials.rfind("trial,t,decision_index,y,r_t,R_t,min_regret,recompute_count\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(trials.begin(), trials.end(), '\n')), 1u + 3u * 20u);
  const std::string agg = slurp(dir / "a" / "aggregate.csv");
  EXPECT_EQ(agg.rfind("t,mean_avg_regret,se_avg_regret,mean_min_regret,se_min_regret\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "a" / "summary.txt"));

  const auto c = invoke({"run", cfg.string(), "--output-dir", (dir / "c").string(), "--seed", "6"});
  ASSERT_EQ(c.code, kOk);
  EXPECT_NE(slurp(dir / "a" / "trials.csv"), slurp(dir / "c" / "trials.csv"));
}

TEST(Cli, OutputDirPrecedence) {
  const auto dir = scratch_dir("precedence");
  const auto cfg = write_config(dir, std::string(kSmallConfig) + "output_dir: " + (dir / "from_file").string() + "\n");
  invoke({"run", cfg.string(), "--set", "trials=1"});
  EXPECT_TRUE(fs::exists(dir / "from_file" / "trials.csv"));

  ::setenv("GPBUCB_OUTPUT_DIR", (dir / "from_env").string().c_str(), 1);
  invoke({"run", cfg.string(), "--set", "trials=1"});
  EXPECT_TRUE(fs::exists(dir / "from_env" / "trials.csv"));
  invoke({"run", cfg.string(), "--set", "trials=1", "--output-dir", (dir / "from_flag").string()});
  ::unsetenv("GPBUCB_OUTPUT_DIR");
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "trials.csv"));
}

TEST(Cli, InfogainReport) {
  const auto dir = scratch_dir("infogain");
  const auto cfg = write_config(dir, kSmallConfig);
  const auto r = invoke({"infogain", cfg.string(), "--steps", "6", "--set", "initialization.size=4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("step,decision_index,gain,cumulative,upper_bracket\n", 0), 0u);
  for (const char* key : {"mutual_information_of_greedy_set,", "B,4", "C_raw,", "T_init,4", "C_initialized,",
                          "init_bound_holds,true"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST(Config, TabularSourceLoadsTable) {
  const auto dir = scratch_dir("tabular");
  std::ofstream(dir / "t.csv") << "x,payoff\n0,1\n0.5,2\n1,0\n";
  const auto cfg = write_config(dir, "instance:\n  source: tabular\n  path: " + (dir / "t.csv").string() +
                                         "\nkernel:\n  lengthscales: [0.3]\nschedule:\n  B: 2\nhorizon: 5\ntrials: 2\n");
  const auto parsed = parse_config(load_config_file(cfg.string()));
  ASSERT_TRUE(parsed.table.has_value());
  EXPECT_EQ(parsed.decisions().size(), 3u);
  const auto r = invoke({"run", cfg.string(), "--output-dir", (dir / "out").string()});
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST(Config, AutomaticCFollowsPolicy) {
  YAML::Node root = YAML::Load(kSmallConfig);
  root["confidence"].remove("C");
  root["decision_set"]["resolution"][0] = 10;
  root["horizon"] = 10;
  auto cfg = parse_config(root);
  EXPECT_GT(resolve(cfg).C, 0.0);
  root["policy"] = "nrb-ucb";
  EXPECT_EQ(resolve(parse_config(root)).C, 0.0);
  root["policy"] = "gp-bucb-init";
  root["initialization"]["size"] = 3;
  const auto init = resolve(parse_config(root));
  EXPECT_EQ(init.init_size, 3u);
  root["policy"] = "gp-bucb";
  EXPECT_LE(init.C, resolve(parse_config(root)).C * (1.0 + 1e-12));
}

TEST(Cli, SampleConfigValidates) {
  const auto r = invoke({"validate", std::string(GPBUCB_SOURCE_DIR) + "/configs/matern_benchmark.yaml"});
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST(Cli, BinaryExitStatus) {
  const auto dir = scratch_dir("binary");
  const auto good = write_config(dir, kSmallConfig);
  const std::string tool = GPBUCB_TOOL_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("validate " + good.string()), kOk);
  EXPECT_EQ(status("validate " + good.string() + " --set confidence.delta=1.5"), kConfigError);
  EXPECT_EQ(status("validate " + (dir / "missing.yaml").string()), kIoError);
  EXPECT_EQ(status("init-size --family matern -B 11"), kOk);
}
