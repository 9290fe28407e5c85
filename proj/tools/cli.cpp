#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "gpbucb/bench_harness.hpp"
#include "gpbucb/infogain.hpp"

namespace gpbucb::cli {

namespace {

constexpr const char* kOutputDirEnv = "GPBUCB_OUTPUT_DIR";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args, bool run_flags) {
  cmd->add_option("config", args.path, "Experiment config (YAML)")->required();
  cmd->add_option("--set", args.overrides, "Override a config field, e.g. --set schedule.B=5");
  cmd->add_option("--output-dir", args.output_dir, "Output directory (overrides " + std::string(kOutputDirEnv) + ")");
  if (run_flags) {
    cmd->add_option("--seed", args.seed, "Master seed");
    cmd->add_option("--threads", args.threads, "Worker threads (0 = one per hardware thread)");
  }
}

// Precedence: flag > environment > file > default.
ExperimentConfig load(const ConfigArgs& args) {
  YAML::Node root = load_config_file(args.path);
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    apply_override(root, std::string("output_dir=") + env);
  }
  for (const auto& o : args.overrides) apply_override(root, o);
  if (!args.output_dir.empty()) apply_override(root, "output_dir=" + args.output_dir);
  if (args.seed) apply_override(root, "seed=" + std::to_string(*args.seed));
  if (args.threads) apply_override(root, "threads=" + std::to_string(*args.threads));
  return parse_config(root);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << contents;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

int cmd_validate(const ConfigArgs& args, std::ostream& out) {
  const ExperimentConfig cfg = load(args);
  out << "config ok: " << args.path << '\n';
  out << "policy: " << policy_name(cfg.policy) << ", horizon: " << cfg.horizon << ", trials: " << cfg.trials << '\n';
  return kOk;
}

int cmd_run(const ConfigArgs& args, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(args);
  const ResolvedExperiment resolved = resolve(cfg);
  const ExperimentResult result = run_experiment(resolved.plan);

  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::ostringstream trials;
  write_trials_csv(trials, result);
  write_file(dir / "trials.csv", trials.str());
  std::ostringstream aggregate;
  write_aggregate_csv(aggregate, result);
  write_file(dir / "aggregate.csv", aggregate.str());

  std::ostringstream summary;
  summary << describe(cfg, resolved);
  summary << "completed trials: " << result.traces.size() << '\n';
  summary << "failed trials: " << result.failures.size() << '\n';
  for (const auto& f : result.failures) summary << "  trial " << f.trial << ": " << f.message << '\n';
  if (!result.aggregate.empty()) {
    const auto& last = result.aggregate.back();
    summary << "final mean average regret: " << fmt(last.mean_avg_regret) << " (se " << fmt(last.se_avg_regret)
            << ")\n";
    summary << "final mean minimum regret: " << fmt(last.mean_min_regret) << " (se " << fmt(last.se_min_regret)
            << ")\n";
  }
  write_file(dir / "summary.txt", summary.str());
  out << summary.str();

  if (!result.failures.empty()) {
    err << "error: " << result.failures.size() << " of " << cfg.trials << " trials failed (see summary.txt)\n";
    return kNumericalError;
  }
  return kOk;
}

int cmd_infogain(const ConfigArgs& args, std::optional<std::size_t> steps_arg, std::ostream& out) {
  const ExperimentConfig cfg = load(args);
  const DecisionSet decisions = cfg.decisions();
  const std::size_t steps = steps_arg.value_or(cfg.horizon);
  const std::size_t batch = cfg.schedule.bound();

  const InfoGainReport report = greedy_gamma(cfg.kernel, cfg.noise_variance, decisions, steps);
  out << "step,decision_index,gain,cumulative,upper_bracket\n";
  const auto cumulative = report.cumulative();
  for (std::size_t s = 0; s < report.selected.size(); ++s) {
    out << s + 1 << ',' << report.selected[s] << ',' << fmt(report.greedy_curve[s]) << ',' << fmt(cumulative[s])
        << ',' << fmt(cumulative[s] * kGreedyBracket) << '\n';
  }
  Eigen::MatrixXd chosen(static_cast<Eigen::Index>(decisions.dimension()),
                         static_cast<Eigen::Index>(report.selected.size()));
  for (std::size_t s = 0; s < report.selected.size(); ++s) {
    chosen.col(static_cast<Eigen::Index>(s)) = decisions.point(report.selected[s]);
  }
  out << "mutual_information_of_greedy_set," << fmt(mutual_information(cfg.kernel, cfg.noise_variance, chosen)) << '\n';
  out << "B," << batch << '\n';
  out << "C_raw," << fmt(bound_C(cfg.kernel, cfg.noise_variance, decisions, batch, CBoundMode::raw)) << '\n';

  std::size_t init = cfg.init_size.value_or(0);
  if (!cfg.init_size) init = t_init_size(cfg.growth, batch).size;
  out << "T_init," << init << '\n';
  if (init > 0 && batch >= 2) {
    out << "C_initialized,"
        << fmt(bound_C(cfg.kernel, cfg.noise_variance, decisions, batch, CBoundMode::initialized, init)) << '\n';
    const Lemma2Check check = check_lemma2(cfg.kernel, cfg.noise_variance, decisions, batch, init);
    out << "init_bound_lhs," << fmt(check.lhs) << '\n';
    out << "init_bound_lhs_upper," << fmt(check.lhs_upper) << '\n';
    out << "init_bound_rhs," << fmt(check.rhs) << '\n';
    out << "init_bound_holds," << (check.holds ? "true" : "false") << '\n';
  }
  return kOk;
}

struct InitArgs {
  std::string family;
  std::size_t batch = 0;
  double nu = 1.0;
  double epsilon = 0.5;
  double eta = 1.0;
  double dimension = 1.0;
};

int cmd_init_size(const InitArgs& a, std::ostream& out) {
  GammaGrowthBound growth;
  std::string multiplier_name;
  if (a.family == "matern") {
    growth = MaternGammaBound{a.nu, a.epsilon};
    multiplier_name = "e";
  } else if (a.family == "linear") {
    growth = LinearGammaBound{a.eta, a.dimension};
    multiplier_name = "exp(2/e)";
  } else if (a.family == "rbf") {
    growth = RbfGammaBound{a.eta, a.dimension};
    multiplier_name = "exp((2d/e)^d)";
  } else {
    throw ConfigError("--family must be linear, matern or rbf, got '" + a.family + "'");
  }
  const InitSize size = t_init_size(growth, a.batch);
  out << "T_init: " << size.size << '\n';
  out << "multiplier: " << fmt(size.multiplier) << " (" << multiplier_name << ")\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batch Gaussian process bandit experiments (GP-UCB, GP-BUCB and baselines)", "gpbucb"};
  app.require_subcommand(1);

  ConfigArgs validate_args, run_args, info_args;
  std::optional<std::size_t> info_steps;
  InitArgs init_args;

  auto* validate = app.add_subcommand("validate", "Parse and check a config; writes nothing");
  add_config_args(validate, validate_args, false);
  auto* run = app.add_subcommand("run", "Run an experiment and write trials.csv, aggregate.csv, summary.txt");
  add_config_args(run, run_args, true);
  auto* info = app.add_subcommand("infogain", "Greedy information gain, C bounds and the initialization check");
  add_config_args(info, info_args, false);
  info->add_option("--steps", info_steps, "Greedy steps (default: the config horizon)");
  auto* init = app.add_subcommand("init-size", "T_init and regret multiplier for a kernel growth bound");
  init->add_option("--family", init_args.family, "linear, matern or rbf")->required();
  init->add_option("-B,--batch", init_args.batch, "Batch size B")->required()->check(CLI::PositiveNumber);
  init->add_option("--nu", init_args.nu, "Matern: gamma_t <= nu t^epsilon");
  init->add_option("--epsilon", init_args.epsilon, "Matern exponent in (0, 1)");
  init->add_option("--eta", init_args.eta, "Linear and rbf bound constant");
  init->add_option("--dimension", init_args.dimension, "Linear and rbf dimension d");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kConfigError;
    }

    if (*validate) return cmd_validate(validate_args, out);
    if (*run) return cmd_run(run_args, out, err);
    if (*info) return cmd_infogain(info_args, info_steps, out);
    if (*init) return cmd_init_size(init_args, out);
    return kConfigError;
  } catch (const ConfigErrors& e) {
    err << "config error" << (e.errors().size() > 1 ? "s" : "") << ":\n";
    for (const auto& line : e.errors()) err << "  " << line << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace gpbucb::cli
