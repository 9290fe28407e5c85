#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "gpbucb/bench_harness.hpp"
#include "gpbucb/confidence.hpp"
#include "gpbucb/errors.hpp"
#include "gpbucb/feedback_schedule.hpp"
#include "gpbucb/kernel.hpp"
#include "gpbucb/policies.hpp"

namespace gpbucb::cli {

/// Every problem found in a config, reported together.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class CMode { automatic, value, raw, initialized };

struct ExperimentConfig {
  // instance
  std::string source = "gp-sample";
  std::string table_path;
  std::string payoff_column = "payoff";
  std::vector<std::string> feature_columns;
  bool resample_per_trial = true;
  std::optional<PayoffInstance> table;

  // decision set (gp-sample)
  std::vector<double> lower{0.0};
  std::vector<double> upper{1.0};
  std::vector<std::size_t> resolution{1000};

  KernelSpec kernel = KernelSpec::matern(1.0, Eigen::VectorXd::Constant(1, 0.1), MaternSmoothness::five_halves);
  double noise_variance = 0.01;
  NoiseModel noise_model = NoiseModel::gaussian;

  PolicyKind policy = PolicyKind::gp_bucb;
  FeedbackSchedule schedule = FeedbackSchedule::batch(10);

  std::string regime = "finite";
  double delta = 0.1;
  CMode c_mode = CMode::automatic;
  double c_value = 0.0;
  double side_length = 1.0;
  double a = 1.0;
  double b = 1.0;
  double rkhs_norm = 1.0;

  /// Unset means: derive from the growth bound.
  std::optional<std::size_t> init_size;
  GammaGrowthBound growth = MaternGammaBound{};

  std::size_t horizon = 200;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  unsigned threads = 0;
  bool poison_undelivered = false;

  DecisionSet decisions() const;
};

/// Reads a YAML file; an empty file is an empty mapping.
YAML::Node load_config_file(const std::string& path);

/// Applies one `dotted.key=value` override; the value is parsed as YAML.
void apply_override(YAML::Node& root, const std::string& assignment);

/// Validates and converts a config tree. Throws ConfigErrors listing every problem.
ExperimentConfig parse_config(const YAML::Node& root);

/// Resolved experiment: everything derived from the config (C, T^init, gamma).
struct ResolvedExperiment {
  ExperimentPlan plan;
  double C = 0.0;
  std::size_t init_size = 0;
  double init_multiplier = 1.0;
};

ResolvedExperiment resolve(const ExperimentConfig& config);

std::string describe(const ExperimentConfig& config, const ResolvedExperiment& resolved);

}  // namespace gpbucb::cli
