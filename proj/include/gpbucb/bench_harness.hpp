#pragma once

// Bandit simulations: payoff instances, seeded trials under any policy and
// feedback schedule, multi-trial aggregation and CSV output.
//
// Random streams. Every stream is an mt19937_64 seeded with a splitmix64 hash:
//   derive_seed(master, stream, index) = splitmix64(splitmix64(master ^ stream) + index)
// with stream kInstanceStream for payoff draws and kNoiseStream for observation
// noise; `index` is the trial number. Gaussian variates use the Box-Muller
// transform on 53-bit uniforms, consuming two uniforms per pair of variates.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gpbucb/confidence.hpp"
#include "gpbucb/errors.hpp"
#include "gpbucb/feedback_schedule.hpp"
#include "gpbucb/gp_posterior.hpp"
#include "gpbucb/kernel.hpp"
#include "gpbucb/policies.hpp"

namespace gpbucb {

inline constexpr std::uint64_t kInstanceStream = 0x1;
inline constexpr std::uint64_t kNoiseStream = 0x2;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ stream) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// A decision set with known true payoffs.
struct PayoffInstance {
  DecisionSet decisions;
  Eigen::VectorXd payoffs;
  double optimum = 0.0;
  std::vector<std::size_t> optimal_indices;

  static PayoffInstance from(DecisionSet decisions, Eigen::VectorXd payoffs) {
    if (static_cast<std::size_t>(payoffs.size()) != decisions.size()) {
      throw InputError("payoff vector length does not match the decision set");
    }
    if (!payoffs.allFinite()) throw InputError("payoffs must be finite");
    const double best = payoffs.maxCoeff();
    std::vector<std::size_t> argmax;
    for (Eigen::Index i = 0; i < payoffs.size(); ++i) {
      if (payoffs[i] == best) argmax.push_back(static_cast<std::size_t>(i));
    }
    return PayoffInstance{std::move(decisions), std::move(payoffs), best, std::move(argmax)};
  }
};

/// Draws f = L z over the decision set, with L the Cholesky factor of K(D, D)
/// plus the smallest jitter in {0, 1e-10, 1e-8, 1e-6} x signal_variance that
/// factorizes, and z standard normal from the seeded stream.
inline PayoffInstance sample_gp_instance(const KernelSpec& kernel, const DecisionSet& decisions, std::uint64_t seed) {
  if (decisions.dimension() != kernel.dimension()) throw InputError("decision set dimension does not match the kernel");
  const Eigen::MatrixXd cov = eval_matrix(kernel, decisions.points());
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double jitter : {0.0, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd m = cov;
    m.diagonal().array() += jitter * kernel.signal_variance;
    llt.compute(m);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NumericalError("sample_gp_instance: kernel matrix not positive definite even with jitter");
  Rng rng(seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(decisions.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  Eigen::VectorXd f = llt.matrixL() * z;
  return PayoffInstance::from(decisions, std::move(f));
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string{} : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Loads a comma-separated table with a header row. Each data row is one
/// decision; `feature_columns` (all other columns when empty) give its
/// coordinates and `payoff_column` its payoff. Row numbers in errors are file
/// line numbers.
inline PayoffInstance load_tabular_instance(const std::string& path, const std::string& payoff_column,
                                            std::vector<std::string> feature_columns = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": missing header row");
  const auto header = detail::split_csv_line(line);

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t payoff_idx = column_of(payoff_column);
  if (feature_columns.empty()) {
    for (const auto& name : header) {
      if (name != payoff_column) feature_columns.push_back(name);
    }
  }
  if (feature_columns.empty()) throw InputError(path + ": no feature columns");
  std::vector<std::size_t> feature_idx;
  for (const auto& name : feature_columns) feature_idx.push_back(column_of(name));

  std::vector<std::vector<double>> rows;
  std::vector<double> payoffs;
  std::map<std::vector<double>, std::size_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError(path + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    }
    auto number = [&](std::size_t col) {
      const std::string& text = cells[col];
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw InputError(path + ": row " + std::to_string(line_no) + ", column '" + header[col] +
                         "': not a number: '" + text + "'");
      }
      return v;
    };
    std::vector<double> features;
    for (std::size_t c : feature_idx) features.push_back(number(c));
    const double payoff = number(payoff_idx);
    const auto [it, inserted] = seen.emplace(features, line_no);
    if (!inserted) {
      throw InputError(path + ": rows " + std::to_string(it->second) + " and " + std::to_string(line_no) +
                       " have identical features");
    }
    rows.push_back(std::move(features));
    payoffs.push_back(payoff);
  }
  if (rows.empty()) throw InputError(path + ": no data rows");
  return PayoffInstance::from(DecisionSet::from_rows(rows),
                              Eigen::Map<const Eigen::VectorXd>(payoffs.data(), static_cast<Eigen::Index>(payoffs.size())));
}

/// Writes an instance as a table readable by load_tabular_instance, with
/// features named x0..x{d-1} and the payoff column named "payoff".
inline void write_tabular_instance(const std::string& path, const PayoffInstance& instance) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write table " + path);
  const std::size_t d = instance.decisions.dimension();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << j << ',';
  out << "payoff\n";
  for (std::size_t i = 0; i < instance.decisions.size(); ++i) {
    const auto x = instance.decisions.point(i);
    for (std::size_t j = 0; j < d; ++j) out << detail::format_double(x[static_cast<Eigen::Index>(j)]) << ',';
    out << detail::format_double(instance.payoffs[static_cast<Eigen::Index>(i)]) << '\n';
  }
  if (!out) throw IoError("failed writing table " + path);
}

struct RoundRecord {
  std::size_t t = 0;
  std::size_t decision = 0;
  double outcome = 0.0;
  double regret = 0.0;
  double cumulative_regret = 0.0;
  double min_regret = 0.0;
  std::size_t recomputes = 0;

  double average_regret() const { return cumulative_regret / static_cast<double>(t); }
};

struct TrialTrace {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;

  double cumulative_regret() const { return rounds.empty() ? 0.0 : rounds.back().cumulative_regret; }
  double average_regret() const { return rounds.empty() ? 0.0 : rounds.back().average_regret(); }

  std::uint64_t total_recomputes() const {
    std::uint64_t acc = 0;
    for (const auto& r : rounds) acc += r.recomputes;
    return acc;
  }

  std::vector<std::size_t> decisions() const {
    std::vector<std::size_t> out;
    out.reserve(rounds.size());
    for (const auto& r : rounds) out.push_back(r.decision);
    return out;
  }
};

enum class NoiseModel { gaussian, bounded };

struct TrialSettings {
  PolicyKind policy = PolicyKind::gp_bucb;
  FeedbackSchedule schedule = FeedbackSchedule::sequential();
  ConfidenceParams confidence;
  std::size_t horizon = 1;
  double noise_variance = 1.0;
  /// Gaussian N(0, noise_variance) or uniform on [-sigma_n, sigma_n].
  NoiseModel noise = NoiseModel::gaussian;
  /// Seed of the observation-noise stream.
  std::uint64_t seed = 0;
  /// T^init for gp-bucb-init.
  std::size_t init_size = 0;
  /// Hold every outcome back as NaN until its delivery round.
  bool poison_undelivered = false;
};

/// Runs one trial: select, observe with noise, and deliver outcomes for rounds
/// fb[t] + 1 .. fb[t + 1] after round t.
inline TrialTrace run_trial(const PayoffInstance& instance, const KernelSpec& kernel, const TrialSettings& settings) {
  const std::size_t horizon = settings.horizon;
  if (horizon == 0) throw InputError("horizon must be at least 1");
  const DecisionSet& decisions = instance.decisions;

  const bool staged = settings.policy == PolicyKind::gp_bucb_init && settings.init_size > 0;
  if (settings.policy == PolicyKind::gp_bucb_init && settings.init_size > horizon) {
    throw InputError("horizon " + std::to_string(horizon) + " is shorter than T^init " +
                     std::to_string(settings.init_size));
  }
  FeedbackSchedule schedule = staged ? settings.schedule.with_initialization(settings.init_size, horizon)
                                     : settings.schedule;
  if (settings.policy == PolicyKind::gp_ucb && schedule.bound() != 1) {
    throw InputError("gp-ucb requires a sequential schedule (B = 1)");
  }
  if (schedule.horizon_limit() < horizon) throw InputError("custom schedule is shorter than the horizon");

  PolicyState state(decisions, GpPosterior(kernel, settings.noise_variance), schedule, settings.confidence);
  Rng noise(settings.seed);
  const double sigma_n = std::sqrt(settings.noise_variance);

  std::vector<double> visible(horizon, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> sealed(horizon, std::numeric_limits<double>::quiet_NaN());
  std::size_t delivered = 0;

  TrialTrace trace;
  trace.seed = settings.seed;
  trace.rounds.reserve(horizon);
  double cumulative = 0.0;
  double best = std::numeric_limits<double>::infinity();

  for (std::size_t t = 1; t <= horizon; ++t) {
    std::size_t idx = 0;
    try {
      switch (settings.policy) {
        case PolicyKind::gp_ucb: idx = state.select_gp_ucb(); break;
        case PolicyKind::gp_bucb: idx = state.select_gp_bucb(); break;
        case PolicyKind::gp_bucb_lazy: idx = state.select_gp_bucb_lazy(); break;
        case PolicyKind::nrb_ucb: idx = state.select_nrb(); break;
        case PolicyKind::ntb_ucb: idx = state.select_ntb(t - schedule.fb(t)); break;
        case PolicyKind::gp_bucb_init:
          idx = (staged && t <= settings.init_size) ? state.select_most_uncertain() : state.select_gp_bucb();
          break;
      }
    } catch (const NumericalError& e) {
      throw NumericalError("round " + std::to_string(t) + ": " + e.what());
    }

    const double eps = settings.noise == NoiseModel::gaussian ? sigma_n * noise.normal()
                                                              : sigma_n * (2.0 * noise.uniform() - 1.0);
    const double payoff = instance.payoffs[static_cast<Eigen::Index>(idx)];
    const double y = payoff + eps;
    if (settings.poison_undelivered) {
      sealed[t - 1] = y;
    } else {
      visible[t - 1] = y;
    }

    const double regret = instance.optimum - payoff;
    cumulative += regret;
    best = std::min(best, regret);
    trace.rounds.push_back({t, idx, y, regret, cumulative, best, state.last_recompute_count()});

    if (t < horizon) {
      const std::size_t upto = schedule.fb(t + 1);
      if (upto > delivered) {
        if (settings.poison_undelivered) {
          std::copy(sealed.begin() + static_cast<std::ptrdiff_t>(delivered),
                    sealed.begin() + static_cast<std::ptrdiff_t>(upto),
                    visible.begin() + static_cast<std::ptrdiff_t>(delivered));
        }
        try {
          state.deliver(std::span<const double>(visible).subspan(delivered, upto - delivered));
        } catch (const NumericalError& e) {
          throw NumericalError("round " + std::to_string(t) + ": " + e.what());
        }
        delivered = upto;
      }
    }
  }
  return trace;
}

/// Two-stage GP-BUCB: `init_size` rounds of uncertainty sampling with no
/// feedback, all of their outcomes delivered after round `init_size`, then
/// GP-BUCB under `schedule` for the remaining rounds. `confidence.C` is used as
/// given; callers normally set it with bound_C(..., CBoundMode::initialized).
inline TrialTrace run_two_stage(const PayoffInstance& instance, const KernelSpec& kernel,
                                const FeedbackSchedule& schedule, const ConfidenceParams& confidence,
                                std::size_t horizon, std::size_t init_size, double noise_variance,
                                std::uint64_t seed) {
  if (horizon < init_size) throw InputError("horizon is shorter than T^init");
  TrialSettings settings;
  settings.policy = PolicyKind::gp_bucb_init;
  settings.schedule = schedule;
  settings.confidence = confidence;
  settings.horizon = horizon;
  settings.noise_variance = noise_variance;
  settings.seed = seed;
  settings.init_size = init_size;
  return run_trial(instance, kernel, settings);
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` worker threads (0 means one
/// per hardware thread).
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

struct ExperimentPlan {
  KernelSpec kernel;
  /// Used for every trial when set (tabular replays).
  std::optional<PayoffInstance> fixed_instance;
  /// Domain for GP prior draws when no fixed instance is given.
  std::optional<DecisionSet> sample_domain;
  /// Draw a new payoff function per trial, or share one draw across trials.
  bool resample_per_trial = true;
  /// Per-trial settings; `seed` is replaced by the derived noise seed.
  TrialSettings trial;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
};

struct TrialFailure {
  std::size_t trial = 0;
  std::string message;
};

struct AggregateRow {
  std::size_t t = 0;
  double mean_avg_regret = 0.0;
  double se_avg_regret = 0.0;
  double mean_min_regret = 0.0;
  double se_min_regret = 0.0;
};

struct ExperimentResult {
  /// Successful trials, ordered by trial index.
  std::vector<TrialTrace> traces;
  std::vector<TrialFailure> failures;
  std::vector<AggregateRow> aggregate;
};

/// Mean and standard error of the mean, folded over traces in trial order.
inline std::vector<AggregateRow> aggregate_traces(const std::vector<TrialTrace>& traces, std::size_t horizon) {
  std::vector<AggregateRow> rows;
  if (traces.empty()) return rows;
  const double n = static_cast<double>(traces.size());
  for (std::size_t t = 1; t <= horizon; ++t) {
    double sum_avg = 0.0;
    double sum_min = 0.0;
    for (const auto& tr : traces) {
      sum_avg += tr.rounds[t - 1].average_regret();
      sum_min += tr.rounds[t - 1].min_regret;
    }
    AggregateRow row;
    row.t = t;
    row.mean_avg_regret = sum_avg / n;
    row.mean_min_regret = sum_min / n;
    if (traces.size() > 1) {
      double ss_avg = 0.0;
      double ss_min = 0.0;
      for (const auto& tr : traces) {
        const double da = tr.rounds[t - 1].average_regret() - row.mean_avg_regret;
        const double dm = tr.rounds[t - 1].min_regret - row.mean_min_regret;
        ss_avg += da * da;
        ss_min += dm * dm;
      }
      row.se_avg_regret = std::sqrt(ss_avg / (n - 1.0) / n);
      row.se_min_regret = std::sqrt(ss_min / (n - 1.0) / n);
    }
    rows.push_back(row);
  }
  return rows;
}

/// The payoff instance trial `trial` runs on.
inline PayoffInstance experiment_instance(const ExperimentPlan& plan, std::size_t trial) {
  if (plan.fixed_instance) return *plan.fixed_instance;
  if (!plan.sample_domain) throw ConfigError("experiment needs a fixed instance or a sampling domain");
  const std::size_t draw = plan.resample_per_trial ? trial : 0;
  return sample_gp_instance(plan.kernel, *plan.sample_domain, derive_seed(plan.master_seed, kInstanceStream, draw));
}

/// Runs every trial; a failing trial is recorded and the rest continue.
inline ExperimentResult run_experiment(const ExperimentPlan& plan) {
  if (plan.trials == 0) throw ConfigError("trials must be at least 1");
  std::vector<std::optional<TrialTrace>> slots(plan.trials);
  std::vector<std::optional<std::string>> errors(plan.trials);
  std::optional<PayoffInstance> shared;
  if (!plan.fixed_instance && !plan.resample_per_trial) shared = experiment_instance(plan, 0);

  parallel_for(plan.trials, plan.threads, [&](std::size_t i) {
    try {
      const PayoffInstance instance = shared ? *shared : experiment_instance(plan, i);
      TrialSettings settings = plan.trial;
      settings.seed = derive_seed(plan.master_seed, kNoiseStream, i);
      TrialTrace trace = run_trial(instance, plan.kernel, settings);
      trace.trial = i;
      slots[i] = std::move(trace);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ExperimentResult result;
  for (std::size_t i = 0; i < plan.trials; ++i) {
    if (slots[i]) result.traces.push_back(std::move(*slots[i]));
    if (errors[i]) result.failures.push_back({i, *errors[i]});
  }
  result.aggregate = aggregate_traces(result.traces, plan.trial.horizon);
  return result;
}

inline void write_trials_csv(std::ostream& out, const ExperimentResult& result) {
  out << "trial,t,decision_index,y,r_t,R_t,min_regret,recompute_count\n";
  for (const auto& trace : result.traces) {
    for (const auto& r : trace.rounds) {
      out << trace.trial << ',' << r.t << ',' << r.decision << ',' << detail::format_double(r.outcome) << ','
          << detail::format_double(r.regret) << ',' << detail::format_double(r.cumulative_regret) << ','
          << detail::format_double(r.min_regret) << ',' << r.recomputes << '\n';
    }
  }
}

inline void write_aggregate_csv(std::ostream& out, const ExperimentResult& result) {
  out << "t,mean_avg_regret,se_avg_regret,mean_min_regret,se_min_regret\n";
  for (const auto& row : result.aggregate) {
    out << row.t << ',' << detail::format_double(row.mean_avg_regret) << ','
        << detail::format_double(row.se_avg_regret) << ',' << detail::format_double(row.mean_min_regret) << ','
        << detail::format_double(row.se_min_regret) << '\n';
  }
}

}  // namespace gpbucb
