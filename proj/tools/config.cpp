#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "gpbucb/infogain.hpp"

namespace gpbucb::cli {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string key_path(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

// Collects conversion and range errors while walking the tree.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& message) { errors.push_back(path + ": " + message); }

  // The section as a mapping with only `allowed` keys; an undefined node is an empty section.
  YAML::Node section(const YAML::Node& parent, const std::string& key, const std::string& path,
                     std::initializer_list<const char*> allowed) {
    YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!node.IsMap()) {
      error(path, "expected a mapping");
      return YAML::Node(YAML::NodeType::Map);
    }
    check_keys(node, path, allowed);
    return node;
  }

  void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) {
        error(key_path(path, key), "unknown key (expected one of: " +
                                       join(std::vector<std::string>(known.begin(), known.end()), ", ") + ")");
      }
    }
  }

  static bool present(const YAML::Node& node, const std::string& key) {
    const YAML::Node v = node[key];
    return v.IsDefined() && !v.IsNull();
  }

  bool text(const YAML::Node& node, const std::string& key, const std::string& path, std::string& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    if (!v.IsScalar()) {
      error(path, "expected a string");
      return false;
    }
    out = v.Scalar();
    return true;
  }

  bool number(const YAML::Node& node, const std::string& key, const std::string& path, double& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    double value = 0.0;
    if (!v.IsScalar() || !YAML::convert<double>::decode(v, value) || !std::isfinite(value)) {
      error(path, "expected a finite number");
      return false;
    }
    out = value;
    return true;
  }

  bool integer(const YAML::Node& node, const std::string& key, const std::string& path, std::uint64_t& out,
               std::uint64_t min_value = 0) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    if (!v.IsScalar() || !parse_uint(v.Scalar(), out)) {
      error(path, "expected a nonnegative integer");
      return false;
    }
    if (out < min_value) {
      error(path, "must be at least " + std::to_string(min_value));
      return false;
    }
    return true;
  }

  bool boolean(const YAML::Node& node, const std::string& key, const std::string& path, bool& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    bool value = false;
    if (!v.IsScalar() || !YAML::convert<bool>::decode(v, value)) {
      error(path, "expected true or false");
      return false;
    }
    out = value;
    return true;
  }

  // A scalar is read as a one-element list.
  bool numbers(const YAML::Node& node, const std::string& key, const std::string& path, std::vector<double>& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    std::vector<double> values;
    bool ok = true;
    auto take = [&](const YAML::Node& item) {
      double x = 0.0;
      if (!item.IsScalar() || !YAML::convert<double>::decode(item, x) || !std::isfinite(x)) {
        ok = false;
      } else {
        values.push_back(x);
      }
    };
    if (v.IsSequence()) {
      for (const auto& item : v) take(item);
    } else {
      take(v);
    }
    if (!ok || values.empty()) {
      error(path, "expected a number or a non-empty list of numbers");
      return false;
    }
    out = std::move(values);
    return true;
  }

  bool integers(const YAML::Node& node, const std::string& key, const std::string& path,
                std::vector<std::uint64_t>& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    std::vector<std::uint64_t> values;
    bool ok = true;
    auto take = [&](const YAML::Node& item) {
      std::uint64_t x = 0;
      if (!item.IsScalar() || !parse_uint(item.Scalar(), x)) {
        ok = false;
      } else {
        values.push_back(x);
      }
    };
    if (v.IsSequence()) {
      for (const auto& item : v) take(item);
    } else {
      take(v);
    }
    if (!ok || values.empty()) {
      error(path, "expected a nonnegative integer or a non-empty list of them");
      return false;
    }
    out = std::move(values);
    return true;
  }

  bool strings(const YAML::Node& node, const std::string& key, const std::string& path,
               std::vector<std::string>& out) {
    if (!present(node, key)) return false;
    const YAML::Node v = node[key];
    if (!v.IsSequence()) {
      error(path, "expected a list of strings");
      return false;
    }
    out.clear();
    for (const auto& item : v) {
      if (!item.IsScalar()) {
        error(path, "expected a list of strings");
        return false;
      }
      out.push_back(item.Scalar());
    }
    return true;
  }

 private:
  static bool parse_uint(const std::string& text, std::uint64_t& out) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return false;
    try {
      out = std::stoull(text);
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }
};

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> errors)
    : ConfigError(join(errors, "\n")), errors_(std::move(errors)) {}

DecisionSet ExperimentConfig::decisions() const {
  if (table) return table->decisions;
  return DecisionSet::grid(lower, upper, resolution);
}

YAML::Node load_config_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot read config file " + path);
  try {
    YAML::Node root = YAML::LoadFile(path);
    if (!root.IsDefined() || root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return root;
  } catch (const YAML::BadFile&) {
    throw IoError("cannot read config file " + path);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  YAML::Node value;
  try {
    value = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + assignment + "': " + e.what());
  }
  if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    parts.push_back(part);
  }
  // yaml-cpp nodes are handles; walk by reassigning copies that alias the tree.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next.IsDefined() || next.IsNull() || !next.IsMap()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    }
    chain.push_back(next);
  }
  chain.back()[parts.back()] = value;
}

ExperimentConfig parse_config(const YAML::Node& root) {
  Reader r;
  ExperimentConfig cfg;
  if (!root.IsMap()) throw ConfigErrors({"config: top level must be a mapping"});
  r.check_keys(root, "",
               {"instance", "decision_set", "kernel", "noise", "policy", "schedule", "confidence", "initialization",
                "horizon", "trials", "seed", "output_dir", "threads", "poison_undelivered"});

  // Scalars first: later sections check against them.
  std::uint64_t u = 0;
  if (r.integer(root, "horizon", "horizon", u, 1)) cfg.horizon = u;
  if (r.integer(root, "trials", "trials", u, 1)) cfg.trials = u;
  if (r.integer(root, "seed", "seed", u)) cfg.seed = u;
  if (r.integer(root, "threads", "threads", u)) {
    if (u > 1024) {
      r.error("threads", "must be at most 1024");
    } else {
      cfg.threads = static_cast<unsigned>(u);
    }
  }
  r.text(root, "output_dir", "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) r.error("output_dir", "must not be empty");
  r.boolean(root, "poison_undelivered", "poison_undelivered", cfg.poison_undelivered);

  std::string policy;
  if (r.text(root, "policy", "policy", policy)) {
    if (const auto kind = policy_from_name(policy)) {
      cfg.policy = *kind;
    } else {
      std::vector<std::string> names(std::begin(kPolicyNames), std::end(kPolicyNames));
      r.error("policy", "unknown policy '" + policy + "'; valid policies: " + join(names, ", "));
    }
  }

  // Instance and decision set.
  const YAML::Node inst =
      r.section(root, "instance", "instance", {"source", "path", "payoff_column", "feature_columns", "resample_per_trial"});
  r.text(inst, "source", "instance.source", cfg.source);
  r.text(inst, "path", "instance.path", cfg.table_path);
  r.text(inst, "payoff_column", "instance.payoff_column", cfg.payoff_column);
  r.strings(inst, "feature_columns", "instance.feature_columns", cfg.feature_columns);
  r.boolean(inst, "resample_per_trial", "instance.resample_per_trial", cfg.resample_per_trial);

  const YAML::Node grid = r.section(root, "decision_set", "decision_set", {"lower", "upper", "resolution"});
  std::size_t dimension = 0;
  if (cfg.source == "tabular") {
    if (grid.size() > 0) r.error("decision_set", "not used with a tabular instance (decisions come from the table)");
    if (cfg.table_path.empty()) {
      r.error("instance.path", "required for a tabular instance");
    } else if (!std::filesystem::is_regular_file(cfg.table_path)) {
      r.error("instance.path", "file not found: " + cfg.table_path);
    } else {
      try {
        cfg.table = load_tabular_instance(cfg.table_path, cfg.payoff_column, cfg.feature_columns);
        dimension = cfg.table->decisions.dimension();
      } catch (const std::exception& e) {
        r.error("instance.path", e.what());
      }
    }
  } else if (cfg.source == "gp-sample") {
    if (!cfg.table_path.empty()) r.error("instance.path", "only used with source: tabular");
    r.numbers(grid, "lower", "decision_set.lower", cfg.lower);
    r.numbers(grid, "upper", "decision_set.upper", cfg.upper);
    std::vector<std::uint64_t> res;
    if (r.integers(grid, "resolution", "decision_set.resolution", res)) {
      cfg.resolution.assign(res.begin(), res.end());
    }
    dimension = cfg.lower.size();
    if (cfg.upper.size() != dimension) {
      r.error("decision_set.upper", "has " + std::to_string(cfg.upper.size()) + " entries, lower has " +
                                        std::to_string(dimension));
    }
    if (cfg.resolution.size() == 1 && dimension > 1) cfg.resolution.assign(dimension, cfg.resolution.front());
    if (cfg.resolution.size() != dimension) r.error("decision_set.resolution", "length does not match lower");
    double total = 1.0;
    for (std::size_t j = 0; j < std::min(dimension, cfg.upper.size()); ++j) {
      if (!(cfg.upper[j] >= cfg.lower[j])) r.error("decision_set.upper", "entry " + std::to_string(j) + " below lower");
    }
    for (std::size_t k : cfg.resolution) {
      if (k == 0) r.error("decision_set.resolution", "entries must be at least 1");
      total *= static_cast<double>(k);
    }
    if (total > 20000.0) r.error("decision_set.resolution", "grid has more than 20000 points");
  } else {
    r.error("instance.source", "must be gp-sample or tabular, got '" + cfg.source + "'");
  }

  // Kernel.
  const YAML::Node kern =
      r.section(root, "kernel", "kernel", {"family", "signal_variance", "lengthscales", "smoothness"});
  std::string family = "matern";
  r.text(kern, "family", "kernel.family", family);
  double signal_variance = 1.0;
  if (r.number(kern, "signal_variance", "kernel.signal_variance", signal_variance) && !(signal_variance > 0.0)) {
    r.error("kernel.signal_variance", "must be > 0");
  }
  std::vector<double> lengthscales{0.1};
  r.numbers(kern, "lengthscales", "kernel.lengthscales", lengthscales);
  if (lengthscales.size() == 1 && dimension > 1) lengthscales.assign(dimension, lengthscales.front());
  if (dimension > 0 && lengthscales.size() != dimension) {
    r.error("kernel.lengthscales", "has " + std::to_string(lengthscales.size()) + " entries, decisions have dimension " +
                                       std::to_string(dimension));
  }
  for (double l : lengthscales) {
    if (!(l > 0.0)) {
      r.error("kernel.lengthscales", "entries must be > 0");
      break;
    }
  }
  MaternSmoothness smoothness = MaternSmoothness::five_halves;
  double nu = 2.5;
  if (r.number(kern, "smoothness", "kernel.smoothness", nu)) {
    if (family != "matern") r.error("kernel.smoothness", "only used by the matern family");
    if (nu == 0.5) {
      smoothness = MaternSmoothness::half;
    } else if (nu == 1.5) {
      smoothness = MaternSmoothness::three_halves;
    } else if (nu != 2.5) {
      r.error("kernel.smoothness", "must be 0.5, 1.5 or 2.5");
    }
  }
  {
    const Eigen::VectorXd ls = Eigen::Map<const Eigen::VectorXd>(lengthscales.data(),
                                                                 static_cast<Eigen::Index>(lengthscales.size()));
    try {
      if (family == "matern") {
        cfg.kernel = KernelSpec::matern(signal_variance, ls, smoothness);
      } else if (family == "rbf") {
        cfg.kernel = KernelSpec::rbf(signal_variance, ls);
      } else if (family == "linear") {
        cfg.kernel = KernelSpec::linear(ls);
      } else {
        r.error("kernel.family", "must be rbf, matern or linear, got '" + family + "'");
      }
    } catch (const InputError&) {
      // Already reported field by field.
    }
  }

  // Noise.
  const YAML::Node noise = r.section(root, "noise", "noise", {"variance", "model"});
  if (r.number(noise, "variance", "noise.variance", cfg.noise_variance) && !(cfg.noise_variance > 0.0)) {
    r.error("noise.variance", "must be > 0");
  }
  std::string model = "gaussian";
  r.text(noise, "model", "noise.model", model);
  if (model == "gaussian") {
    cfg.noise_model = NoiseModel::gaussian;
  } else if (model == "bounded") {
    cfg.noise_model = NoiseModel::bounded;
  } else {
    r.error("noise.model", "must be gaussian or bounded, got '" + model + "'");
  }

  // Schedule.
  const YAML::Node sched = r.section(root, "schedule", "schedule", {"kind", "B", "fb"});
  std::string kind = "batch";
  r.text(sched, "kind", "schedule.kind", kind);
  std::uint64_t bsize = 10;
  const bool has_b = r.integer(sched, "B", "schedule.B", bsize, 1);
  if (kind == "sequential") {
    if (has_b && bsize != 1) r.error("schedule.B", "sequential schedules have B = 1");
    cfg.schedule = FeedbackSchedule::sequential();
  } else if (kind == "batch") {
    cfg.schedule = FeedbackSchedule::batch(bsize);
  } else if (kind == "delay") {
    cfg.schedule = FeedbackSchedule::delay(bsize);
  } else if (kind == "custom") {
    if (has_b) r.error("schedule.B", "custom schedules derive B from fb");
    std::vector<std::uint64_t> fb;
    if (!r.integers(sched, "fb", "schedule.fb", fb)) {
      if (!Reader::present(sched, "fb")) r.error("schedule.fb", "required for a custom schedule");
    } else {
      try {
        cfg.schedule = FeedbackSchedule::custom(std::vector<std::size_t>(fb.begin(), fb.end()));
        if (cfg.schedule.horizon_limit() < cfg.horizon) {
          r.error("schedule.fb", "lists " + std::to_string(fb.size()) + " rounds, horizon is " +
                                     std::to_string(cfg.horizon));
        }
      } catch (const std::exception& e) {
        r.error("schedule.fb", e.what());
      }
    }
  } else {
    r.error("schedule.kind", "must be sequential, batch, delay or custom, got '" + kind + "'");
  }
  if (kind != "custom" && Reader::present(sched, "fb")) r.error("schedule.fb", "only used by custom schedules");
  if (cfg.policy == PolicyKind::gp_ucb && cfg.schedule.bound() != 1) {
    r.error("policy", "gp-ucb needs a sequential schedule (B = 1)");
  }

  // Confidence.
  const YAML::Node conf =
      r.section(root, "confidence", "confidence", {"regime", "delta", "C", "side_length", "a", "b", "rkhs_norm"});
  r.text(conf, "regime", "confidence.regime", cfg.regime);
  if (r.number(conf, "delta", "confidence.delta", cfg.delta) && !(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    r.error("confidence.delta", "must lie in (0, 1), got " + fmt(cfg.delta));
  }
  if (Reader::present(conf, "C")) {
    const YAML::Node c = conf["C"];
    double value = 0.0;
    if (c.IsScalar() && c.Scalar() == "auto") {
      cfg.c_mode = CMode::automatic;
    } else if (c.IsScalar() && c.Scalar() == "raw") {
      cfg.c_mode = CMode::raw;
    } else if (c.IsScalar() && c.Scalar() == "initialized") {
      cfg.c_mode = CMode::initialized;
    } else if (c.IsScalar() && YAML::convert<double>::decode(c, value) && std::isfinite(value)) {
      if (value < 0.0) r.error("confidence.C", "must be >= 0");
      cfg.c_mode = CMode::value;
      cfg.c_value = value;
    } else {
      r.error("confidence.C", "expected auto, raw, initialized or a number >= 0");
    }
  }
  const bool compact = cfg.regime == "compact";
  const bool rkhs = cfg.regime == "rkhs";
  if (cfg.regime != "finite" && !compact && !rkhs) {
    r.error("confidence.regime", "must be finite, compact or rkhs, got '" + cfg.regime + "'");
  }
  for (const char* k : {"side_length", "a", "b"}) {
    double* slot = std::string(k) == "side_length" ? &cfg.side_length : std::string(k) == "a" ? &cfg.a : &cfg.b;
    if (r.number(conf, k, key_path("confidence", k), *slot)) {
      if (!compact) r.error(key_path("confidence", k), "only used by the compact regime");
      if (!(*slot > 0.0)) r.error(key_path("confidence", k), "must be > 0");
    }
  }
  if (r.number(conf, "rkhs_norm", "confidence.rkhs_norm", cfg.rkhs_norm)) {
    if (!rkhs) r.error("confidence.rkhs_norm", "only used by the rkhs regime");
    if (!(cfg.rkhs_norm > 0.0)) r.error("confidence.rkhs_norm", "must be > 0");
  }
  if (compact && dimension > 0 && cfg.delta > 0.0 && cfg.delta < 1.0) {
    ConfidenceParams p;
    p.regime = CompactDomain{static_cast<double>(dimension), cfg.side_length, cfg.a, cfg.b};
    p.delta = cfg.delta;
    try {
      p.validate();
    } catch (const ConfigError& e) {
      r.error("confidence", e.what());
    }
  }

  // Initialization.
  const YAML::Node init =
      r.section(root, "initialization", "initialization", {"size", "bound", "nu", "epsilon", "eta", "dimension"});
  if (Reader::present(init, "size")) {
    const YAML::Node s = init["size"];
    if (!(s.IsScalar() && s.Scalar() == "auto")) {
      std::uint64_t n = 0;
      if (r.integer(init, "size", "initialization.size", n)) cfg.init_size = n;
    }
  }
  std::string bound = "matern";
  r.text(init, "bound", "initialization.bound", bound);
  double g_nu = 1.0, g_eps = 0.5, g_eta = 1.0, g_dim = dimension > 0 ? static_cast<double>(dimension) : 1.0;
  r.number(init, "nu", "initialization.nu", g_nu);
  r.number(init, "epsilon", "initialization.epsilon", g_eps);
  r.number(init, "eta", "initialization.eta", g_eta);
  r.number(init, "dimension", "initialization.dimension", g_dim);
  if (bound == "matern") {
    cfg.growth = MaternGammaBound{g_nu, g_eps};
  } else if (bound == "linear") {
    cfg.growth = LinearGammaBound{g_eta, g_dim};
  } else if (bound == "rbf") {
    cfg.growth = RbfGammaBound{g_eta, g_dim};
  } else {
    r.error("initialization.bound", "must be matern, linear or rbf, got '" + bound + "'");
  }
  if (cfg.policy == PolicyKind::gp_bucb_init) {
    std::size_t size = 0;
    if (cfg.init_size) {
      size = *cfg.init_size;
    } else {
      try {
        size = t_init_size(cfg.growth, cfg.schedule.bound()).size;
      } catch (const ConfigError& e) {
        r.error("initialization", e.what());
      }
    }
    if (size > cfg.horizon) {
      r.error("initialization.size", "T^init = " + std::to_string(size) + " exceeds horizon " +
                                         std::to_string(cfg.horizon));
    }
    if (cfg.c_mode == CMode::initialized && size == 0) {
      r.error("confidence.C", "initialized mode needs T^init >= 1");
    }
  } else if (cfg.c_mode == CMode::initialized) {
    r.error("confidence.C", "initialized mode needs policy gp-bucb-init");
  }

  if (cfg.policy == PolicyKind::ntb_ucb) {
    std::size_t n = 0;
    if (cfg.table) {
      n = cfg.table->decisions.size();
    } else if (cfg.resolution.size() == dimension && dimension > 0) {
      n = 1;
      for (std::size_t k : cfg.resolution) n *= k;
    }
    if (n > 0 && cfg.schedule.bound() > n) r.error("schedule.B", "ntb-ucb needs B <= |D| = " + std::to_string(n));
  }

  if (!r.errors.empty()) throw ConfigErrors(std::move(r.errors));
  return cfg;
}

ResolvedExperiment resolve(const ExperimentConfig& cfg) {
  ResolvedExperiment out;
  const DecisionSet decisions = cfg.decisions();
  const std::size_t batch = cfg.schedule.bound();

  if (cfg.policy == PolicyKind::gp_bucb_init) {
    const InitSize table = t_init_size(cfg.growth, batch);
    out.init_size = cfg.init_size.value_or(table.size);
    out.init_multiplier = table.multiplier;
  }

  CMode mode = cfg.c_mode;
  if (mode == CMode::automatic) {
    if (cfg.policy == PolicyKind::gp_bucb_init) {
      mode = out.init_size > 0 ? CMode::initialized : CMode::raw;
    } else if (hallucinates(cfg.policy)) {
      mode = CMode::raw;
    } else {
      mode = CMode::value;
    }
  }
  switch (mode) {
    case CMode::value: out.C = cfg.c_mode == CMode::value ? cfg.c_value : 0.0; break;
    case CMode::raw: out.C = bound_C(cfg.kernel, cfg.noise_variance, decisions, batch, CBoundMode::raw); break;
    case CMode::initialized:
      out.C = bound_C(cfg.kernel, cfg.noise_variance, decisions, batch, CBoundMode::initialized, out.init_size);
      break;
    case CMode::automatic: break;
  }

  ConfidenceParams conf;
  conf.delta = cfg.delta;
  conf.C = out.C;
  if (cfg.regime == "compact") {
    conf.regime = CompactDomain{static_cast<double>(decisions.dimension()), cfg.side_length, cfg.a, cfg.b};
  } else if (cfg.regime == "rkhs") {
    const auto report = greedy_gamma(cfg.kernel, cfg.noise_variance, decisions, cfg.horizon);
    std::vector<double> gamma = report.cumulative();
    for (double& g : gamma) g *= kGreedyBracket;
    conf.regime = RkhsBound{cfg.rkhs_norm, std::move(gamma)};
  } else {
    conf.regime = FiniteDomain{decisions.size()};
  }
  conf.validate();

  ExperimentPlan& plan = out.plan;
  plan.kernel = cfg.kernel;
  if (cfg.table) {
    plan.fixed_instance = *cfg.table;
  } else {
    plan.sample_domain = decisions;
  }
  plan.resample_per_trial = cfg.resample_per_trial;
  plan.trials = cfg.trials;
  plan.master_seed = cfg.seed;
  plan.threads = cfg.threads;
  plan.trial.policy = cfg.policy;
  plan.trial.schedule = cfg.schedule;
  plan.trial.confidence = conf;
  plan.trial.horizon = cfg.horizon;
  plan.trial.noise_variance = cfg.noise_variance;
  plan.trial.noise = cfg.noise_model;
  plan.trial.init_size = out.init_size;
  plan.trial.poison_undelivered = cfg.poison_undelivered;
  return out;
}

std::string describe(const ExperimentConfig& cfg, const ResolvedExperiment& resolved) {
  std::ostringstream out;
  const auto& plan = resolved.plan;
  out << "policy: " << policy_name(cfg.policy) << '\n';
  out << "instance: " << cfg.source;
  if (cfg.table) out << " (" << cfg.table_path << ")";
  out << ", resample_per_trial: " << (cfg.resample_per_trial ? "true" : "false") << '\n';
  out << "decisions: " << cfg.decisions().size() << " points in dimension " << cfg.kernel.dimension() << '\n';
  out << "kernel: " << to_string(cfg.kernel.family) << ", signal_variance " << fmt(cfg.kernel.signal_variance)
      << ", lengthscales";
  for (Eigen::Index j = 0; j < cfg.kernel.lengthscales.size(); ++j) out << ' ' << fmt(cfg.kernel.lengthscales[j]);
  out << '\n';
  out << "noise: variance " << fmt(cfg.noise_variance) << ", "
      << (cfg.noise_model == NoiseModel::gaussian ? "gaussian" : "bounded") << '\n';
  out << "schedule: " << FeedbackSchedule::to_string(cfg.schedule.kind()) << ", B " << cfg.schedule.bound() << '\n';
  out << "confidence: " << regime_name(plan.trial.confidence.regime) << ", delta " << fmt(cfg.delta) << ", C "
      << fmt(resolved.C) << '\n';
  if (cfg.policy == PolicyKind::gp_bucb_init) {
    out << "initialization: T_init " << resolved.init_size << ", multiplier " << fmt(resolved.init_multiplier)
        << '\n';
  }
  out << "horizon: " << cfg.horizon << ", trials: " << cfg.trials << ", seed: " << cfg.seed << '\n';
  return out.str();
}

}  // namespace gpbucb::cli
