#pragma once

// Experiment configuration, read from a JSON document with the sections
// scenario, policy, learning, sweep and output. Every key is optional; unknown
// keys and out-of-range values are rejected with the offending key path.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mec/params.hpp"
#include "mec/policy.hpp"
#include "mec/scenario.hpp"
#include "mec/value_net.hpp"

namespace mec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Cell, Uniform };

/// Device constants for the homogeneous scenario kind.
struct UniformDevice {
  double tx_rate = 1.0;
  double tx_power = 0.2;
  double proc_rate = 1.0;
  double proc_power = 0.1;
};

struct ExperimentConfig {
  ScenarioKind kind = ScenarioKind::Cell;
  ScenarioConfig scenario;
  UniformDevice uniform;

  std::vector<std::string> policies{"icfmo", "ico", "qa", "mumto"};
  double eta = 0.99;
  bool parallel_candidates = false;

  std::uint64_t horizon = 2000000;      // training epochs for the learners
  std::uint64_t eval_epochs = 1000000;  // greedy evaluation epochs, every policy
  Exploration exploration;
  StepSchedule steps;
  double warmup_fraction = 0.1;

  std::vector<int> n_devices{2};
  std::vector<double> arrival_rates{1.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int workers = 1;

  std::string out_dir = "out";
  std::uint64_t trace_stride = 1000;
  bool checkpoints = false;
  bool message_log = true;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;
};

bool is_policy_name(const std::string& name);
bool is_learning_policy(const std::string& name);

/// Parses JSON text; syntax errors report line and column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Parameters of one grid point. Cell scenarios place devices with `seed`.
ScenarioParams make_scenario(const ExperimentConfig& cfg, int n_devices, double arrival_rate,
                             std::uint64_t seed);

/// Comma-separated list of unsigned integers, e.g. "1,2,3".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace mec
