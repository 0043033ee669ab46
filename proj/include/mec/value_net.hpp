#pragma once

// Post-decision value approximator: input (one-hot local states) ->
// convolution (shared D-filter) -> fully connected tanh -> one-hot mask ->
// per-node values. Only the N masked-in entries matter for a given input, so
// the fast path evaluates just those; kernels.hpp holds the dense reference.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mec/ctmdp.hpp"

namespace mec {

struct NetParams {
  int n_devices = 0;
  int local_states = 0;  // D
  std::vector<double> c_weights;    // D
  // Column-major N x (N*D): column n*D + j is the N-vector of links from every
  // conv neuron into fully connected neuron (n, j).
  std::vector<double> f_weights;
  std::vector<double> node_values;  // N*D, entry n*D + j
  double eta = 0.99;

  static NetParams zeros(int n_devices, int local_states, double eta = 0.99);
  /// c ~ U(-0.1, 0.1), f ~ U(-1/sqrt(N), 1/sqrt(N)), node values 0.
  static NetParams initialized(int n_devices, int local_states, std::mt19937_64& rng,
                               double eta = 0.99);

  int column(int n, int j) const { return n * local_states + j; }
  std::span<double> f_column(int n, int j) {
    return {f_weights.data() + static_cast<std::size_t>(column(n, j)) * n_devices,
            static_cast<std::size_t>(n_devices)};
  }
  std::span<const double> f_column(int n, int j) const {
    return {f_weights.data() + static_cast<std::size_t>(column(n, j)) * n_devices,
            static_cast<std::size_t>(n_devices)};
  }
  /// Element (row m, column col) of the f-weight matrix.
  double f_weight(int m, int col) const {
    return f_weights[static_cast<std::size_t>(col) * n_devices + m];
  }
  double node_value(int n, int j) const { return node_values[column(n, j)]; }

  bool operator==(const NetParams&) const = default;
};

/// Visit counts, reward accumulators and per-device average reward rates.
struct LearnerState {
  std::vector<std::uint64_t> visits;   // N*D
  std::vector<double> reward_totals;   // per device, sum of local rewards
  double time_total = 0.0;
  std::vector<double> avg_reward;      // theta_n
  std::uint64_t epoch = 0;             // post-decision states registered so far

  static LearnerState empty(int n_devices, int local_states);
  double theta() const;
  bool operator==(const LearnerState&) const = default;
};

struct StepSchedule {
  double alpha_numerator = 9000.0;
  double alpha_offset = 10000.0;
  std::optional<double> fixed_alpha;  // test hook: constant averaging weight

  /// log(m+1)/(m+1): the log(k)/k schedule shifted to be defined from m = 0.
  static double epsilon(std::uint64_t m);
  double alpha(std::uint64_t k) const;
};

struct StepSizes {
  double visit_eps;  // indexed by the visit count
  double epoch_eps;  // indexed by the epoch
  double alpha;
};
StepSizes step_sizes(std::uint64_t k, std::uint64_t visits, const StepSchedule& sched = {});

/// Row n holds the local-state index of device n.
std::vector<int> encode(std::span<const LocalState> locals, const LocalStateSpace& space);
std::vector<int> encode(const PostDecisionState& post, const LocalStateSpace& space);
/// Dense N x D one-hot matrix, row-major.
std::vector<double> dense_input(std::span<const int> active, int local_states);
std::vector<int> decode_input(std::span<const double> dense, int n_devices, int local_states);

struct ForwardTrace {
  std::vector<int> active;        // local index per device
  std::vector<double> conv;       // c_n = w^c[active_n]
  std::vector<double> preact;     // c . w^f column of the active neuron
  std::vector<double> features;   // phi of the active neuron
  std::vector<double> values;     // per-node value of the active neuron
  double value = 0.0;             // sum_n features[n] * values[n]
};

ForwardTrace forward(std::span<const int> active, const NetParams& net);

// Per-device arithmetic, shared by the centralized learner and the device actors
// so that both perform identical floating point operations.
double node_preactivation(std::span<const double> conv, std::span<const double> f_column);
double tanh_derivative(double z);
double node_bid(double reward, double feature, double value, double theta, double beta);
double node_td_error(double reward, double eta, double new_feature, double new_value,
                     double prev_feature, double prev_value, double theta, double beta);

/// g_n + phi_n V_n - theta_n / beta for one device of an evaluated candidate.
double local_bid(int n, const ForwardTrace& trace, double reward, double theta, double beta);

struct TdInputs {
  std::span<const int> prev_active;
  std::span<const int> new_active;
  std::span<const double> new_rewards;   // g_n of the new post-decision state
  double new_beta = 0.0;
  std::span<const double> prev_rewards;  // g_n of the previous post-decision state
  double prev_duration = 0.0;            // sojourn of the previous epoch
};

struct TdResult {
  std::vector<double> node_errors;  // Delta V_n
  double error = 0.0;               // Delta V
  StepSizes steps{};
};

/// One semi-gradient TD(0) step on the previous post-decision state followed by
/// the average-reward update. All increments are computed from the parameters
/// as they were on entry. Throws std::runtime_error on non-finite increments.
TdResult td_update(NetParams& net, LearnerState& learner, const TdInputs& in,
                   const StepSchedule& sched = {});

/// Counts one visit to every active local state and advances the epoch.
void register_visit(LearnerState& learner, std::span<const int> active, int local_states);

}  // namespace mec
