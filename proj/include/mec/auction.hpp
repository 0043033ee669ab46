#pragma once

// Message-level model of the semi-distributed learner. The base station holds
// the shared convolution weights and arbitrates actions; every device holds its
// own node values, f-weight columns and average-reward accumulators. Each epoch
// runs a six-phase round over an ordered, lossless in-process bus:
//
//   1 BS -> all   candidate conv features and sojourn rates
//   2 dev -> BS   local bids per candidate
//   3 BS -> all   chosen action
//   4 dev -> BS   local TD error
//   5 BS -> all   summed TD error
//   6 dev -> BS   conv-weight gradient contribution
//
// Accounting follows the fixed per-kind word budget (N+1, 2N, 1, N, 1, N) even
// though simulated payloads are full-precision vectors.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mec/icfmo.hpp"
#include "mec/value_net.hpp"

namespace mec {

enum class MessageKind : std::uint8_t {
  ConvBroadcast = 1,
  BidSubmit = 2,
  ActionNotify = 3,
  DeltaVSubmit = 4,
  DeltaVBroadcast = 5,
  DeltaCSubmit = 6,
};
enum class Direction : std::uint8_t { Downlink, Uplink };

const char* to_string(MessageKind k);
const char* to_string(Direction d);

/// Words a single message of this kind is charged.
int message_words(MessageKind kind, int n_devices);
/// Words all messages of this kind are charged in one round.
int round_words(MessageKind kind, int n_devices);
/// 5N+3 for a round with a TD step, 3N+2 otherwise.
int learning_round_words(int n_devices);
int decision_round_words(int n_devices);

struct ProtocolMessage {
  MessageKind kind{};
  Direction direction{};
  int device = 0;  // sender or recipient, 1-based; 0 for broadcasts
  std::uint64_t epoch = 0;
  std::vector<double> payload;
  int size_words = 0;
};

struct LogEntry {
  std::uint64_t epoch;
  MessageKind kind;
  Direction direction;
  int device;
  int words;
  std::uint64_t cumulative_bytes;
};

/// Ordered lossless queue with word accounting. Rejects messages whose charged
/// size differs from the fixed budget.
class MessageBus {
 public:
  explicit MessageBus(int n_devices) : n_devices_(n_devices) {}

  void begin_round(std::uint64_t epoch);
  void post(ProtocolMessage m);
  /// Pops the front message; throws if it is not of the expected kind and sender.
  ProtocolMessage take(MessageKind kind, int device);
  bool empty() const { return queue_.empty(); }

  std::uint64_t round_words() const { return round_words_; }
  std::uint64_t total_bytes() const { return 4 * total_words_; }
  void set_log(std::vector<LogEntry>* log) { log_ = log; }

 private:
  int n_devices_;
  std::uint64_t epoch_ = 0;
  std::vector<ProtocolMessage> queue_;
  std::size_t head_ = 0;
  std::uint64_t round_words_ = 0;
  std::uint64_t total_words_ = 0;
  std::vector<LogEntry>* log_ = nullptr;
};

void write_messages_csv(std::ostream& os, const std::vector<LogEntry>& log);

class DeviceActor {
 public:
  /// Copies device `n`'s partition (0-based) out of a full parameter set.
  DeviceActor(int n, const ScenarioParams& p, const NetParams& net, const LearnerState& learner,
              const StepSchedule& steps);

  int id() const { return n_ + 1; }
  /// Phase 2: one bid per candidate from the conv broadcast and the local pre-decision state.
  ProtocolMessage bid(const ProtocolMessage& conv, const LocalState& local);
  /// Phase 3: record the chosen candidate.
  void notify(const ProtocolMessage& action);
  /// Phase 4.
  ProtocolMessage td_error();
  /// Phase 6: returns the conv-gradient contribution and applies the local updates.
  ProtocolMessage apply_update(const ProtocolMessage& delta, double prev_sojourn);
  /// Counts the visit to the chosen local post-decision state and advances the epoch.
  void finish_round();

  std::uint64_t epoch() const { return epoch_; }
  const std::vector<double>& node_values() const { return values_; }
  std::vector<double>& node_values() { return values_; }
  /// D columns of N entries, column j at offset j*N.
  const std::vector<double>& f_columns() const { return f_cols_; }
  std::vector<double>& f_columns() { return f_cols_; }
  const std::vector<std::uint64_t>& visits() const { return visits_; }
  double reward_total() const { return reward_total_; }
  double time_total() const { return time_total_; }
  double avg_reward() const { return avg_reward_; }

 private:
  struct Chosen {
    int index;      // local state index
    double reward;  // local reward of the post-decision state
    double beta;
    double feature;
    double value;
  };
  std::span<const double> column(int j) const {
    return {f_cols_.data() + static_cast<std::size_t>(j) * n_devices_,
            static_cast<std::size_t>(n_devices_)};
  }
  void check_epoch(const ProtocolMessage& m) const;

  int n_;
  int n_devices_;
  LocalStateSpace space_;
  DeviceCostParams cost_;
  double eta_;
  StepSchedule steps_;
  std::vector<double> values_;
  std::vector<double> f_cols_;
  std::vector<std::uint64_t> visits_;
  double reward_total_ = 0.0;
  double time_total_ = 0.0;
  double avg_reward_ = 0.0;
  std::uint64_t epoch_ = 0;

  // Round scratch.
  std::vector<Chosen> candidates_;
  std::vector<double> prev_conv_;
  std::optional<Chosen> current_;
  std::optional<Chosen> prev_;
  std::optional<double> node_error_;
};

class BsActor {
 public:
  BsActor(ScenarioParams p, std::vector<double> c_weights, AgentOptions opts);

  /// Phase 1.
  ProtocolMessage broadcast_conv(const GlobalState& s);
  /// Phase 3: sums the bids per candidate in device order and picks the action.
  ProtocolMessage arbitrate(const std::vector<ProtocolMessage>& bids, Rng& rng);
  /// Phase 5.
  ProtocolMessage broadcast_delta(const std::vector<ProtocolMessage>& errors);
  /// Applies the summed conv-gradient contributions to the shared weights.
  void apply_conv_update(const std::vector<ProtocolMessage>& grads);
  void finish_round();

  std::uint64_t epoch() const { return epoch_; }
  const std::vector<double>& c_weights() const { return c_weights_; }
  std::vector<double>& c_weights() { return c_weights_; }
  const PolicyDecision& decision() const { return decision_; }
  const PostDecisionState& chosen_post() const { return posts_.at(chosen_); }
  bool has_previous() const { return prev_active_.has_value(); }
  double last_error() const { return last_error_; }
  const std::vector<double>& last_node_errors() const { return last_node_errors_; }
  AgentOptions& options() { return opts_; }

 private:
  ScenarioParams params_;
  LocalStateSpace space_;
  std::vector<double> c_weights_;
  AgentOptions opts_;
  std::uint64_t epoch_ = 0;

  GlobalState state_;
  std::vector<JointAction> candidates_;
  std::vector<PostDecisionState> posts_;
  std::size_t chosen_ = 0;
  PolicyDecision decision_;
  std::vector<int> chosen_active_;
  std::optional<std::vector<int>> prev_active_;
  double last_error_ = 0.0;
  std::vector<double> last_node_errors_;
};

struct RoundOutcome {
  PolicyDecision decision;
  bool learned = false;
  double error = 0.0;
  std::uint64_t words = 0;
};

/// Runs the six-phase choreography for one epoch. Phases 4-6 are skipped when
/// learning is off or no previous post-decision state exists.
class DistributedAgent final : public Policy {
 public:
  DistributedAgent(ScenarioParams p, const NetParams& init, AgentOptions opts = {});

  std::string name() const override { return "icfmo-distributed"; }
  PolicyDecision decide(const GlobalState& s, Rng& rng) override;
  void observe(const PostDecisionState& post, double prev_sojourn) override;

  BsActor& bs() { return bs_; }
  const BsActor& bs() const { return bs_; }
  std::vector<DeviceActor>& devices() { return devices_; }
  const std::vector<DeviceActor>& devices() const { return devices_; }
  MessageBus& bus() { return bus_; }
  const RoundOutcome& last_round() const { return last_round_; }

  /// Reassembles the full parameter set from the partitions.
  NetParams assemble_net() const;
  LearnerState assemble_learner() const;

  void freeze() {
    opts_.learning = false;
    opts_.exploration.enabled = false;
    bs_.options() = opts_;
  }

 private:
  ScenarioParams params_;
  AgentOptions opts_;
  double eta_;
  BsActor bs_;
  std::vector<DeviceActor> devices_;
  MessageBus bus_;
  GlobalState state_;
  RoundOutcome last_round_;
};

/// Convenience wrapper: one full round (decide then learn) for a given state.
RoundOutcome epoch_round(DistributedAgent& agent, const GlobalState& s, Rng& rng,
                         double prev_sojourn);

struct EquivalenceOptions {
  std::uint64_t epochs = 100000;
  std::uint64_t full_compare_every = 1000;
  /// Compare only actions, for runs whose parameters are deliberately perturbed.
  bool actions_only = false;
  AgentOptions agent{};
  std::uint64_t init_seed = 1;
  std::function<void(DistributedAgent&)> perturb;
  std::vector<LogEntry>* log = nullptr;
};

struct EquivalenceReport {
  bool equivalent = true;
  std::uint64_t epochs = 0;
  std::optional<std::uint64_t> divergence_epoch;
  std::string divergence_field;
  std::uint64_t learning_rounds = 0;
  bool overhead_exact = true;  // every round charged its fixed budget
  std::uint64_t total_bytes = 0;
};

/// Runs centralized and distributed learners in lockstep from identical seeds
/// and initial parameters; stops at the first mismatch.
EquivalenceReport equivalence_check(const ScenarioParams& p, std::uint64_t seed,
                                    const EquivalenceOptions& opts = {});

}  // namespace mec
