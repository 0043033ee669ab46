#pragma once

// State algebra of the continuous-time MDP: action spaces, the post-decision
// map, event transitions, sojourn rates and cost functions.
//
// Conventions: queue vectors are 0-based by device. Events and scheduling
// decisions use 1-based device ids so that 0 can mean "transmission departure"
// (events) or "nobody scheduled" (schedules). Functions that take a device
// argument `n` expect the 0-based index.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mec/params.hpp"

namespace mec {

struct GlobalState {
  std::vector<int> tx_queues;
  std::vector<int> proc_queues;
  int event = 0;           // n > 0 arrival at n, 0 tx departure, -n proc departure at n
  int scheduled_prev = 0;  // device scheduled at the previous epoch, 0 if none

  int n_devices() const { return static_cast<int>(tx_queues.size()); }
  bool operator==(const GlobalState&) const = default;
};

/// Offloading: 1 transmit, 0 process locally, -1 drop. Schedule: device id or 0.
struct JointAction {
  int offload = 0;
  int schedule = 0;
  bool operator==(const JointAction&) const = default;
};

struct PostDecisionState {
  std::vector<int> tx_queues;
  std::vector<int> proc_queues;
  int event = 0;
  int scheduled = 0;
  // Carried from the pre-decision state: the local event of a transmission
  // departure belongs to the device that was scheduled before the decision.
  int scheduled_prev = 0;

  int n_devices() const { return static_cast<int>(tx_queues.size()); }
  bool operator==(const PostDecisionState&) const = default;
};

enum class LocalEvent : std::uint8_t { None = 0, Arrival = 1, TxDeparture = 2, ProcDeparture = 3 };

struct LocalState {
  int tx_len = 0;
  int proc_len = 0;
  LocalEvent event = LocalEvent::None;
  bool scheduled = false;
  bool operator==(const LocalState&) const = default;
};

/// Dense indexing of one device's local states:
/// ((tx * (M^loc + 1) + proc) * 4 + event) * 2 + scheduled.
class LocalStateSpace {
 public:
  LocalStateSpace(int tx_cap, int proc_cap) : tx_cap_(tx_cap), proc_cap_(proc_cap) {}
  explicit LocalStateSpace(const ScenarioParams& p) : LocalStateSpace(p.tx_cap, p.proc_cap) {}

  int size() const { return (tx_cap_ + 1) * (proc_cap_ + 1) * 4 * 2; }
  int index(const LocalState& s) const;
  LocalState decode(int index) const;

 private:
  int tx_cap_;
  int proc_cap_;
};

struct OffloadOutcome {
  std::vector<int> tx_queues;
  std::vector<int> proc_queues;
  bool dropped = false;
};

struct EventProbability {
  int event;
  double probability;
};

bool is_valid(const GlobalState& s, const ScenarioParams& p);
bool is_valid(const PostDecisionState& s, const ScenarioParams& p);

std::vector<int> offload_action_space(const GlobalState& s, const ScenarioParams& p);
std::vector<int> schedule_action_space(const GlobalState& s, int offload, const ScenarioParams& p);

/// All eligible joint actions. Order: offload 1, 0, -1; then schedule ascending.
/// Argmin ties resolve to the earliest action in this order.
std::vector<JointAction> eligible_actions(const GlobalState& s, const ScenarioParams& p);
bool is_eligible(const GlobalState& s, const JointAction& a, const ScenarioParams& p);

OffloadOutcome apply_offload(const GlobalState& s, int offload);
PostDecisionState post_decision(const GlobalState& s, const JointAction& a);

double sojourn_rate(const PostDecisionState& post, const ScenarioParams& p);
/// Rate of a single event out of `post`; 0 for impossible events.
double event_rate(const PostDecisionState& post, int event, const ScenarioParams& p);
/// Events with nonzero probability, in order: arrivals 1..N, tx departure, proc departures -1..-N.
std::vector<EventProbability> transition_distribution(const PostDecisionState& post,
                                                      const ScenarioParams& p);
/// Throws std::logic_error for an event with zero probability.
GlobalState next_state(const PostDecisionState& post, int event, const ScenarioParams& p);

/// The scenario constants one device needs to price its own local state.
struct DeviceCostParams {
  double tx_power = 0.0;
  double proc_power = 0.0;
  double delay_weight = 0.0;  // omega'
  double power_weight = 0.0;  // gamma'
  double total_arrival = 0.0;
  int n_devices = 0;

  static DeviceCostParams of(const ScenarioParams& p, int n);
};

/// Cost rate c of the post-decision state (weighted delay plus power, per second).
double reward_rate(const PostDecisionState& post, const ScenarioParams& p);
/// Per-device share of the per-epoch reward c / beta.
double local_reward(const PostDecisionState& post, int n, const ScenarioParams& p);
double local_reward(const PostDecisionState& post, int n, const ScenarioParams& p, double beta);
double local_reward(const LocalState& post_local, const DeviceCostParams& c, double beta);

LocalEvent local_event(int global_event, int scheduled, int n);
LocalState local_state(const GlobalState& s, int n);
std::vector<LocalState> local_states(const GlobalState& s);
LocalState post_decision_local(const LocalState& local, const JointAction& a, int n);
std::vector<LocalState> post_local_states(const PostDecisionState& post);
LocalState local_next(const LocalState& post_local, int n, int event);
/// Inverse of local_states for states that carry a locatable event.
GlobalState aggregate(std::span<const LocalState> locals);

std::string to_string(const GlobalState& s);
std::string to_string(const PostDecisionState& s);

}  // namespace mec
