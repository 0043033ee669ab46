#pragma once

// Embedded-chain discrete-event simulation of the cell. Each epoch: the policy
// picks an action, the post-decision state is formed, a sojourn is drawn from
// Exponential(beta) and the next event from the transition distribution.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mec/ctmdp.hpp"
#include "mec/policy.hpp"

namespace mec {

struct SimClock {
  std::uint64_t epoch = 0;
  double time = 0.0;
  double last_sojourn = 0.0;
};

struct DeviceMetrics {
  double tx_area = 0.0;    // integral of the transmission queue length
  double proc_area = 0.0;  // integral of the processing queue length
  double tx_busy = 0.0;    // time spent scheduled
  double proc_busy = 0.0;  // time with a non-empty processing queue
  std::uint64_t arrivals = 0;
  std::uint64_t drops = 0;
  std::uint64_t offloaded = 0;
  std::uint64_t tx_departures = 0;
  std::uint64_t proc_departures = 0;
};

struct Metrics {
  std::vector<DeviceMetrics> devices;
  double elapsed = 0.0;
  double cost_integral = 0.0;  // integral of the cost rate c
  std::uint64_t epochs = 0;

  explicit Metrics(int n_devices = 0) : devices(n_devices) {}
  /// Little's law: time-average queued packets over the arrival rate.
  double mean_delay(int n, const ScenarioParams& p) const;
  double mean_tx_queue(int n) const;
  double mean_power(int n, const ScenarioParams& p) const;
  double drop_rate(int n) const;
};

/// J = sum_n omega_n D_n + gamma_n P_n from the time averages; 0 if no time elapsed.
double weighted_objective(const Metrics& m, const ScenarioParams& p);
/// The same objective as the time average of the cost rate.
double cost_rate_average(const Metrics& m);

struct EpochRecord {
  std::uint64_t epoch;
  double time;
  const GlobalState& state;
  const PolicyDecision& decision;
  const PostDecisionState& post;
  double sojourn;
  int next_event;
};
using TraceHook = std::function<void(const EpochRecord&)>;

struct SimOptions {
  double warmup_fraction = 0.1;  // leading share of epochs excluded from `window`
};

class Simulation {
 public:
  Simulation(ScenarioParams params, Policy& policy, std::uint64_t seed);

  /// Averages only include epochs with index >= warmup_epochs.
  void set_warmup(std::uint64_t warmup_epochs) { warmup_ = warmup_epochs; }
  void set_trace(TraceHook hook) { trace_ = std::move(hook); }

  void step();
  void run(std::uint64_t epochs);

  const ScenarioParams& params() const { return params_; }
  const GlobalState& state() const { return state_; }
  const SimClock& clock() const { return clock_; }
  const Metrics& window() const { return window_; }
  const Metrics& lifetime() const { return lifetime_; }
  Rng& rng() { return rng_; }

  /// Arrivals minus drops equals departures plus packets still queued, per device.
  bool conserved() const;

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  void accumulate(Metrics& m, const PostDecisionState& post, double tau, double cost) const;

  ScenarioParams params_;
  Policy& policy_;
  Rng rng_;
  GlobalState state_;
  SimClock clock_;
  std::uint64_t warmup_ = 0;
  Metrics window_;
  Metrics lifetime_;
  TraceHook trace_;
};

/// Picks the event whose cumulative probability first exceeds `u` in [0, 1).
int sample_event(const std::vector<EventProbability>& dist, double u);

struct RunResult {
  Metrics window;
  Metrics lifetime;
  GlobalState final_state;
  SimClock clock;
  bool conserved = true;
};

/// Throws std::invalid_argument for a zero horizon.
RunResult run(const ScenarioParams& params, Policy& policy, std::uint64_t horizon,
              std::uint64_t seed, const SimOptions& opts = {});

}  // namespace mec
