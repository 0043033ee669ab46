#pragma once

// Experiment runner: (policy x N x lambda x seed) grids, train-then-evaluate
// for the learners, direct evaluation for the baselines, CSV output.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mec/config.hpp"
#include "mec/icfmo.hpp"
#include "mec/sim.hpp"

namespace mec {

/// Independent, reproducible sub-seeds of a run seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum SeedStream : std::uint64_t { kTrainStream = 1, kEvalStream = 2, kInitStream = 3 };

AgentOptions agent_options(const ExperimentConfig& cfg);
/// icfmo or ico with the default initialization drawn from the init sub-seed.
std::unique_ptr<LearningAgent> make_learner(const std::string& name, const ScenarioParams& p,
                                            const ExperimentConfig& cfg, std::uint64_t seed);
std::unique_ptr<Policy> make_baseline(const std::string& name, const ScenarioParams& p);

struct ResultRow {
  std::string policy;
  int n_devices = 0;
  double arrival_rate = 0.0;
  std::uint64_t seed = 0;
  double objective = 0.0;   // J
  double mean_delay = 0.0;  // averaged over devices, s
  double mean_power = 0.0;  // averaged over devices, W
  double drop_rate = 0.0;
  std::uint64_t epochs = 0;  // training plus evaluation
  double wall_clock_s = 0.0;
  bool conserved = true;
  std::vector<double> delay_weights;  // omega_n
  std::vector<double> power_weights;  // gamma_n
  std::vector<double> device_delays;
  std::vector<double> device_powers;
};

ResultRow summarize(const Metrics& m, const ScenarioParams& p);

/// One grid point. Learners are trained for cfg.horizon epochs, frozen and
/// evaluated on a fresh simulation; baselines are only evaluated.
ResultRow evaluate_point(const ExperimentConfig& cfg, const std::string& policy, int n_devices,
                         double arrival_rate, std::uint64_t seed);

/// All grid points in (policy, N, lambda, seed) order, run on cfg.workers threads.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// One row per (grid point, device) with the weights needed to recompute J.
void write_devices_csv(std::ostream& os, const std::vector<ResultRow>& rows);

struct TracePoint {
  std::uint64_t epoch;
  double value;              // V of the all-empty post-decision state
  double running_objective;  // time-average cost since epoch 0
};

/// The all-empty post-decision state: no packets, no event, nobody scheduled.
PostDecisionState empty_post(int n_devices);

/// Samples every cfg.trace_stride epochs over cfg.horizon training epochs; the
/// first sample is taken before any step. Requires a learning policy.
std::vector<TracePoint> convergence_trace(const ExperimentConfig& cfg, const std::string& policy,
                                          int n_devices, double arrival_rate, std::uint64_t seed);
void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace);

}  // namespace mec
