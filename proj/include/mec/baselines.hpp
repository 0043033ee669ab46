#pragma once

#include "mec/policy.hpp"

namespace mec {

/// Queue-aware load balancing: offload when the transmission queue is strictly
/// shorter than the processing queue; schedule the longest transmission queue.
/// Ties go to local processing and to the lowest device id.
class QaPolicy final : public Policy {
 public:
  explicit QaPolicy(ScenarioParams params) : params_(std::move(params)) {}
  std::string name() const override { return "qa"; }
  PolicyDecision decide(const GlobalState& s, Rng& rng) override;

 private:
  ScenarioParams params_;
};

/// Myopic per-epoch minimization of sum_n omega_n D_n(a) + gamma_n P_n(a) with
/// D_n = L_n/mu_n + L^loc_n/mu^loc_n and P_n = P_n 1[a_s = n] + P^loc_n 1[L^loc_n != 0],
/// evaluated on the post-decision queues.
class MumtoPolicy final : public Policy {
 public:
  explicit MumtoPolicy(ScenarioParams params) : params_(std::move(params)) {}
  std::string name() const override { return "mumto"; }
  PolicyDecision decide(const GlobalState& s, Rng& rng) override;
  double objective(const PostDecisionState& post) const;

 private:
  ScenarioParams params_;
};

/// Offloads whenever allowed, otherwise takes the forced action; schedules the
/// lowest eligible device. Used for queueing-theory checks of the simulator.
class OffloadFirstPolicy final : public Policy {
 public:
  explicit OffloadFirstPolicy(ScenarioParams params) : params_(std::move(params)) {}
  std::string name() const override { return "offload-first"; }
  PolicyDecision decide(const GlobalState& s, Rng& rng) override;

 private:
  ScenarioParams params_;
};

}  // namespace mec
