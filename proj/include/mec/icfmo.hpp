#pragma once

#include <iosfwd>
#include <optional>

#include "mec/policy.hpp"
#include "mec/value_net.hpp"

namespace mec {

struct AgentOptions {
  Exploration exploration;
  StepSchedule steps;
  bool learning = true;
  /// Score candidate actions with OpenMP; results are identical either way.
  bool parallel_candidates = false;
};

/// Shared driver for the post-decision value learners: greedy scoring of every
/// eligible action, epsilon-greedy exploration and one TD step per epoch.
class LearningAgent : public Policy {
 public:
  PolicyDecision decide(const GlobalState& s, Rng& rng) override;
  void observe(const PostDecisionState& post, double prev_sojourn) override;

  /// Sum over devices of the local bids of a candidate post-decision state.
  virtual double score(const PostDecisionState& post) const = 0;
  /// Network output V for a post-decision state.
  virtual double value(const PostDecisionState& post) const = 0;

  /// Greedy decision without exploration and without touching the RNG.
  PolicyDecision greedy(const GlobalState& s) const;

  const ScenarioParams& params() const { return params_; }
  const LocalStateSpace& space() const { return space_; }
  const LearnerState& learner() const { return learner_; }
  LearnerState& learner() { return learner_; }
  AgentOptions& options() { return opts_; }
  const AgentOptions& options() const { return opts_; }
  const std::optional<TdResult>& last_update() const { return last_update_; }
  const std::optional<PostDecisionState>& previous_post() const { return prev_; }

  /// Freezes parameters and disables exploration.
  void freeze() {
    opts_.learning = false;
    opts_.exploration.enabled = false;
  }

  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;

 protected:
  LearningAgent(ScenarioParams params, AgentOptions opts);
  virtual TdResult learn(const PostDecisionState& prev, const PostDecisionState& next,
                         double prev_sojourn) = 0;
  void save_common(std::ostream& os) const;
  void load_common(std::istream& is);

  ScenarioParams params_;
  LocalStateSpace space_;
  LearnerState learner_;
  AgentOptions opts_;
  std::optional<PostDecisionState> prev_;
  std::optional<TdResult> last_update_;
};

/// Input / convolutional / fully connected / multiplication / output network.
class IcfmoAgent final : public LearningAgent {
 public:
  IcfmoAgent(ScenarioParams params, NetParams net, AgentOptions opts = {});
  /// Network drawn from the default initialization with the given seed.
  static IcfmoAgent random_init(ScenarioParams params, std::uint64_t seed, AgentOptions opts = {},
                                double eta = 0.99);

  std::string name() const override { return "icfmo"; }
  double score(const PostDecisionState& post) const override;
  double value(const PostDecisionState& post) const override;
  std::vector<double> local_bids(const PostDecisionState& post) const;

  const NetParams& net() const { return net_; }
  NetParams& net() { return net_; }

  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 protected:
  TdResult learn(const PostDecisionState& prev, const PostDecisionState& next,
                 double prev_sojourn) override;

 private:
  NetParams net_;
};

}  // namespace mec
