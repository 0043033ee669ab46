#pragma once

// Ablated approximator: input -> convolution -> output, V = sum_n v_n tanh(c_n).

#include <random>
#include <span>
#include <vector>

#include "mec/icfmo.hpp"

namespace mec {

struct IcoParams {
  int n_devices = 0;
  int local_states = 0;
  std::vector<double> c_weights;    // D
  std::vector<double> out_weights;  // N
  double eta = 0.99;

  static IcoParams zeros(int n_devices, int local_states, double eta = 0.99);
  /// c ~ U(-0.1, 0.1), output weights 0.
  static IcoParams initialized(int n_devices, int local_states, std::mt19937_64& rng,
                               double eta = 0.99);
  std::size_t parameter_count() const { return c_weights.size() + out_weights.size(); }
  bool operator==(const IcoParams&) const = default;
};

struct IcoTrace {
  std::vector<int> active;
  std::vector<double> conv;
  std::vector<double> features;  // tanh(conv)
  double value = 0.0;
};

IcoTrace ico_forward(std::span<const int> active, const IcoParams& net);

/// Semi-gradient TD(0) step with the same error and average-reward update as the
/// full network; every parameter uses the epoch-indexed step.
TdResult ico_update(IcoParams& net, LearnerState& learner, const TdInputs& in,
                    const StepSchedule& sched = {});

class IcoAgent final : public LearningAgent {
 public:
  IcoAgent(ScenarioParams params, IcoParams net, AgentOptions opts = {});
  static IcoAgent random_init(ScenarioParams params, std::uint64_t seed, AgentOptions opts = {},
                              double eta = 0.99);

  std::string name() const override { return "ico"; }
  double score(const PostDecisionState& post) const override;
  double value(const PostDecisionState& post) const override;

  const IcoParams& net() const { return net_; }
  IcoParams& net() { return net_; }

  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 protected:
  TdResult learn(const PostDecisionState& prev, const PostDecisionState& next,
                 double prev_sojourn) override;

 private:
  IcoParams net_;
};

}  // namespace mec
