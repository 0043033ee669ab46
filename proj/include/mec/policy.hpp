#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mec/ctmdp.hpp"

namespace mec {

using Rng = std::mt19937_64;

struct PolicyDecision {
  JointAction action;
  std::vector<std::pair<JointAction, double>> candidate_scores;  // empty for rule-based policies
  bool explored = false;
};

/// A decision maker driven by the simulator once per epoch: decide() on the
/// pre-decision state, then observe() on the resulting post-decision state.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual PolicyDecision decide(const GlobalState& s, Rng& rng) = 0;
  /// `prev_sojourn` is the duration of the previous epoch (0 before the first).
  virtual void observe(const PostDecisionState& post, double prev_sojourn) {
    (void)post;
    (void)prev_sojourn;
  }
};

/// p(k) = G1 / (G2 + k).
struct Exploration {
  bool enabled = true;
  double g1 = 1000.0;
  double g2 = 2000.0;
  double probability(std::uint64_t k) const { return g1 / (g2 + static_cast<double>(k)); }
};

/// With probability p(k) replaces the greedy action by one drawn uniformly from
/// the eligible joint actions. Always consumes one uniform draw, plus one index
/// draw when exploring.
PolicyDecision epsilon_greedy(std::uint64_t k, Rng& rng, PolicyDecision greedy,
                              const GlobalState& s, const ScenarioParams& p,
                              const Exploration& explore);

/// Index of the first minimum.
std::size_t argmin(std::span<const double> scores);

/// Picks the first-ranked candidate; shared by the score-based policies.
PolicyDecision decide_by_scores(std::span<const JointAction> candidates,
                                std::span<const double> scores);

}  // namespace mec
