#include "mec/policy.hpp"

#include <stdexcept>

namespace mec {

std::size_t argmin(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmin over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best]) best = i;
  return best;
}

PolicyDecision decide_by_scores(std::span<const JointAction> candidates,
                                std::span<const double> scores) {
  PolicyDecision d;
  d.action = candidates[argmin(scores)];
  d.candidate_scores.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    d.candidate_scores.emplace_back(candidates[i], scores[i]);
  return d;
}

PolicyDecision epsilon_greedy(std::uint64_t k, Rng& rng, PolicyDecision greedy,
                              const GlobalState& s, const ScenarioParams& p,
                              const Exploration& explore) {
  if (!explore.enabled) return greedy;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= explore.probability(k)) return greedy;
  const auto actions = eligible_actions(s, p);
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  greedy.action = actions[pick(rng)];
  greedy.explored = true;
  return greedy;
}

}  // namespace mec
