#include "mec/baselines.hpp"

#include <algorithm>

namespace mec {

PolicyDecision QaPolicy::decide(const GlobalState& s, Rng&) {
  const auto offloads = offload_action_space(s, params_);
  int offload = offloads.front();
  if (offloads.size() > 1) {
    const int n = s.event - 1;
    offload = s.tx_queues[n] < s.proc_queues[n] ? 1 : 0;
  }
  const auto schedules = schedule_action_space(s, offload, params_);
  int schedule = schedules.front();
  if (schedules.size() > 1) {
    const auto q = apply_offload(s, offload);
    for (int id : schedules)
      if (q.tx_queues[id - 1] > q.tx_queues[schedule - 1]) schedule = id;
  }
  return {{offload, schedule}, {}, false};
}

double MumtoPolicy::objective(const PostDecisionState& post) const {
  double total = 0.0;
  for (int n = 0; n < params_.n_devices; ++n) {
    const double delay = post.tx_queues[n] / params_.tx_rates[n] +
                         post.proc_queues[n] / params_.proc_rates[n];
    double power = 0.0;
    if (post.scheduled == n + 1) power += params_.tx_powers[n];
    if (post.proc_queues[n] != 0) power += params_.proc_powers[n];
    total += params_.delay_weight(n) * delay + params_.power_weight(n) * power;
  }
  return total;
}

PolicyDecision MumtoPolicy::decide(const GlobalState& s, Rng&) {
  const auto candidates = eligible_actions(s, params_);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& a : candidates) scores.push_back(objective(post_decision(s, a)));
  return decide_by_scores(candidates, scores);
}

PolicyDecision OffloadFirstPolicy::decide(const GlobalState& s, Rng&) {
  const int offload = offload_action_space(s, params_).front();
  const int schedule = schedule_action_space(s, offload, params_).front();
  return {{offload, schedule}, {}, false};
}

}  // namespace mec
