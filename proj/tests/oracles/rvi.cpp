#include "oracles/rvi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace mec::oracle {

int EnumeratedModel::index_of(const GlobalState& s) const {
  auto it = lookup_.find({s.tx_queues, s.proc_queues});
  if (it == lookup_.end()) return -1;
  auto jt = it->second.find({s.event, s.scheduled_prev});
  return jt == it->second.end() ? -1 : jt->second;
}

double EnumeratedModel::max_rate() const {
  double r = 0.0;
  for (const auto& cs : choices)
    for (const auto& c : cs) r = std::max(r, c.beta);
  return r;
}

EnumeratedModel enumerate_model(const ScenarioParams& p) {
  p.validate();
  EnumeratedModel m;
  m.params = p;
  std::deque<int> frontier;
  auto intern = [&](const GlobalState& s) {
    int i = m.index_of(s);
    if (i >= 0) return i;
    i = static_cast<int>(m.states.size());
    m.states.push_back(s);
    m.lookup_[{s.tx_queues, s.proc_queues}][{s.event, s.scheduled_prev}] = i;
    frontier.push_back(i);
    return i;
  };
  for (int n = 1; n <= p.n_devices; ++n) {
    GlobalState s;
    s.tx_queues.assign(p.n_devices, 0);
    s.proc_queues.assign(p.n_devices, 0);
    s.event = n;
    intern(s);
  }
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop_front();
    const GlobalState s = m.states[i];
    std::vector<Choice> cs;
    for (const auto& a : eligible_actions(s, p)) {
      const auto post = post_decision(s, a);
      Choice c{a, sojourn_rate(post, p), reward_rate(post, p), {}};
      for (const auto& e : transition_distribution(post, p))
        c.next.push_back({intern(next_state(post, e.event, p)), e.probability});
      cs.push_back(std::move(c));
    }
    if (m.choices.size() <= static_cast<std::size_t>(i)) m.choices.resize(i + 1);
    m.choices[i] = std::move(cs);
  }
  m.choices.resize(m.states.size());
  return m;
}

namespace {

double backup(const Choice& c, double lambda, const std::vector<double>& h, int s) {
  double expect = 0.0;
  for (const auto& [j, prob] : c.next) expect += prob * h[j];
  const double move = c.beta / lambda;
  return c.cost / lambda + move * expect + (1.0 - move) * h[s];
}

RviResult solve(const EnumeratedModel& m, const std::vector<std::vector<int>>& allowed, double tol,
                int max_iter) {
  const std::size_t n = m.states.size();
  const double lambda = 1.1 * m.max_rate();
  std::vector<double> h(n, 0.0), next(n, 0.0);
  RviResult r;
  r.policy.assign(n, 0);
  double gain_step = 0.0;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    for (std::size_t s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (int a : allowed[s]) {
        const double v = backup(m.choices[s][a], lambda, h, static_cast<int>(s));
        if (v < best) {
          best = v;
          r.policy[s] = a;
        }
      }
      next[s] = best;
    }
    gain_step = next[0];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < n; ++s) {
      const double d = next[s] - h[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      next[s] -= gain_step;
    }
    h.swap(next);
    if (hi - lo < tol) break;
  }
  r.gain = gain_step * lambda;
  r.bias = h;
  return r;
}

}  // namespace

RviResult relative_value_iteration(const EnumeratedModel& m, double tol, int max_iter) {
  std::vector<std::vector<int>> all(m.states.size());
  for (std::size_t s = 0; s < all.size(); ++s)
    for (std::size_t a = 0; a < m.choices[s].size(); ++a) all[s].push_back(static_cast<int>(a));
  auto r = solve(m, all, tol, max_iter);
  r.residual = bellman_residual(m, r.gain, r.bias);
  return r;
}

double bellman_residual(const EnumeratedModel& m, double gain, const std::vector<double>& bias) {
  double worst = 0.0;
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : m.choices[s]) {
      double expect = 0.0;
      for (const auto& [j, prob] : c.next) expect += prob * bias[j];
      best = std::min(best, c.cost / c.beta - gain / c.beta + expect);
    }
    worst = std::max(worst, std::abs(best - bias[s]));
  }
  return worst;
}

double policy_gain(const EnumeratedModel& m,
                   const std::function<JointAction(const GlobalState&)>& policy) {
  std::vector<std::vector<int>> fixed(m.states.size());
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    const auto a = policy(m.states[s]);
    for (std::size_t i = 0; i < m.choices[s].size(); ++i)
      if (m.choices[s][i].action == a) fixed[s].push_back(static_cast<int>(i));
    if (fixed[s].empty()) throw std::logic_error("policy chose an ineligible action");
  }
  return solve(m, fixed, 1e-13, 10000000).gain;
}

}  // namespace mec::oracle
