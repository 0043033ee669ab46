#include "oracles/checks.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "mec/baselines.hpp"
#include "mec/ctmdp.hpp"
#include "mec/icfmo.hpp"
#include "mec/sim.hpp"
#include "oracles/queueing.hpp"

namespace mec::oracle {

namespace {

ScenarioParams random_scenario(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> devices(1, 5), cap(1, 4);
  std::uniform_real_distribution<double> rate(0.2, 5.0), power(0.01, 1.0);
  ScenarioParams p;
  p.n_devices = devices(rng);
  p.tx_cap = cap(rng);
  p.proc_cap = cap(rng);
  for (int n = 0; n < p.n_devices; ++n) {
    p.arrival_rates.push_back(rate(rng));
    p.tx_rates.push_back(rate(rng));
    p.tx_powers.push_back(power(rng));
    p.proc_rates.push_back(rate(rng));
    p.proc_powers.push_back(power(rng));
    p.delay_weights.push_back(0.5);
    p.power_weights.push_back(0.5);
  }
  p.validate();
  return p;
}

GlobalState random_state(const ScenarioParams& p, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> tx(0, p.tx_cap), proc(0, p.proc_cap);
  std::uniform_int_distribution<int> event(-p.n_devices, p.n_devices), sched(0, p.n_devices);
  for (;;) {
    GlobalState s;
    for (int n = 0; n < p.n_devices; ++n) {
      s.tx_queues.push_back(tx(rng));
      s.proc_queues.push_back(proc(rng));
    }
    s.event = event(rng);
    s.scheduled_prev = sched(rng);
    if (is_valid(s, p)) return s;
  }
}

CheckResult fail(const std::string& what, const GlobalState& s) {
  return {false, what + " at " + to_string(s)};
}

}  // namespace

CheckResult fuzz_transitions(std::uint64_t seed, std::uint64_t transitions) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uint64_t done = 0;
  while (done < transitions) {
    const auto p = random_scenario(rng);
    auto s = random_state(p, rng);
    for (int step = 0; step < 10000 && done < transitions; ++step, ++done) {
      if (!is_valid(s, p)) return fail("invalid pre-decision state", s);
      const auto actions = eligible_actions(s, p);
      if (actions.empty()) return fail("no eligible action", s);
      const auto a = actions[std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng)];
      const auto post = post_decision(s, a);
      if (!is_valid(post, p)) return fail("invalid post-decision state", s);
      const auto dist = transition_distribution(post, p);
      double total = 0.0, rates = 0.0;
      for (const auto& e : dist) {
        if (!(e.probability > 0.0)) return fail("non-positive event probability", s);
        total += e.probability;
        rates += event_rate(post, e.event, p);
      }
      if (std::abs(total - 1.0) > 1e-12) return fail("probabilities do not sum to 1", s);
      const double beta = sojourn_rate(post, p);
      if (std::abs(rates - beta) > 1e-12 * beta) return fail("sojourn rate mismatch", s);
      s = next_state(post, sample_event(dist, unit(rng)), p);
    }
  }
  return {true, std::to_string(done) + " transitions"};
}

CheckResult fuzz_commutation(std::uint64_t seed, std::uint64_t states) {
  std::mt19937_64 rng(seed);
  std::uint64_t checked = 0;
  while (checked < states) {
    const auto p = random_scenario(rng);
    for (int i = 0; i < 1000 && checked < states; ++i, ++checked) {
      const auto s = random_state(p, rng);
      const auto locals = local_states(s);
      if (!(aggregate(locals) == s)) return fail("aggregate(local_states(s)) != s", s);
      for (const auto& a : eligible_actions(s, p)) {
        const auto post = post_decision(s, a);
        const auto post_locals = post_local_states(post);
        for (int n = 0; n < p.n_devices; ++n)
          if (!(post_decision_local(locals[n], a, n) == post_locals[n]))
            return fail("post-decision map does not commute", s);
        for (const auto& e : transition_distribution(post, p)) {
          const auto next = local_states(next_state(post, e.event, p));
          for (int n = 0; n < p.n_devices; ++n)
            if (!(local_next(post_locals[n], n, e.event) == next[n]))
              return fail("event transition does not commute", s);
        }
      }
    }
  }
  return {true, std::to_string(checked) + " states"};
}

QueueingReport queueing_check(double lambda, double mu, int capacity, std::uint64_t epochs,
                              std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const auto p = uniform_params(1, lambda, mu, 0.1, 1.0, 0.1, capacity, capacity);
  OffloadFirstPolicy policy(p);
  const auto r = run(p, policy, epochs, seed, {0.1});
  const auto& d = r.window.devices[0];
  // Little's law over the packets admitted to the transmission queue.
  const double admitted_rate = static_cast<double>(d.offloaded) / r.window.elapsed;
  QueueingReport rep;
  rep.simulated_delay = r.window.mean_tx_queue(0) / admitted_rate;
  rep.closed_form_delay = MM1K{lambda, mu, capacity}.mean_delay();
  rep.relative_error =
      std::abs(rep.simulated_delay - rep.closed_form_delay) / rep.closed_form_delay;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

CheckResult sparse_update_check(const ScenarioParams& p, std::uint64_t epochs, std::uint64_t seed) {
  auto agent = IcfmoAgent::random_init(p, seed);
  std::mt19937_64 init(seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : agent.net().node_values) v = u(init);
  Simulation sim(p, agent, seed);
  const int n_dev = p.n_devices;
  const int d = agent.space().size();
  auto same = [](double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
  };

  std::uint64_t updates = 0;
  for (std::uint64_t e = 0; e < epochs; ++e) {
    const NetParams before = agent.net();
    std::vector<int> active;
    if (agent.previous_post()) active = encode(*agent.previous_post(), agent.space());
    sim.step();
    if (active.empty()) continue;
    ++updates;
    const auto& after = agent.net();
    const double dv = agent.last_update()->error;
    for (int n = 0; n < n_dev; ++n) {
      for (int j = 0; j < d; ++j) {
        const int col = n * d + j;
        const bool is_active = j == active[n];
        const bool value_changed = !same(before.node_values[col], after.node_values[col]);
        bool column_changed = false;
        for (int m = 0; m < n_dev; ++m)
          column_changed |= !same(before.f_weight(m, col), after.f_weight(m, col));
        std::ostringstream where;
        where << "epoch " << e << " device " << n + 1 << " local state " << j;
        if (!is_active && (value_changed || column_changed))
          return {false, "inactive entry changed at " + where.str()};
        // A zero TD error leaves every entry in place.
        if (is_active && dv != 0.0 && (!value_changed || !column_changed))
          return {false, "active entry unchanged at " + where.str()};
      }
    }
  }
  return {true, std::to_string(updates) + " updates"};
}

}  // namespace mec::oracle
