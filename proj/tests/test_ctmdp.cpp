#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mec/ctmdp.hpp"

using namespace mec;

namespace {

ScenarioParams two_devices() {
  auto p = uniform_params(2, 1.0, 2.0, 0.2, 1.5, 0.1, 2, 2);
  p.arrival_rates = {1.0, 0.5};
  p.tx_rates = {2.0, 3.0};
  p.proc_rates = {1.5, 0.7};
  return p;
}

GlobalState state(std::vector<int> tx, std::vector<int> proc, int e, int b) {
  return {std::move(tx), std::move(proc), e, b};
}

}  // namespace

TEST_CASE("local state index round trips over the whole space") {
  LocalStateSpace space(7, 7);
  CHECK(space.size() == 512);
  for (int i = 0; i < space.size(); ++i) CHECK(space.index(space.decode(i)) == i);
  CHECK_THROWS_AS(space.decode(512), std::out_of_range);
  CHECK_THROWS_AS(space.index({8, 0, LocalEvent::None, false}), std::out_of_range);
}

TEST_CASE("offload space follows queue occupancy") {
  const auto p = two_devices();
  CHECK(offload_action_space(state({0, 0}, {0, 0}, 1, 0), p) == std::vector<int>{1, 0});
  CHECK(offload_action_space(state({2, 0}, {0, 0}, 1, 1), p) == std::vector<int>{0});
  CHECK(offload_action_space(state({0, 0}, {2, 0}, 1, 0), p) == std::vector<int>{1});
  CHECK(offload_action_space(state({2, 0}, {2, 0}, 1, 1), p) == std::vector<int>{-1});
  CHECK(offload_action_space(state({1, 0}, {0, 0}, 0, 1), p) == std::vector<int>{0});
  CHECK(offload_action_space(state({0, 0}, {1, 0}, -1, 0), p) == std::vector<int>{0});
}

TEST_CASE("scheduling keeps the current transmission until it departs") {
  const auto p = two_devices();
  // Device 1 is transmitting, an arrival at device 2 cannot preempt it.
  const auto s = state({1, 1}, {0, 0}, 2, 1);
  for (const auto& a : eligible_actions(s, p)) CHECK(a.schedule == 1);
  // After a transmission departure every non-empty queue is eligible.
  const auto d = state({1, 1}, {0, 0}, 0, 1);
  const auto acts = eligible_actions(d, p);
  REQUIRE(acts.size() == 2);
  CHECK(acts[0] == JointAction{0, 1});
  CHECK(acts[1] == JointAction{0, 2});
  // Idle server with an arrival: only the arriving device can be scheduled, and only if offloaded.
  const auto idle = eligible_actions(state({0, 0}, {0, 0}, 2, 0), p);
  REQUIRE(idle.size() == 2);
  CHECK(idle[0] == JointAction{1, 2});
  CHECK(idle[1] == JointAction{0, 0});
}

TEST_CASE("post-decision map and transitions") {
  const auto p = two_devices();
  const auto s = state({0, 0}, {1, 0}, 1, 0);
  const auto post = post_decision(s, {1, 1});
  CHECK(post.tx_queues == std::vector<int>{1, 0});
  CHECK(post.scheduled == 1);
  CHECK(is_valid(post, p));
  const double beta = sojourn_rate(post, p);
  CHECK(beta == doctest::Approx(1.0 + 0.5 + 2.0 + 1.5));
  double sum = 0.0;
  for (const auto& e : transition_distribution(post, p)) {
    CHECK(e.probability == doctest::Approx(event_rate(post, e.event, p) / beta));
    sum += e.probability;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
  const auto after = next_state(post, 0, p);
  CHECK(after == state({0, 0}, {1, 0}, 0, 1));
  CHECK(is_valid(after, p));
  CHECK_THROWS_AS(next_state(post, -2, p), std::logic_error);
}

TEST_CASE("drop leaves queues untouched") {
  const auto p = two_devices();
  const auto s = state({2, 0}, {2, 0}, 1, 1);
  const auto q = apply_offload(s, -1);
  CHECK(q.dropped);
  CHECK(q.tx_queues == s.tx_queues);
  CHECK(q.proc_queues == s.proc_queues);
  CHECK_THROWS_AS(apply_offload(s, 2), std::invalid_argument);
}

TEST_CASE("validity rejects unreachable states") {
  const auto p = two_devices();
  CHECK_FALSE(is_valid(state({3, 0}, {0, 0}, 1, 1), p));
  CHECK_FALSE(is_valid(state({0, 0}, {0, 0}, 0, 0), p));
  CHECK_FALSE(is_valid(state({1, 0}, {0, 0}, 1, 0), p));
  CHECK_FALSE(is_valid(state({0, 1}, {0, 0}, 1, 1), p));
  CHECK_FALSE(is_valid(state({0, 0}, {0, 0}, 3, 0), p));
  CHECK(is_valid(state({0, 1}, {0, 0}, 0, 1), p));
}

TEST_CASE("local rewards sum to the per-epoch reward") {
  const auto p = two_devices();
  const auto post = post_decision(state({1, 1}, {1, 0}, 0, 1), {0, 2});
  const double beta = sojourn_rate(post, p);
  double total = 0.0;
  for (int n = 0; n < 2; ++n) total += local_reward(post, n, p);
  CHECK(total == doctest::Approx(reward_rate(post, p) / beta).epsilon(1e-12));
}

TEST_CASE("global and local views commute") {
  const auto p = two_devices();
  std::mt19937_64 rng(5);
  GlobalState s = state({0, 0}, {0, 0}, 1, 0);
  for (int step = 0; step < 2000; ++step) {
    REQUIRE(is_valid(s, p));
    const auto locals = local_states(s);
    CHECK(aggregate(locals) == s);
    const auto acts = eligible_actions(s, p);
    const auto a = acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)];
    const auto post = post_decision(s, a);
    const auto post_locals = post_local_states(post);
    for (int n = 0; n < 2; ++n) {
      const auto expect = post_decision_local(locals[n], a, n);
      CHECK(post_locals[n].tx_len == expect.tx_len);
      CHECK(post_locals[n].proc_len == expect.proc_len);
      CHECK(post_locals[n].scheduled == expect.scheduled);
    }
    const auto dist = transition_distribution(post, p);
    const int e = dist[std::uniform_int_distribution<std::size_t>(0, dist.size() - 1)(rng)].event;
    const auto next = next_state(post, e, p);
    const auto next_locals = local_states(next);
    for (int n = 0; n < 2; ++n) CHECK(local_next(post_locals[n], n, e) == next_locals[n]);
    s = next;
  }
}

TEST_CASE("parameter validation") {
  auto p = two_devices();
  p.tx_rates.pop_back();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  auto q = two_devices();
  q.arrival_rates[0] = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  CHECK(q.delay_weights.size() == 2);
  const auto u = two_devices();
  CHECK(u.delay_weight(0) + u.delay_weight(1) == doctest::Approx(0.5));
  CHECK(u.power_weight(1) == doctest::Approx(0.25));
}
