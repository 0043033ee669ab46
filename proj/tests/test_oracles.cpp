#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mec/baselines.hpp"
#include "mec/sim.hpp"
#include "oracles/checks.hpp"
#include "oracles/queueing.hpp"
#include "oracles/rvi.hpp"

using namespace mec;

TEST_CASE("M/M/1/K closed forms") {
  oracle::MM1K q{0.5, 1.0, 7};
  double sum = 0.0;
  for (double p : q.distribution()) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(q.blocking() == doctest::Approx(0.5 * std::pow(0.5, 7) / (1 - std::pow(0.5, 8))));
  oracle::MM1K balanced{1.0, 1.0, 4};
  CHECK(balanced.mean_in_system() == doctest::Approx(2.0));
}

TEST_CASE("simulated transmission queue matches M/M/1/K") {
  const auto r = oracle::queueing_check(0.5, 1.0, 7, 200000, 3);
  CHECK(r.relative_error < 0.05);
}

TEST_CASE("fuzzers pass at small scale") {
  CHECK(oracle::fuzz_transitions(1, 50000).ok);
  CHECK(oracle::fuzz_commutation(1, 5000).ok);
  CHECK(oracle::sparse_update_check(uniform_params(2, 1.0, 2.0, 0.2, 1.0, 0.3, 2, 2), 500, 1).ok);
}

TEST_CASE("relative value iteration on a small chain") {
  const auto p = uniform_params(1, 1.0, 3.0, 1.0, 1.0, 0.1, 1, 1);
  const auto m = oracle::enumerate_model(p);
  for (const auto& s : m.states) CHECK(is_valid(s, p));
  const auto r = oracle::relative_value_iteration(m);
  CHECK(r.residual < 1e-8);
  CHECK(r.bias[0] == 0.0);
  // The optimum is no worse than any fixed policy, and a policy's exact gain
  // matches its simulated long-run cost.
  QaPolicy qa(p);
  MumtoPolicy mu(p);
  Rng dummy(1);
  const double gq = oracle::policy_gain(m, [&](const GlobalState& s) { return qa.decide(s, dummy).action; });
  const double gm = oracle::policy_gain(m, [&](const GlobalState& s) { return mu.decide(s, dummy).action; });
  CHECK(r.gain <= gq + 1e-12);
  CHECK(r.gain <= gm + 1e-12);
  const auto sim = run(p, qa, 1000000, 2);
  CHECK(cost_rate_average(sim.window) == doctest::Approx(gq).epsilon(0.02));
}

TEST_CASE("policy gain of the rvi policy equals the optimum") {
  const auto p = uniform_params(2, 0.7, 2.0, 0.4, 1.2, 0.3, 1, 1);
  const auto m = oracle::enumerate_model(p);
  const auto r = oracle::relative_value_iteration(m);
  const double g = oracle::policy_gain(m, [&](const GlobalState& s) {
    return m.choices[m.index_of(s)][r.policy[m.index_of(s)]].action;
  });
  CHECK(g == doctest::Approx(r.gain).epsilon(1e-9));
}
