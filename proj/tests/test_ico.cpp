#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mec/ico.hpp"
#include "mec/sim.hpp"

using namespace mec;

TEST_CASE("ico has D + N parameters, fewer than the full network") {
  std::mt19937_64 rng(1);
  const auto ico = IcoParams::initialized(4, 512, rng);
  CHECK(ico.parameter_count() == 512 + 4);
  const std::size_t full = 512 + 4 * (4 * 512) + 4 * 512;
  CHECK(ico.parameter_count() < full);
}

TEST_CASE("ico forward is a tanh-weighted sum") {
  auto net = IcoParams::zeros(2, 8);
  net.c_weights[3] = 0.5;
  net.c_weights[6] = -0.2;
  net.out_weights = {2.0, -1.0};
  const auto t = ico_forward(std::vector<int>{3, 6}, net);
  CHECK(t.value == doctest::Approx(2.0 * std::tanh(0.5) - std::tanh(-0.2)));
  CHECK_THROWS(ico_forward(std::vector<int>{3}, net));
}

TEST_CASE("ico update moves output weights and active filters only") {
  auto net = IcoParams::zeros(2, 8);
  net.c_weights = {0.1, 0.2, -0.1, 0.05, 0.0, 0.3, -0.2, 0.1};
  net.out_weights = {0.5, -0.4};
  auto learner = LearnerState::empty(2, 8);
  std::vector<int> prev{1, 5}, next{2, 2};
  register_visit(learner, prev, 8);
  std::vector<double> nr{0.3, 0.1}, pr{0.2, 0.2};
  const auto before = net;
  const auto r = ico_update(net, learner, {prev, next, nr, 2.0, pr, 0.4});
  CHECK(r.error != 0.0);
  for (int j = 0; j < 8; ++j)
    if (j != 1 && j != 5) CHECK(net.c_weights[j] == before.c_weights[j]);
  CHECK(net.out_weights != before.out_weights);
  const double eps = StepSchedule::epsilon(1);
  CHECK(net.out_weights[0] - before.out_weights[0] ==
        doctest::Approx(eps * r.error * std::tanh(0.2)));
}

TEST_CASE("ico agent trains, freezes and round-trips") {
  const auto p = uniform_params(2, 1.0, 2.0, 0.2, 1.0, 0.3, 2, 2);
  auto a = IcoAgent::random_init(p, 5);
  const auto r = run(p, a, 20000, 3);
  CHECK(r.conserved);
  std::stringstream ss;
  a.save(ss);
  auto b = IcoAgent::random_init(p, 99);
  b.load(ss);
  CHECK(b.net() == a.net());
  CHECK(b.learner() == a.learner());
  a.freeze();
  const auto frozen = a.net();
  run(p, a, 2000, 4);
  CHECK(a.net() == frozen);
}
